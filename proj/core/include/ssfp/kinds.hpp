#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ssfp {

/// Deterministic, robust (worst case) or stochastic (expected) objective.
enum class Optimization { kDO, kRO, kSO };

/// Undirected or directed multicommodity-flow formulation.
enum class Flow { kUndirected, kDirected };

/// One of the six model variants, e.g. "SO-D".
struct ModelKind {
  Optimization optimization = Optimization::kDO;
  Flow flow = Flow::kUndirected;
  friend bool operator==(const ModelKind&, const ModelKind&) = default;
};

const char* to_string(Optimization o);
const char* to_string(Flow f);
std::string to_string(ModelKind kind);

/// Case-insensitive: "do", "ro", "so".
std::optional<Optimization> parse_optimization(std::string_view text);
/// Case-insensitive: "u", "d".
std::optional<Flow> parse_flow(std::string_view text);

}  // namespace ssfp
