#include "ssfp/kinds.hpp"

#include <algorithm>
#include <cctype>

namespace ssfp {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const char* to_string(Optimization o) {
  switch (o) {
    case Optimization::kDO: return "DO";
    case Optimization::kRO: return "RO";
    case Optimization::kSO: return "SO";
  }
  return "?";
}

const char* to_string(Flow f) { return f == Flow::kUndirected ? "U" : "D"; }

std::string to_string(ModelKind kind) { return std::string(to_string(kind.optimization)) + "-" + to_string(kind.flow); }

std::optional<Optimization> parse_optimization(std::string_view text) {
  const std::string t = lower(text);
  if (t == "do") return Optimization::kDO;
  if (t == "ro") return Optimization::kRO;
  if (t == "so") return Optimization::kSO;
  return std::nullopt;
}

std::optional<Flow> parse_flow(std::string_view text) {
  const std::string t = lower(text);
  if (t == "u") return Flow::kUndirected;
  if (t == "d") return Flow::kDirected;
  return std::nullopt;
}

}  // namespace ssfp
