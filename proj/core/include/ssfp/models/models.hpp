#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ssfp/instance.hpp"
#include "ssfp/kinds.hpp"
#include "ssfp/milp/model.hpp"

namespace ssfp::models {

/// Stage 0 is the first stage; stage s >= 1 is scenario s (1-based, matching
/// the `_s{s}` name suffix).
struct XKey {
  int stage = 0;
  PipeId pipe = 0;
  EdgeId edge = 0;
  friend bool operator==(const XKey&, const XKey&) = default;
};

struct SizeStats {
  long long variables = 0;
  long long constraints = 0;
  friend bool operator==(const SizeStats&, const SizeStats&) = default;
};

struct BuiltModel {
  milp::Model milp;
  ModelKind kind;
  int num_scenarios = 0;
  /// Every installation variable, in creation order.
  std::vector<std::pair<milp::VarId, XKey>> x_vars;
  /// Name of every installation variable -> its key.
  std::unordered_map<std::string, XKey> extraction;
  SizeStats stats;
};

/// Pairs read back from a solution vector: the first-stage installations
/// (existing pairs excluded) and, per scenario, the pairs added on top.
struct ExtractedSolution {
  EdgePipeSet first_stage;
  std::vector<EdgePipeSet> recourse;
};

/// Deterministic models of one stage. `existing` pairs are fixed to 1 at no cost.
BuiltModel build_do_u(const Instance& instance, const EdgePipeSet& existing = {});
BuiltModel build_do_d(const Instance& instance, const EdgePipeSet& existing = {});
BuiltModel build_do(const Instance& instance, Flow flow, const EdgePipeSet& existing = {});

/// Worst-case and expected-cost two-stage models. build_so uses
/// `two_stage.probabilities`.
BuiltModel build_ro(const TwoStageInstance& two_stage, Flow flow);
BuiltModel build_so(const TwoStageInstance& two_stage, Flow flow);

/// DO builds the first stage only (with the existing pairs).
BuiltModel build(const TwoStageInstance& two_stage, ModelKind kind);

/// A pair counts as installed when its x value exceeds 0.5.
ExtractedSolution extract(const BuiltModel& model, const std::vector<double>& values,
                          const EdgePipeSet& existing = {});

/// Closed-form size of a single-stage build.
SizeStats predicted_size(const Instance& instance, Flow flow);
/// Closed-form size of build(two_stage, kind).
SizeStats predicted_size(const TwoStageInstance& two_stage, ModelKind kind);

}  // namespace ssfp::models
