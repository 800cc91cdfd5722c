#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ssfp/graph.hpp"
#include "ssfp/instance.hpp"

namespace ssfp::instances {

/// rows x cols grid, vertex (i, j) -> i * cols + j + 1, 4-neighbourhood.
/// Edges are listed row by row: the right neighbour before the one below.
Graph grid_graph(int rows, int cols);

/// Grid with some vertices deleted. Surviving vertices keep their grid number
/// as label and are renumbered 1..V internally in label order.
Graph grid_graph_without(int rows, int cols, const std::vector<int>& removed_labels);

/// The 6x6 ship deck example with rooms 11, 15 and 21 removed: engine room 8,
/// diesel tank 22, methanol tank 32; single-walled pipes cost 1 per edge and
/// double-walled 2; scenario 1 is diesel and scenario 2 methanol (double-walled
/// only); both scenarios inflate costs by 2. Vertex labels are the room numbers.
TwoStageInstance fig2_instance(double rho2 = 0.5);

/// The 4-cycle 1-2-3-4 with unit costs, one pipe type and the diagonal groups
/// {1, 3} and {2, 4}.
Instance four_cycle_instance();

/// Portable generator: std::mt19937_64 with explicit conversions, so a seed
/// yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n), rejection sampled.
  std::uint64_t below(std::uint64_t n);
  /// Fisher-Yates, from the back.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<size_t>(below(i))]);
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Shape of one randomly generated two-stage instance.
struct RandomSpec {
  int rows = 5;
  int cols = 5;
  int scenarios = 2;
  int groups = 1;
  int terminals_per_group = 3;
  /// Cost ratio of each pipe type to the drawn edge cost; size = pipe count.
  std::vector<double> pipe_ratios{1.0, 2.0};
  double cost_lo = 1.0;
  double cost_hi = 10.0;
  double multiplier = 2.0;
};

/// Draw order: one cost per edge, then one shuffle of all vertices per stage
/// (first stage, then scenarios in order) whose prefix fills the groups one
/// after another. All pipes are feasible and all edges admissible in every
/// stage; probabilities are equal.
TwoStageInstance random_instance(const RandomSpec& spec, std::uint64_t seed);

struct SweepSetting {
  int scenarios = 2;
  int groups = 1;
  int terminals_per_group = 3;
  friend bool operator==(const SweepSetting&, const SweepSetting&) = default;
};

struct SweepConfig {
  std::vector<int> scenarios{2, 3, 4};
  std::vector<int> groups{1, 2, 3};
  std::vector<int> terminals_per_group{3, 4, 5};
  std::vector<std::uint64_t> seeds;
  int rows = 5;
  int cols = 5;

  /// Cartesian product, scenarios outermost and terminals innermost.
  std::vector<SweepSetting> settings() const;
  static SweepConfig with_seed_count(int n);
};

/// Stable id of a setting within the default ranges: ((S-2)*3 + (K-1))*3 + (T-3).
int setting_id(const SweepSetting& s);

/// Grid sweep instance; the generator seed mixes the setting id and the seed.
TwoStageInstance random_artificial(const SweepSetting& setting, std::uint64_t seed, int rows = 5, int cols = 5);

/// JSON instance files. Vertex references in the file are labels; without
/// "graph.labels" they are the internal ids 1..V.
TwoStageInstance parse_instance_json(const std::string& text);
std::string instance_to_json(const TwoStageInstance& instance);
TwoStageInstance load_instance(const std::filesystem::path& path);
void save_instance(const TwoStageInstance& instance, const std::filesystem::path& path);

/// Terminal and routing data of the realistic ship (diesel first
/// stage, diesel and methanol scenarios) without the graph itself.
struct RealisticTerminals {
  struct Stage {
    std::vector<std::vector<int>> groups;
    std::vector<int> pipes;
    /// Diesel routing rules: edges touching a forbidden room are inadmissible.
    bool restricted = false;
    double probability = 0.0;  // scenarios only
  };
  int num_vertices = 0;
  /// Rooms closed to diesel pipes.
  std::vector<int> forbidden;
  std::vector<double> pipe_ratios;
  double multiplier = 2.0;
  Stage first_stage;
  std::vector<Stage> scenarios;

  /// Distinct terminal rooms of a scenario (0-based) or, for -1, the first stage.
  int num_terminals(int scenario) const;
};

RealisticTerminals parse_realistic_terminals(const std::string& text);
RealisticTerminals load_realistic_terminals(const std::filesystem::path& path);

/// Places the terminal data on a caller-supplied graph (vertex labels are room
/// numbers) with single-walled base costs per edge. Throws ValidationError
/// when a referenced room is missing from the graph.
TwoStageInstance realistic_instance(const RealisticTerminals& data, std::shared_ptr<const Graph> graph,
                                    const std::vector<double>& edge_costs);

}  // namespace ssfp::instances
