#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "ssfp/error.hpp"
#include "ssfp/feasibility.hpp"
#include "ssfp/instances/instances.hpp"
#include "ssfp/models/models.hpp"
#include "ssfp/solver/branch_and_bound.hpp"
#include "ssfp/solver/brute_force.hpp"
#include "ssfp/solver/simplex.hpp"
#include "support.hpp"

using namespace ssfp;
using namespace ssfp::testing;

namespace {

const Optimization kOpts[] = {Optimization::kDO, Optimization::kRO, Optimization::kSO};
const Flow kFlows[] = {Flow::kUndirected, Flow::kDirected};

milp::Solution solve(const models::BuiltModel& bm) {
  milp::Solution s = solver::solve_milp(bm.milp);
  EXPECT_EQ(s.status, milp::SolveStatus::kOptimal) << to_string(bm.kind);
  return s;
}

void expect_integral(const models::BuiltModel& bm, const milp::Solution& s) {
  for (int j = 0; j < bm.milp.num_variables(); ++j) {
    const auto& v = bm.milp.variable(milp::VarId{j});
    if (v.kind != milp::VarKind::kBinary && !v.implied_integer) continue;
    const double x = s.values[static_cast<size_t>(j)];
    EXPECT_TRUE(std::abs(x) < 1e-6 || std::abs(x - 1) < 1e-6) << v.name << " = " << x;
  }
}

}  // namespace

TEST(Sizes, DeckExampleUndirectedByHand) {
  const auto ts = instances::fig2_instance();
  // |P||E| + nonroot * |Pfeas| * |A|, rows nonroot * |V| + nonroot * |Pfeas| * |Eadm|.
  EXPECT_EQ(models::build(ts, {Optimization::kDO, Flow::kUndirected}).stats, (models::SizeStats{294, 131}));
  // Scenario copies: diesel 294/131, methanol (one pipe) 196/82, plus 98 linking rows each.
  EXPECT_EQ(models::build(ts, {Optimization::kRO, Flow::kUndirected}).stats,
            (models::SizeStats{294 + 294 + 196 + 1, 131 + 131 + 98 + 82 + 98 + 2}));
  EXPECT_EQ(models::build(ts, {Optimization::kSO, Flow::kUndirected}).stats,
            (models::SizeStats{294 + 294 + 196, 131 + 131 + 98 + 82 + 98}));
  const Instance single =
      Instance(ts.first_stage.graph_ptr(), ts.first_stage.pipes_ptr(), ts.first_stage.terminals(), {1},
               all_edges(ts.first_stage.graph()));
  EXPECT_EQ(models::build_do_u(single).stats.variables, 196);
}

TEST(Sizes, StatsMatchFormulaAndModel) {
  std::vector<TwoStageInstance> corpus = {instances::fig2_instance(), four_cycle_two_stage()};
  for (std::uint64_t seed = 1; seed <= 6; ++seed) corpus.push_back(small_grid(seed, 2));
  corpus.push_back(instances::random_artificial({3, 3, 4}, 1));
  for (const auto& ts : corpus) {
    for (auto o : kOpts) {
      for (auto f : kFlows) {
        const auto bm = models::build(ts, {o, f});
        EXPECT_EQ(bm.stats, models::predicted_size(ts, {o, f})) << to_string(bm.kind);
        EXPECT_EQ(bm.stats.variables, bm.milp.num_variables());
        EXPECT_EQ(bm.stats.constraints, bm.milp.num_constraints());
        // Every installation variable is in the extraction map exactly once.
        EXPECT_EQ(bm.extraction.size(), bm.x_vars.size());
      }
    }
  }
  EXPECT_EQ(models::build(instances::fig2_instance(), {Optimization::kDO, Flow::kDirected}).stats,
            (models::SizeStats{687, 621}));
}

TEST(Models, SingleEdge) {
  auto g = std::make_shared<const Graph>(2, std::vector<Edge>{{1, 2}});
  auto p = std::make_shared<const PipeCatalog>(2, std::vector<std::vector<double>>{{3.0, 5.0}});
  Instance inst(g, p, TerminalGroups(2, {{1, 2}}), {1, 2}, {0});
  for (auto f : kFlows) {
    const auto bm = models::build_do(inst, f);
    const auto s = solve(bm);
    EXPECT_NEAR(s.objective, 3.0, 1e-9);
    const auto ex = models::extract(bm, s.values);
    EXPECT_EQ(ex.first_stage, (EdgePipeSet{{1, 0}}));
  }
  EXPECT_EQ(models::build_do_u(inst).stats.variables, 2 + 2 * 2);
  // One group: z_11 is the only z variable and the root row forces it to one.
  const auto d = models::build_do_d(inst);
  const auto z = d.milp.find_variable("z_1_1");
  ASSERT_TRUE(z.has_value());
  EXPECT_NEAR(solve(d).value(*z), 1.0, 1e-9);
}

TEST(Models, ExistingPairsAreFree) {
  const auto ts = instances::fig2_instance();
  const EdgePipeSet route = deck_route_short(ts.first_stage.graph());
  for (auto f : kFlows) {
    const auto bm = models::build_do(ts.first_stage, f, route);
    const auto s = solve(bm);
    EXPECT_NEAR(s.objective, 0.0, 1e-9);
    EXPECT_TRUE(models::extract(bm, s.values, route).first_stage.empty());
  }
}

TEST(Models, DeckExampleAllSixAgree) {
  const double rhos[] = {0.0, 0.45, 0.5, 1.0};
  const double so[] = {4.0, 10.8, 11.0, 11.0};
  for (int i = 0; i < 4; ++i) {
    const auto ts = instances::fig2_instance(rhos[i]);
    for (auto f : kFlows) {
      const auto d = models::build(ts, {Optimization::kDO, f});
      const auto r = models::build(ts, {Optimization::kRO, f});
      const auto s = models::build(ts, {Optimization::kSO, f});
      const auto ds = solve(d), rs = solve(r), ss = solve(s);
      EXPECT_NEAR(ds.objective, 4.0, 1e-7);
      EXPECT_NEAR(rs.objective, 11.0, 1e-7);
      EXPECT_NEAR(ss.objective, so[i], 1e-7) << "rho2 " << rhos[i];
      expect_integral(d, ds);
      expect_integral(r, rs);
      expect_integral(s, ss);
    }
  }
}

TEST(Models, MixedRouteAtShadedRho) {
  const auto ts = instances::fig2_instance(0.45);
  const auto bm = models::build(ts, {Optimization::kSO, Flow::kDirected});
  const auto s = solve(bm);
  const auto ex = models::extract(bm, s.values);
  EXPECT_EQ(ex.first_stage, deck_route_mixed(ts.first_stage.graph()));
  const Graph& g = ts.first_stage.graph();
  EXPECT_TRUE(ex.recourse[0].empty());
  EXPECT_EQ(ex.recourse[1], (EdgePipeSet{{2, E(g, 26, 32)}}));
}

TEST(Models, LinkingAndFeasibilityOfExtractedSolutions) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto ts = small_grid(seed, 2);
    for (auto o : {Optimization::kRO, Optimization::kSO}) {
      for (auto f : kFlows) {
        const auto bm = models::build(ts, {o, f});
        const auto s = solve(bm);
        expect_integral(bm, s);
        // x^(s) >= x componentwise.
        std::map<std::tuple<int, int, int>, double> val;
        for (auto [id, key] : bm.x_vars) val[{key.stage, key.pipe, key.edge}] = s.value(id);
        for (auto [id, key] : bm.x_vars) {
          if (key.stage == 0) continue;
          const double base = val[{0, key.pipe, key.edge}];
          EXPECT_GE(s.value(id) + 1e-9, base);
        }
        const auto ex = models::extract(bm, s.values);
        EXPECT_TRUE(validate_feasible(ts.first_stage, ex.first_stage));
        for (int sc = 0; sc < ts.num_scenarios(); ++sc)
          EXPECT_TRUE(validate_feasible(ts.scenarios[static_cast<size_t>(sc)],
                                        ex.first_stage.united(ex.recourse[static_cast<size_t>(sc)])));
      }
    }
  }
}

TEST(Models, SingleIdenticalScenarioMakesRoEqualDo) {
  const auto ts = four_cycle_two_stage();
  for (auto f : kFlows) {
    const double d = solve(models::build(ts, {Optimization::kDO, f})).objective;
    const auto ro = models::build(ts, {Optimization::kRO, f});
    const auto s = solve(ro);
    EXPECT_NEAR(s.objective, d, 1e-9);
    const auto dvar = ro.milp.find_variable("d");
    ASSERT_TRUE(dvar.has_value());
    EXPECT_NEAR(s.value(*dvar), 0.0, 1e-9);
  }
}

TEST(Models, FourCycleRelaxations) {
  const Instance inst = instances::four_cycle_instance();
  const auto u = models::build_do_u(inst);
  const auto d = models::build_do_d(inst);
  EXPECT_NEAR(solve(u).objective, 3.0, 1e-9);
  EXPECT_NEAR(solve(d).objective, 3.0, 1e-9);
  const auto lu = solver::solve_lp(milp::relax(u.milp));
  const auto ld = solver::solve_lp(milp::relax(d.milp));
  ASSERT_EQ(lu.status, milp::SolveStatus::kOptimal);
  ASSERT_EQ(ld.status, milp::SolveStatus::kOptimal);
  EXPECT_LE(lu.objective, 2.0 + 1e-7);
  EXPECT_GE(ld.objective, lu.objective + 0.1);

  // Half of every edge: fine for the undirected flows, not for the directed ones.
  auto fix_half = [](const models::BuiltModel& bm) {
    milp::Model m = milp::relax(bm.milp);
    for (auto [id, key] : bm.x_vars) m.set_bounds(id, 0.5, 0.5);
    return solver::solve_lp(m).status;
  };
  EXPECT_EQ(fix_half(u), milp::SolveStatus::kOptimal);
  EXPECT_EQ(fix_half(d), milp::SolveStatus::kInfeasible);
}

TEST(Models, RelaxationOrderingOnCorpus) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto ts = small_grid(seed, 2);
    const double lu = solver::solve_lp(milp::relax(models::build_do_u(ts.first_stage).milp)).objective;
    const double ld = solver::solve_lp(milp::relax(models::build_do_d(ts.first_stage).milp)).objective;
    EXPECT_GE(ld, lu - 1e-7) << "seed " << seed;
  }
}

TEST(Oracle, DeckSubgraphMatchesBruteForce) {
  for (double rho : {0.0, 0.3, 5.0 / 12.0, 0.45, 0.5, 0.8, 1.0}) {
    const auto ts = deck_subgraph(rho);
    const double expect[3] = {4.0, 11.0, std::min({4 + 16 * rho, 11.0, 9 + 4 * rho})};
    for (int o = 0; o < 3; ++o) {
      const auto bf = solver::brute_force(ts, kOpts[o]);
      EXPECT_NEAR(bf.objective, expect[o], 1e-9) << to_string(kOpts[o]) << " rho " << rho;
      for (auto f : kFlows) EXPECT_NEAR(solve(models::build(ts, {kOpts[o], f})).objective, bf.objective, 1e-9);
    }
  }
}

TEST(Oracle, SmallGridsMatchBruteForce) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto ts = small_grid(seed);
    for (auto o : kOpts) {
      const double bf = solver::brute_force(ts, o).objective;
      for (auto f : kFlows)
        EXPECT_NEAR(solve(models::build(ts, {o, f})).objective, bf, 1e-9) << "seed " << seed << " " << to_string(o);
    }
  }
}

TEST(Oracle, BruteForceBudget) {
  EXPECT_THROW(solver::brute_force(instances::fig2_instance(), Optimization::kDO), ValidationError);
}
