#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssfp/error.hpp"
#include "ssfp/experiments/experiments.hpp"
#include "ssfp/instances/instances.hpp"
#include "support.hpp"

using namespace ssfp;
using namespace ssfp::testing;
namespace ex = ssfp::experiments;

TEST(Evaluate, DeckRouteLines) {
  for (double rho : {0.0, 0.2, 0.45, 0.7, 1.0}) {
    const auto ts = instances::fig2_instance(rho);
    const Graph& g = ts.first_stage.graph();
    EXPECT_NEAR(ex::evaluate_under(Optimization::kSO, ts, deck_route_short(g)), 4 + 16 * rho, 1e-9);
    EXPECT_NEAR(ex::evaluate_under(Optimization::kSO, ts, deck_route_mixed(g)), 9 + 4 * rho, 1e-9);
    EXPECT_NEAR(ex::evaluate_under(Optimization::kSO, ts, deck_route_robust(g)), 11, 1e-9);
    EXPECT_NEAR(ex::evaluate_under(Optimization::kRO, ts, deck_route_robust(g)), 11, 1e-9);
    EXPECT_NEAR(ex::evaluate_under(Optimization::kRO, ts, deck_route_short(g)), 20, 1e-9);
    EXPECT_NEAR(ex::evaluate_under(Optimization::kDO, ts, deck_route_mixed(g)), 9, 1e-9);
  }
}

TEST(Evaluate, ExplicitProbabilitiesAndErrors) {
  const auto ts = instances::fig2_instance(0.5);
  const Graph& g = ts.first_stage.graph();
  EXPECT_NEAR(ex::evaluate_under(Optimization::kSO, ts, deck_route_short(g), std::vector<double>{0.75, 0.25}), 8, 1e-9);
  EXPECT_THROW(ex::evaluate_under(Optimization::kSO, ts, {}), ValidationError);
  const auto ev = ex::evaluate(ts, deck_route_short(g));
  EXPECT_DOUBLE_EQ(ev.first_stage_cost, 4);
  ASSERT_EQ(ev.recourse.size(), 2u);
  EXPECT_NEAR(ev.recourse[0], 0, 1e-9);
  EXPECT_NEAR(ev.recourse[1], 16, 1e-9);
  EXPECT_NEAR(ev.worst_case(), 20, 1e-9);
  EXPECT_THROW(ev.expected({1.0}), ValidationError);
}

TEST(Vss, DeckEndpoints) {
  EXPECT_NEAR(ex::vss(instances::fig2_instance(0.0)), 0.0, 1e-9);
  const auto r = ex::vss_report(instances::fig2_instance(1.0));
  EXPECT_NEAR(r.eevs, 20, 1e-9);
  EXPECT_NEAR(r.so_optimum, 11, 1e-9);
  EXPECT_NEAR(r.vss(), 9, 1e-9);
  EXPECT_NEAR(ex::vss(instances::fig2_instance(0.5), std::vector<double>{1.0, 0.0}), 0.0, 1e-9);
}

TEST(Curves, DeckEnvelope) {
  const auto table = ex::cost_curves(instances::fig2_instance(), ex::parse_grid("0:1:0.01"));
  ASSERT_EQ(table.lines.size(), 3u);
  ASSERT_EQ(table.intersections.size(), 2u);
  EXPECT_NEAR(table.intersections[0], 5.0 / 12.0, 1e-9);
  EXPECT_NEAR(table.intersections[1], 0.5, 1e-9);
  EXPECT_NEAR(table.lines[0].intercept, 4, 1e-9);
  EXPECT_NEAR(table.lines[0].slope, 16, 1e-9);
  EXPECT_NEAR(table.lines[1].intercept, 9, 1e-9);
  EXPECT_NEAR(table.lines[1].slope, 4, 1e-9);
  EXPECT_NEAR(table.lines[2].intercept, 11, 1e-9);
  EXPECT_NEAR(table.lines[2].slope, 0, 1e-9);
  ASSERT_EQ(table.rows.size(), 101u);
  double max_vss = 0, max_ratio = 0;
  for (const auto& row : table.rows) {
    const double rho = row.rho2;
    EXPECT_NEAR(row.so_optimum, std::min({4 + 16 * rho, 11.0, 9 + 4 * rho}), 1e-9);
    EXPECT_NEAR(row.do_cost, 4 + 16 * rho, 1e-9);
    EXPECT_NEAR(row.ro_cost, 11, 1e-9);
    EXPECT_GE(row.vss(), -1e-9);
    max_vss = std::max(max_vss, row.vss());
    max_ratio = std::max(max_ratio, row.vss() / row.so_optimum);
  }
  EXPECT_NEAR(table.rows[45].so_optimum, 10.8, 1e-9);
  EXPECT_NEAR(max_vss, 9, 1e-9);
  EXPECT_NEAR(table.rows.back().vss(), 9, 1e-9);
  EXPECT_NEAR(max_ratio, 9.0 / 11.0, 1e-9);

  const std::string csv = ex::curves_csv(table);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rho2,route_1,route_2,route_3,do,ro,so_optimum,vss");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 102);
}

TEST(Curves, GridParsing) {
  const auto g = ex::parse_grid("0:1:0.25");
  EXPECT_EQ(g, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(ex::parse_grid("0:1:0.01").size(), 101u);
  EXPECT_THROW(ex::parse_grid("0:1"), ValidationError);
  EXPECT_THROW(ex::parse_grid("1:0:0.1"), ValidationError);
  EXPECT_THROW(ex::parse_grid("0:1:0"), ValidationError);
  EXPECT_THROW(ex::cost_curves(instances::fig2_instance(), {1.5}), ValidationError);
  EXPECT_THROW(ex::cost_curves(four_cycle_two_stage(), {0.5}), ValidationError);
}

TEST(Sweep, RecordInvariantsAndDeterminism) {
  ex::SweepOptions opt;
  opt.config = instances::SweepConfig::with_seed_count(2);
  opt.settings = {{2, 1, 3}};
  opt.threads = 1;
  opt.bnb.branching = solver::Branching::kReliability;
  const auto a = ex::run_sweep(opt);
  opt.threads = 2;
  const auto b = ex::run_sweep(opt);
  ASSERT_EQ(a.records.size(), 2u);
  EXPECT_EQ(a.failed, 0);
  EXPECT_EQ(ex::sweep_csv(a), ex::sweep_csv(b));
  EXPECT_EQ(ex::matrix_csv(a), ex::matrix_csv(b));
  EXPECT_EQ(ex::ratios_csv(a), ex::ratios_csv(b));
  for (const auto& r : a.records) {
    ASSERT_TRUE(r.ok) << r.diagnostic;
    ASSERT_EQ(r.reports.size(), 6u);
    for (int m = 0; m < 3; ++m) {
      EXPECT_NEAR(r.matrix[m][m], 1.0, 1e-9);
      for (int c = 0; c < 3; ++c) EXPECT_GE(r.matrix[m][c], 1 - 1e-7);
    }
    EXPECT_GE(r.ro_do_ratio, 1 - 1e-9);
    for (const auto& rep : r.reports) {
      EXPECT_GT(rep.size.variables, 0);
      EXPECT_GT(rep.size.constraints, 0);
      EXPECT_TRUE(std::isfinite(rep.objective));
    }
  }
  for (int m = 0; m < 3; ++m) EXPECT_NEAR(a.mean_of_ratios[m][m], 1.0, 1e-9);
  const std::string m = ex::matrix_csv(a);
  EXPECT_EQ(m.substr(0, m.find('\n')), "aggregation,solution,objective_DO,objective_RO,objective_SO");
  const std::string ratios = ex::ratios_csv(a);
  EXPECT_EQ(ratios.substr(0, ratios.find('\n')), "setting_id,seed,ro_do_ratio");
  EXPECT_EQ(std::count(ratios.begin(), ratios.end(), '\n'), 3);
}

TEST(Sweep, FailedRecordsCarryDiagnostic) {
  solver::BnbConfig tight;
  tight.node_limit = 1;
  // Setting S4 K3 T5 never closes at the root on this seed.
  const auto r = ex::run_record({4, 3, 5}, 1, instances::SweepConfig{}, tight);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.diagnostic.find("node_limit"), std::string::npos) << r.diagnostic;
}
