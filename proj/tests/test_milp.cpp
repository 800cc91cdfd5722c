#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ssfp/error.hpp"
#include "ssfp/instances/instances.hpp"
#include "ssfp/milp/lp_format.hpp"
#include "ssfp/milp/model.hpp"
#include "ssfp/models/models.hpp"

using namespace ssfp;
using namespace ssfp::milp;

TEST(Model, RejectsBadDeclarations) {
  Model m("t");
  m.add_binary("x");
  EXPECT_THROW(m.add_binary("x"), ValidationError);
  EXPECT_THROW(m.add_continuous("", 0, 1), ValidationError);
  EXPECT_THROW(m.add_continuous("y", 2, 1), ValidationError);
  EXPECT_THROW(m.add_variable("b", VarKind::kBinary, 0, 2), ValidationError);
  EXPECT_THROW(m.add_constraint("c", {{VarId{7}, 1.0}}, Sense::kLessEqual, 1), ValidationError);
  m.add_constraint("c", {{VarId{0}, 1.0}}, Sense::kLessEqual, 1);
  EXPECT_THROW(m.add_constraint("c", {}, Sense::kLessEqual, 1), ValidationError);
  EXPECT_THROW(m.set_implied_integer(VarId{0}), ValidationError);
}

TEST(Model, MergesRepeatedTerms) {
  Model m;
  const VarId x = m.add_continuous("x", 0, 10);
  const VarId y = m.add_continuous("y", 0, 10);
  const ConId c = m.add_constraint("c", {{x, 1}, {y, 2}, {x, 3}, {y, -2}}, Sense::kGreaterEqual, 4);
  const auto& row = m.constraint(c);
  ASSERT_EQ(row.terms.size(), 2u);
  EXPECT_EQ(row.terms[0].var, x);
  EXPECT_DOUBLE_EQ(row.terms[0].coef, 4.0);
  EXPECT_DOUBLE_EQ(row.terms[1].coef, 0.0);
  EXPECT_EQ(m.num_nonzeros(), 2);
}

TEST(Model, EvaluateAndViolation) {
  Model m;
  const VarId x = m.add_binary("x", 3.0);
  const VarId y = m.add_continuous("y", 0, 5, -1.0);
  m.add_constraint("c1", {{x, 1}, {y, 1}}, Sense::kLessEqual, 4);
  m.add_constraint("c2", {{y, 1}}, Sense::kEqual, 2);
  const std::vector<double> good{1, 2};
  EXPECT_DOUBLE_EQ(m.evaluate(good), 1.0);
  EXPECT_TRUE(m.is_feasible(good));
  const std::vector<double> frac{0.5, 2};
  EXPECT_FALSE(m.is_feasible(frac));
  const std::vector<double> bad{1, 3.5};
  EXPECT_DOUBLE_EQ(m.max_violation(bad), 1.5);
  EXPECT_EQ(m.num_binaries(), 1);
  const Model r = relax(m);
  EXPECT_EQ(r.num_binaries(), 0);
  EXPECT_EQ(r.variable(x).upper, 1.0);
  EXPECT_TRUE(r.is_feasible(frac));
}

TEST(LpFormat, HandWrittenModelRoundTrip) {
  Model m("small");
  const VarId a = m.add_binary("a", 1.5);
  const VarId b = m.add_continuous("b", -3, 7.25, -2);
  const VarId c = m.add_continuous("c", 0, kInfinity, 0);
  const VarId d = m.add_continuous("d", -kInfinity, kInfinity, 1e-3);
  m.set_implied_integer(c);
  m.add_constraint("r1", {{a, 1}, {b, -1}}, Sense::kLessEqual, 0.1);
  m.add_constraint("r2", {{b, 1}, {c, 1.0 / 3.0}, {d, 1}}, Sense::kEqual, -2);
  m.add_constraint("r3", {{a, 2}, {c, 0}}, Sense::kGreaterEqual, 0);
  const std::string text = export_lp(m);
  const Model back = parse_lp(text);
  EXPECT_TRUE(m.structurally_equal(back));
  EXPECT_EQ(export_lp(back), text);
}

TEST(LpFormat, AllBuildsRoundTrip) {
  const auto ts = instances::fig2_instance(0.3);
  for (auto o : {Optimization::kDO, Optimization::kRO, Optimization::kSO}) {
    for (auto f : {Flow::kUndirected, Flow::kDirected}) {
      const auto bm = models::build(ts, {o, f});
      const Model back = parse_lp(export_lp(bm.milp));
      EXPECT_TRUE(bm.milp.structurally_equal(back)) << to_string(bm.kind);
    }
  }
}

TEST(LpFormat, ParseErrorsCarryPosition) {
  try {
    parse_lp("Minimize\n obj: x + y\nSubject To\n c1: x + ^ <= 3\nEnd\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_GT(e.column(), 1);
  }
  EXPECT_THROW(parse_lp("Maximize\n obj: x\nEnd\n"), ParseError);
  EXPECT_THROW(parse_lp("Minimize\n obj: x\nSubject To\n c: x <= \nEnd\n"), ParseError);
}

TEST(LpFormat, NumbersSurviveRoundTrip) {
  Model m;
  const double tricky[] = {0.1, 1.0 / 3.0, 1e-12, 123456789.123456789, -2.5e7};
  for (int i = 0; i < 5; ++i) m.add_continuous("v" + std::to_string(i), -tricky[i], 1e9, tricky[i]);
  const Model back = parse_lp(export_lp(m));
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(back.variable(VarId{i}).objective, tricky[i]);
    EXPECT_EQ(back.variable(VarId{i}).lower, -tricky[i]);
  }
}
