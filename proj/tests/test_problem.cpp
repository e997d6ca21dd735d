#include "aubin/problem.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

namespace aubin {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string example_text() { return read_file(std::string(AUBIN_SOURCE_DIR) + "/data/example.problem"); }

Polynomial parse_expr(const std::string& text, std::size_t m, std::size_t n) {
  return ExpressionParser({m, n}, true).parse(text);
}

ProblemError::Kind error_kind(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ProblemError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a ProblemError";
  return ProblemError::Kind::Io;
}

Polynomial random_polynomial(testing::Sampler& rng, std::size_t nvars, int terms, unsigned max_exp) {
  Polynomial p(nvars);
  for (int t = 0; t < terms; ++t) {
    Polynomial mono = Polynomial::constant(nvars, rng.rational(5, 4));
    for (std::size_t v = 0; v < nvars; ++v)
      mono = mono * Polynomial::variable(nvars, v).pow(static_cast<unsigned>(rng.integer(0, static_cast<int>(max_exp))));
    p += mono;
  }
  return p;
}

TEST(Expression, CanonicalPrinting) {
  const VariableLayout lay{1, 2};
  EXPECT_EQ(parse_expr("-x2 + x2^2", 1, 2).str(lay.names()), "-x2 + x2^2");
  EXPECT_EQ(parse_expr("x2^2 - x2", 1, 2).str(lay.names()), "-x2 + x2^2");
  EXPECT_EQ(parse_expr("(x1 + 1)^2", 1, 2).str(lay.names()), "1 + 2*x1 + x1^2");
  EXPECT_EQ(parse_expr("1/2*y2 - 3/4", 1, 2).str(lay.names()), "-3/4 + 1/2*y2");
  EXPECT_EQ(parse_expr("x1 - x1", 1, 2).str(lay.names()), "0");
  EXPECT_EQ(parse_expr("-(p1*x1)*-2", 1, 2).str(lay.names()), "2*p1*x1");
  EXPECT_EQ(parse_expr("x1^0", 1, 2).str(lay.names()), "1");
}

TEST(Expression, DerivativeExamples) {
  const VariableLayout lay{1, 2};
  const auto names = lay.names();
  EXPECT_EQ(parse_expr("-x2 + x2^2", 1, 2).derivative(lay.x(1)).str(names), "-1 + 2*x2");
  EXPECT_EQ(parse_expr("p1 - x1 + 2*y1 - 4*y2", 1, 2).derivative(lay.y(0)).str(names), "2");
  EXPECT_EQ(parse_expr("7/3", 1, 2).derivative(lay.p(0)).str(names), "0");
  EXPECT_TRUE(parse_expr("7/3", 1, 2).derivative(lay.y(1)).is_zero());
}

TEST(Expression, SyntaxErrorsCarryColumns) {
  const VariableLayout lay{1, 2};
  auto column_of = [&](const std::string& text, bool allow_y = true) -> std::size_t {
    try {
      ExpressionParser(lay, allow_y).parse(text);
    } catch (const ExprError& e) {
      return e.column();
    }
    return 0;
  };
  EXPECT_EQ(column_of("x1 +"), 5u);
  EXPECT_EQ(column_of("x1 $ 2"), 4u);
  EXPECT_EQ(column_of("x3"), 1u);
  EXPECT_EQ(column_of("p2 + 1"), 1u);
  EXPECT_EQ(column_of("(x1"), 4u);
  EXPECT_EQ(column_of("x1^-1"), 4u);
  EXPECT_EQ(column_of("x1 + y1", false), 6u);
  EXPECT_EQ(column_of("1/0"), 1u);
  EXPECT_EQ(column_of(""), 1u);
  EXPECT_EQ(column_of("x1 + 2"), 0u);
}

TEST(Expression, PrintParseRoundTrip) {
  testing::Sampler rng(11);
  const VariableLayout lay{2, 2};
  for (int trial = 0; trial < 200; ++trial) {
    const Polynomial p = random_polynomial(rng, lay.count(), rng.integer(0, 5), 3);
    const std::string text = p.str(lay.names());
    EXPECT_EQ(ExpressionParser(lay, true).parse(text), p) << text;
  }
}

// Derivative value at z equals the t-coefficient of g(t) = P(z + t e_i),
// recovered by exact interpolation on deg+1 nodes.
Rat interpolated_slope(const Polynomial& p, const RatVec& z, std::size_t var) {
  const std::size_t nodes = p.degree() + 1;
  RatMat vander(nodes, nodes);
  RatVec values(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const Rat t = Rat(static_cast<std::int64_t>(k) + 1);
    Rat power = 1;
    for (std::size_t j = 0; j < nodes; ++j) {
      vander(k, j) = power;
      power *= t;
    }
    RatVec shifted = z;
    shifted[var] += t;
    values[k] = p.evaluate(shifted);
  }
  const auto sol = solve_linear(vander, values);
  return nodes > 1 ? sol->particular[1] : Rat(0);
}

TEST(Expression, DerivativeMatchesInterpolatedSlope) {
  testing::Sampler rng(12);
  const std::size_t nvars = 4;
  int checks = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Polynomial p = random_polynomial(rng, nvars, rng.integer(1, 5), 3);
    for (int pt = 0; pt < 3; ++pt) {
      const RatVec z = rng.vector(nvars, 3, 3);
      for (std::size_t v = 0; v < nvars; ++v) {
        EXPECT_EQ(p.derivative(v).evaluate(z), interpolated_slope(p, z, v));
        ++checks;
      }
    }
  }
  EXPECT_GE(checks, 100);
}

TEST(Expression, ProductAndPowerRules) {
  testing::Sampler rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial a = random_polynomial(rng, 3, 3, 2);
    const Polynomial b = random_polynomial(rng, 3, 3, 2);
    for (std::size_t v = 0; v < 3; ++v) {
      EXPECT_EQ((a * b).derivative(v), a.derivative(v) * b + a * b.derivative(v));
      EXPECT_EQ(a.pow(3).derivative(v), Polynomial::constant(3, 3) * a.pow(2) * a.derivative(v));
    }
  }
}

TEST(Problem, ExampleParses) {
  const ProblemSpec spec = parse_problem(example_text());
  EXPECT_EQ(spec.m, 1u);
  EXPECT_EQ(spec.n, 2u);
  EXPECT_EQ(spec.s, 2u);
  EXPECT_EQ(spec.pbar, (RatVec{0}));
  EXPECT_EQ(spec.xbar, (RatVec{0, 0}));
  EXPECT_EQ(spec.qtilde_value(), (RatVec{0, 0}));
  EXPECT_TRUE(spec.D.contains({0, 0}));
  EXPECT_FALSE(spec.D.contains({1, 0}));
  const auto names = spec.layout().names();
  EXPECT_EQ(spec.qtilde()[0].str(names), "p1 + x1 - 4*x2");
  EXPECT_EQ(spec.qtilde()[1].str(names), "x1 + 4*x2");
}

TEST(Problem, InfeasibleReference) {
  const std::string text = std::regex_replace(example_text(), std::regex("x = 0 0"), "x = 1 0");
  try {
    parse_problem(text);
    FAIL() << "expected an infeasibility error";
  } catch (const ProblemError& e) {
    EXPECT_EQ(e.kind(), ProblemError::Kind::Infeasible);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(1, 1)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
  }
}

TEST(Problem, YVariableInF) {
  const std::string text = std::regex_replace(example_text(), std::regex("f1 = \"x1 - p1\""), "f1 = \"y1\"");
  try {
    parse_problem(text);
    FAIL() << "expected a syntax error";
  } catch (const ProblemError& e) {
    EXPECT_EQ(e.kind(), ProblemError::Kind::Syntax);
    EXPECT_EQ(e.line(), 6u);
    EXPECT_EQ(e.column(), 7u);
    EXPECT_NE(std::string(e.what()).find("y-variables"), std::string::npos);
  }
}

TEST(Problem, GrammarErrors) {
  using K = ProblemError::Kind;
  const std::string ok = "[problem] m=0 n=1 s=1\n[functions]\nf1 = \"x1\"\nq1 = \"y1\"\n[set]\nineq: 1 <= 0\n[reference]\nx = 0\n";
  EXPECT_NO_THROW(parse_problem(ok));
  EXPECT_EQ(error_kind("[problem] m=0 n=1\n[functions]\nf1 = \"x1\"\n"), K::Dimension);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("ineq: 1 <= 0"), "ineq: 1 2 <= 0")), K::Dimension);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("x = 0"), "x = 0 1")), K::Dimension);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("q1 = \"y1\"\n"), "")), K::Dimension);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("f1"), "f2")), K::Dimension);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("\\[set\\]"), "[sets]")), K::Syntax);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("<= 0"), "< 0")), K::Syntax);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("\"x1\""), "x1")), K::Syntax);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("ineq: 1"), "ineq: 1/0")), K::Syntax);
  EXPECT_EQ(error_kind(std::regex_replace(ok, std::regex("x = 0"), "x = 2")), K::Infeasible);
  EXPECT_EQ(error_kind("x = 0\n"), K::Syntax);
}

TEST(Problem, CommentsAndEqualityRows) {
  EXPECT_EQ(error_kind("# header\n[problem] m=1 n=1 s=2\n[functions]\nf1 = \"x1 # inside quotes\"\n"),
            ProblemError::Kind::Syntax);
  const std::string good =
      "[problem] m=1 n=1 s=2   # dims\n[functions]\nf1 = \"x1\"  # f\nq1 = \"y1 - p1\"\nq2 = \"x1*y1\"\n"
      "[set]\neq: 1 0 = 0\nineq: 0 1 <= 1/2\n[reference]\np = 0\nx = 0\n";
  const ProblemSpec spec = parse_problem(good);
  EXPECT_EQ(spec.D.eq().rows(), 1u);
  EXPECT_EQ(spec.D.ineq().rows(), 1u);
  EXPECT_EQ(spec.D.ineq_rhs(), (RatVec{Rat(1, 2)}));
}

TEST(PointData, Example) {
  const PointData pd = point_data(parse_problem(example_text()));
  EXPECT_EQ(pd.b, (RatMat{{2, -4}, {2, 4}}));
  EXPECT_EQ(pd.grad_qtilde, (RatMat{{1, 1, -4}, {0, 1, 4}}));
  EXPECT_EQ(pd.grad_f, (RatMat{{-1, 1, 0}, {0, 0, -1}}));
  EXPECT_EQ(pd.qtilde_val, (RatVec{0, 0}));
  EXPECT_EQ(pd.f_val, (RatVec{0, 0}));
  for (const auto& h : pd.hess_b) EXPECT_TRUE(h.is_zero());
  EXPECT_EQ(lagrangian_gradient(pd, {0, 0}), pd.grad_f);
  EXPECT_THROW(lagrangian_gradient(pd, {0}), std::invalid_argument);
}

TEST(PointData, StateDependentConstraint) {
  const ProblemSpec spec = parse_problem(
      "[problem] m=0 n=1 s=1\n[functions]\nf1 = \"x1\"\nq1 = \"x1*y1\"\n[set]\nineq: 1 <= 0\n[reference]\nx = 0\n");
  const PointData pd = point_data(spec);
  ASSERT_EQ(pd.hess_b.size(), 1u);
  EXPECT_EQ(pd.hess_b[0], (RatMat{{1}}));
  EXPECT_EQ(pd.b, (RatMat{{0}}));
  EXPECT_EQ(lagrangian_gradient(pd, {2}), pd.grad_f + RatMat{{2}});
}

TEST(PointData, TwoDifferentiationOrdersAgree) {
  testing::Sampler rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const VariableLayout lay{static_cast<std::size_t>(rng.integer(0, 2)), static_cast<std::size_t>(rng.integer(1, 3))};
    const Polynomial q = random_polynomial(rng, lay.count(), rng.integer(1, 5), 2);
    const auto collapse = lay.collapse_y();
    const Polynomial qt = q.rename(collapse);
    for (std::size_t i = 0; i < lay.m; ++i)
      EXPECT_EQ(qt.derivative(lay.p(i)), q.derivative(lay.p(i)).rename(collapse));
    for (std::size_t i = 0; i < lay.n; ++i)
      EXPECT_EQ(qt.derivative(lay.x(i)), (q.derivative(lay.x(i)) + q.derivative(lay.y(i))).rename(collapse));
  }
}

TEST(PointData, GradQtildeXBlockIsChainRule) {
  testing::Sampler rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = static_cast<std::size_t>(rng.integer(0, 2)), n = static_cast<std::size_t>(rng.integer(1, 2));
    const VariableLayout lay{m, n};
    ProblemSpec spec;
    spec.m = m;
    spec.n = n;
    spec.s = 2;
    for (std::size_t i = 0; i < n; ++i) spec.f.push_back(random_polynomial(rng, lay.count(), 2, 2).rename(lay.collapse_y()));
    for (std::size_t j = 0; j < 2; ++j) spec.q.push_back(random_polynomial(rng, lay.count(), 4, 2));
    spec.D = HPolyhedron::whole_space(2);
    spec.pbar = rng.vector(m, 2, 2);
    spec.xbar = rng.vector(n, 2, 2);
    const PointData pd = point_data(spec);
    const RatVec z = spec.reference_point();
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Rat chain = spec.q[j].derivative(lay.x(i)).evaluate(z) + spec.q[j].derivative(lay.y(i)).evaluate(z);
        EXPECT_EQ(pd.grad_qtilde_x()(j, i), chain);
        EXPECT_EQ(pd.b(j, i), spec.q[j].derivative(lay.y(i)).evaluate(z));
      }
  }
}

}  // namespace
}  // namespace aubin
