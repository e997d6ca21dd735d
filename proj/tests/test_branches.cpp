#include "aubin/branches.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace aubin {
namespace {

ProblemSpec example() { return load_problem(std::string(AUBIN_SOURCE_DIR) + "/data/example.problem"); }

DirectionalSystem example_system() {
  const PointData pd = point_data(example());
  return DirectionalSystem(pd, PolyCone(2, RatMat::identity(2)), {0, 0});
}

Rat r(std::int64_t a, std::int64_t b = 1) { return Rat(BigInt(a), BigInt(b)); }

std::vector<BranchPoint> sorted(std::vector<BranchPoint> v) {
  std::sort(v.begin(), v.end(), [](const BranchPoint& a, const BranchPoint& b) {
    return detail::lex_less(concat(a.k, a.eta), concat(b.k, b.eta));
  });
  return v;
}

TEST(Branches, ExamplePositiveDirection) {
  const auto sys = example_system();
  const auto branches = sys.solve({1});
  const auto pts = DirectionalSystem::solution_points(branches);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].k, (RatVec{r(-1, 2), r(1, 8)}));
  EXPECT_EQ(pts[0].eta, (RatVec{r(23, 64), r(25, 64)}));
  ASSERT_EQ(branches.size(), 1u);
  EXPECT_EQ(branches[0].face.label(), "{1,2}");
  EXPECT_FALSE(branches[0].continuum);
}

TEST(Branches, ExampleNegativeDirection) {
  const auto sys = example_system();
  const auto branches = sys.solve({-1});
  const std::vector<BranchPoint> expected{{{-1, 0}, {0, 0}},
                                          {{r(-8, 7), r(2, 7)}, {0, r(1, 14)}},
                                          {{r(-9, 7), r(-4, 7)}, {r(1, 7), 0}}};
  EXPECT_EQ(sorted(DirectionalSystem::solution_points(branches)), sorted(expected));
  ASSERT_EQ(branches.size(), 3u);
  for (const auto& b : branches) {
    EXPECT_FALSE(b.continuum);
    EXPECT_TRUE(b.eta_unique);
  }
}

TEST(Branches, ZeroDirectionContainsOrigin) {
  const auto sys = example_system();
  const auto pts = DirectionalSystem::solution_points(sys.solve({0}));
  EXPECT_NE(std::find(pts.begin(), pts.end(), BranchPoint{{0, 0}, {0, 0}}), pts.end());
  EXPECT_EQ(pts.size(), 1u);
}

TEST(Branches, PositiveHomogeneity) {
  const auto sys = example_system();
  for (const Rat& h : {Rat(1), Rat(-1), r(3, 5), r(-7, 2)})
    for (const Rat& t : {Rat(2), r(1, 3)}) {
      auto scaled = DirectionalSystem::solution_points(sys.solve({t * h}));
      auto base = DirectionalSystem::solution_points(sys.solve({h}));
      for (auto& p : base) p = {t * p.k, t * p.eta};
      EXPECT_EQ(sorted(scaled), sorted(base)) << "h=" << h << " t=" << t;
    }
}

TEST(Branches, RepresentativesSolveTheSystem) {
  const auto sys = example_system();
  for (const Rat& h : {Rat(1), Rat(-1), Rat(0)})
    for (const auto& b : sys.solve({h}))
      for (const auto& p : b.representatives) {
        EXPECT_TRUE(sys.is_solution({h}, p.k, p.eta));
        EXPECT_TRUE(b.face.contains(sys.v_of({h}, p.k)));
        EXPECT_EQ(sys.unique_eta({h}, p.k), p.eta);
      }
}

TEST(Branches, UniqueEtaExamples) {
  const auto sys = example_system();
  EXPECT_EQ(sys.unique_eta({1}, {r(-1, 2), r(1, 8)}), (RatVec{r(23, 64), r(25, 64)}));
  EXPECT_EQ(sys.unique_eta({-1}, {-1, 0}), (RatVec{0, 0}));
  EXPECT_EQ(sys.unique_eta({-1}, {r(-9, 7), r(-4, 7)}), (RatVec{r(1, 7), 0}));
  EXPECT_THROW(sys.unique_eta({1}, {1, 1}), std::invalid_argument);
  EXPECT_THROW(sys.unique_eta({-1}, {-2, 0}), std::invalid_argument);
  EXPECT_THROW(sys.unique_eta({1, 1}, {0, 0}), std::invalid_argument);
}

TEST(Branches, GraphicalDerivativeDM) {
  const auto sys = example_system();
  EXPECT_TRUE(sys.dm({1}, {r(-1, 2), r(1, 8)}).contains_zero());
  const auto outside = sys.dm({1}, {1, 1});
  EXPECT_TRUE(outside.empty);
  EXPECT_EQ(sys.v_of({1}, {1, 1}), (RatVec{-2, 5}));
  EXPECT_FALSE(outside.contains_zero());
  EXPECT_TRUE(sys.dm({-1}, {-1, 0}).contains_zero());
  EXPECT_FALSE(sys.dm({-1}, {-2, 0}).contains_zero());
  EXPECT_TRUE(sys.dm({-1}, {-2, 0}).contains({-1, 0}));
}

TEST(Branches, GraphicalDerivativeDS) {
  const auto sys = example_system();
  EXPECT_EQ(sys.ds({1}).k, (std::vector<RatVec>{{r(-1, 2), r(1, 8)}}));
  auto neg = sys.ds({-1}).k;
  std::sort(neg.begin(), neg.end(), detail::lex_less);
  EXPECT_EQ(neg, (std::vector<RatVec>{{r(-9, 7), r(-4, 7)}, {r(-8, 7), r(2, 7)}, {-1, 0}}));
  EXPECT_EQ(sys.ds({0}).k, (std::vector<RatVec>{{0, 0}}));
  EXPECT_FALSE(sys.ds({-1}).continuum);
}

TEST(Branches, ContinuumBranch) {
  const ProblemSpec spec = parse_problem(
      "[problem] m=1 n=1 s=1\n[functions]\nf1 = \"p1\"\nq1 = \"y1\"\n[set]\nineq: 1 <= 1\n[reference]\np = 0\nx = 0\n");
  const PointData pd = point_data(spec);
  const DirectionalSystem sys(pd, PolyCone::whole_space(1), {0});
  const auto branches = sys.solve({0});
  ASSERT_EQ(branches.size(), 1u);
  EXPECT_TRUE(branches[0].continuum);
  EXPECT_EQ(branches[0].solution_set.lineality.size(), 1u);
  EXPECT_GE(branches[0].representatives.size(), 3u);
  for (const auto& p : branches[0].representatives) EXPECT_TRUE(sys.is_solution({0}, p.k, p.eta));
  EXPECT_TRUE(sys.solve({1}).empty());
}

TEST(Branches, SmoothEquationCase) {
  const ProblemSpec spec = parse_problem(
      "[problem] m=1 n=2 s=1\n[functions]\nf1 = \"2*x1 + x2 - p1\"\nf2 = \"x2 + 3*p1\"\nq1 = \"y1\"\n"
      "[set]\nineq: 1 <= 5\n[reference]\np = 0\nx = 0 0\n");
  const PointData pd = point_data(spec);
  const DirectionalSystem sys(pd, PolyCone::whole_space(1), {0});
  for (const Rat& h : {Rat(1), Rat(-1), r(2, 3)}) {
    const auto pts = DirectionalSystem::solution_points(sys.solve({h}));
    ASSERT_EQ(pts.size(), 1u);
    const auto direct = solve_linear(pd.grad_f_x(), -(pd.grad_f_p() * RatVec{h}));
    EXPECT_EQ(pts[0].k, direct->particular);
  }
}

}  // namespace
}  // namespace aubin
