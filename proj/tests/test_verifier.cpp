#include "aubin/verifier.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

namespace aubin {
namespace {

std::string example_text() {
  std::ifstream in(std::string(AUBIN_SOURCE_DIR) + "/data/example.problem");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Rat r(std::int64_t a, std::int64_t b = 1) { return Rat(BigInt(a), BigInt(b)); }

std::string problem(const std::string& dims, const std::vector<std::string>& fs, const std::vector<std::string>& qs,
                    const std::string& set, const std::string& ref) {
  std::string t = "[problem] " + dims + "\n[functions]\n";
  for (std::size_t i = 0; i < fs.size(); ++i) t += "f" + std::to_string(i + 1) + " = \"" + fs[i] + "\"\n";
  for (std::size_t i = 0; i < qs.size(); ++i) t += "q" + std::to_string(i + 1) + " = \"" + qs[i] + "\"\n";
  return t + "[set]\n" + set + "[reference]\n" + ref;
}

struct Instance {
  ProblemSpec spec;
  PointData pd;
  RatVec lam;
  PolyCone k;
  std::shared_ptr<const DirectionalSystem> sys;
  Verifier ver;

  explicit Instance(const std::string& text)
      : spec(parse_problem(text)),
        pd(point_data(spec)),
        lam(solve_base_multiplier(pd, spec.D, pd.f_val)),
        k(critical_cone(tangent_normal(spec.D, pd.qtilde_val).tangent, lam).cone),
        sys(std::make_shared<const DirectionalSystem>(pd, k, lam)),
        ver(sys) {}
};

const BranchReport* branch_with_face(const Verdict& v, const RatVec& h, const std::string& face) {
  for (const auto& d : v.directions)
    if (d.h == h)
      for (const auto& b : d.branches)
        if (b.face == face) return &b;
  return nullptr;
}

void expect_witnesses_recheck(const Verdict& v, const Instance& s) {
  auto check = [&](const ConditionResult& c) {
    if (c.witness) EXPECT_TRUE(s.ver.recheck(*c.witness, s.spec.D)) << to_string(c.witness->kind);
  };
  check(v.existence);
  if (v.nondirectional) check(*v.nondirectional);
  for (const auto& d : v.directions)
    for (const auto& b : d.branches) {
      check(b.span_injective);
      check(b.face_positivity);
      check(b.parameter_annihilation);
      check(b.face_injective);
      check(b.subregular);
      check(b.coderivative);
    }
}

TEST(Assumption, ExampleHolds) {
  const ProblemSpec spec = parse_problem(example_text());
  const auto res = check_assumption_A(point_data(spec), spec.D);
  EXPECT_EQ(res.result.status, Status::Holds);
  EXPECT_TRUE(res.nondegenerate);
  EXPECT_EQ(res.normal_span.size(), 2u);
}

TEST(Assumption, ZeroBAtVertexFails) {
  const ProblemSpec spec = parse_problem(problem("m=0 n=2 s=2", {"x1", "x2"}, {"x1", "x2"},
                                                 "ineq: 1 0 <= 0\nineq: 0 1 <= 0\n", "x = 0 0\n"));
  const PointData pd = point_data(spec);
  const auto res = check_assumption_A(pd, spec.D);
  ASSERT_EQ(res.result.status, Status::Fails);
  EXPECT_EQ(res.result.witness->lam, (RatVec{1, 0}));
  EXPECT_FALSE(res.nondegenerate);
  const Verdict v = verdict(spec);
  EXPECT_FALSE(v.established);
  EXPECT_FALSE(v.fatal.empty());
}

TEST(Assumption, InteriorHoldsVacuously) {
  const ProblemSpec spec = parse_problem(problem("m=0 n=1 s=1", {"x1"}, {"x1"}, "ineq: 1 <= 1\n", "x = 0\n"));
  const auto res = check_assumption_A(point_data(spec), spec.D);
  EXPECT_EQ(res.result.status, Status::Holds);
  EXPECT_TRUE(res.normal_span.empty());
}

TEST(BaseMultiplier, Examples) {
  const ProblemSpec spec = parse_problem(example_text());
  const PointData pd = point_data(spec);
  EXPECT_EQ(solve_base_multiplier(pd, spec.D, pd.f_val), (RatVec{0, 0}));

  const ProblemSpec interior = parse_problem(problem("m=0 n=1 s=1", {"x1"}, {"y1"}, "ineq: 1 <= 1\n", "x = 0\n"));
  const PointData ipd = point_data(interior);
  EXPECT_EQ(solve_base_multiplier(ipd, interior.D, ipd.f_val), (RatVec{0}));

  const ProblemSpec shifted = parse_problem(std::regex_replace(example_text(), std::regex("x1 - p1\""), "x1 - p1 + 1\""));
  const PointData spd = point_data(shifted);
  EXPECT_EQ(spd.f_val, (RatVec{1, 0}));
  try {
    solve_base_multiplier(spd, shifted.D, spd.f_val);
    FAIL() << "expected an infeasible multiplier";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), PipelineError::Kind::InfeasibleMultiplier);
  }
}

TEST(BaseMultiplier, ActiveConstraintGivesPositiveMultiplier) {
  const ProblemSpec spec = parse_problem(problem("m=0 n=1 s=1", {"x1 - 2"}, {"y1"}, "ineq: 1 <= 0\n", "x = 0\n"));
  const PointData pd = point_data(spec);
  EXPECT_EQ(solve_base_multiplier(pd, spec.D, pd.f_val), (RatVec{2}));
}

TEST(Verdict, ExampleEstablishedByFaceRoute) {
  const Instance s(example_text());
  const Verdict v = verdict(s.spec);
  ASSERT_TRUE(v.fatal.empty());
  EXPECT_EQ(*v.lam, (RatVec{0, 0}));
  EXPECT_TRUE(v.critical->same_set(PolyCone(2, RatMat::identity(2))));
  EXPECT_EQ(v.critical->dump(), (std::vector<std::string>{"ineq: 0 1 <= 0", "ineq: 1 0 <= 0"}));
  EXPECT_EQ(v.existence.status, Status::Holds);
  EXPECT_TRUE(v.established);
  ASSERT_TRUE(v.used.has_value());
  EXPECT_EQ(*v.used, Route::Thm6);
  EXPECT_FALSE(v.sampled_directions);
  for (const auto& rr : v.routes) EXPECT_EQ(rr.status, Status::Holds) << to_string(rr.route);
  for (const auto& d : v.directions)
    for (const auto& b : d.branches) {
      EXPECT_EQ(b.span_injective.status, Status::Holds);
      EXPECT_EQ(b.face_positivity.status, Status::Holds);
      EXPECT_EQ(b.coderivative.status, Status::Holds);
    }
  EXPECT_TRUE(hierarchy_violations(v).empty());
  expect_witnesses_recheck(v, s);
}

TEST(Verdict, ExampleFacePairsPerCase) {
  const Verdict v = verdict(parse_problem(example_text()));
  const auto* c1 = branch_with_face(v, {1}, "{1,2}");
  const auto* c2 = branch_with_face(v, {-1}, "{}");
  const auto* c3 = branch_with_face(v, {-1}, "{2}");
  const auto* c4 = branch_with_face(v, {-1}, "{1}");
  ASSERT_TRUE(c1 && c2 && c3 && c4);
  EXPECT_EQ(c1->pairs, (std::vector<std::string>{"{1,2}|{1,2}"}));
  EXPECT_EQ(c2->pairs, (std::vector<std::string>{"{}|{}"}));
  EXPECT_EQ(c3->pairs, (std::vector<std::string>{"{2}|{2}"}));
  EXPECT_EQ(c4->pairs, (std::vector<std::string>{"{1}|{1}"}));
  EXPECT_EQ(c3->points.front().k, (RatVec{r(-8, 7), r(2, 7)}));
  EXPECT_EQ(c4->points.front().k, (RatVec{r(-9, 7), r(-4, 7)}));
}

TEST(Verdict, ExampleOtherRoutes) {
  const ProblemSpec spec = parse_problem(example_text());
  for (Route r : {Route::Thm5, Route::Cor1, Route::Thm6}) {
    const Verdict v = verdict(spec, {r, {}});
    EXPECT_TRUE(v.established);
    EXPECT_EQ(*v.used, r);
  }
}

TEST(Verdict, FailureConeExampleCases) {
  const Instance s(example_text());
  const auto pairs_for = [&](const RatVec& h, const RatVec& k, const RatVec& eta) {
    return admissible_face_pairs(s.sys->lattice(), s.sys->v_of(h, k), eta);
  };
  EXPECT_EQ(s.ver.face_positivity({-1}, {-1, 0}, {0, 0}, pairs_for({-1}, {-1, 0}, {0, 0})).status, Status::Holds);
  const auto p3 = pairs_for({-1}, {r(-8, 7), r(2, 7)}, {0, r(1, 14)});
  ASSERT_EQ(p3.size(), 1u);
  const PolyCone c = face_difference(p3[0].first, p3[0].second);
  EXPECT_TRUE(c.same_set(PolyCone(2, {}, RatMat{{0, 1}})));
  EXPECT_FALSE(s.ver.failure_cone_witness(c).has_value());
}

TEST(Verdict, SmoothCaseEstablished) {
  const std::string text = std::regex_replace(example_text(), std::regex("ineq: 1 0 <= 0\nineq: 0 1 <= 0\n"), "");
  const Instance s(text);
  const Verdict v = verdict(s.spec);
  EXPECT_TRUE(s.k.same_set(PolyCone::whole_space(2)));
  EXPECT_TRUE(v.established);
  EXPECT_EQ(v.nondirectional->status, Status::Holds);
  EXPECT_TRUE(hierarchy_violations(v).empty());
  for (const auto& d : v.directions) {
    ASSERT_EQ(d.ds.k.size(), 1u);
    EXPECT_EQ(d.ds.k[0], (RatVec{d.h[0], 0}));
  }
}

TEST(Verdict, SingularSmoothCaseNotEstablished) {
  std::string text = std::regex_replace(example_text(), std::regex("ineq: 1 0 <= 0\nineq: 0 1 <= 0\n"), "");
  text = std::regex_replace(text, std::regex("-x2 \\+ x2\\^2"), "x2^2");
  const Instance s(text);
  const Verdict v = verdict(s.spec);
  EXPECT_FALSE(v.established);
  for (const auto& rr : v.routes) EXPECT_EQ(rr.status, Status::Fails);
  EXPECT_EQ(v.nondirectional->status, Status::Fails);
  bool continuum = false;
  for (const auto& d : v.directions) continuum = continuum || d.ds.continuum;
  EXPECT_TRUE(continuum);
  EXPECT_TRUE(hierarchy_violations(v).empty());
  expect_witnesses_recheck(v, s);
}

TEST(Conditions, SpanInjectivityFailsWhenStateGradientVanishes) {
  const Instance s(problem("m=1 n=1 s=1", {"x1 - p1"}, {"y1 - x1"}, "ineq: 1 <= 0\n", "p = 0\nx = 0\n"));
  const Verdict v = verdict(s.spec);
  bool found = false;
  for (const auto& d : v.directions)
    for (const auto& b : d.branches)
      if (b.span_injective.status == Status::Fails) {
        found = true;
        EXPECT_EQ(b.span_injective.witness->mu, (RatVec{1}));
        EXPECT_TRUE(s.ver.recheck(*b.span_injective.witness, s.spec.D));
      }
  EXPECT_TRUE(found);
  EXPECT_NE(v.routes[0].status, Status::Holds);
  EXPECT_TRUE(hierarchy_violations(v).empty());
  expect_witnesses_recheck(v, s);
}

TEST(Conditions, InteriorPointSpanInjectiveVacuously) {
  const Instance s(example_text());
  EXPECT_EQ(s.ver.span_injective({-1}, {-1, 0}, {0, 0}).status, Status::Holds);
}

TEST(Conditions, FacePositivityFailsForZeroHessian) {
  const Instance s(problem("m=1 n=2 s=1", {"0", "0"}, {"y1"}, "", "p = 0\nx = 0 0\n"));
  const Verdict v = verdict(s.spec);
  EXPECT_FALSE(v.established);
  const auto& b = v.directions.front().branches.front();
  ASSERT_EQ(b.face_positivity.status, Status::Fails);
  EXPECT_FALSE(is_zero(b.face_positivity.witness->w));
  EXPECT_TRUE(s.ver.recheck(*b.face_positivity.witness, s.spec.D));
  EXPECT_TRUE(hierarchy_violations(v).empty());
  expect_witnesses_recheck(v, s);
}

TEST(Conditions, ParameterAnnihilationFails) {
  const Instance s(problem("m=1 n=1 s=1", {"0"}, {"p1 + y1 - x1"}, "ineq: 1 <= 0\n", "p = 0\nx = 0\n"));
  const Verdict v = verdict(s.spec);
  const BranchReport* zero_dir = nullptr;
  for (const auto& d : v.directions)
    if (d.h == RatVec{0} && !d.branches.empty()) zero_dir = &d.branches.front();
  ASSERT_NE(zero_dir, nullptr);
  ASSERT_EQ(zero_dir->parameter_annihilation.status, Status::Fails);
  EXPECT_EQ(zero_dir->parameter_annihilation.witness->mu, (RatVec{1}));
  EXPECT_EQ(zero_dir->face_injective.status, Status::Fails);
  EXPECT_EQ(v.existence.status, Status::Fails);
  EXPECT_TRUE(s.ver.recheck(*v.existence.witness, s.spec.D));
  EXPECT_TRUE(hierarchy_violations(v).empty());
  expect_witnesses_recheck(v, s);
}

TEST(Conditions, ParameterFreeConstraintsAnnihilateVacuously) {
  const Instance free(problem("m=1 n=1 s=1", {"x1 - p1"}, {"y1"}, "ineq: 1 <= 0\n", "p = 0\nx = 0\n"));
  const Verdict v = verdict(free.spec);
  for (const auto& d : v.directions)
    for (const auto& b : d.branches) EXPECT_EQ(b.parameter_annihilation.status, Status::Holds);
  EXPECT_TRUE(hierarchy_violations(v).empty());
}

TEST(Conditions, DuplicatedConstraintBreaksFaceInjectivity) {
  const Instance s(problem("m=1 n=2 s=2", {"x1", "x2"}, {"p1 + y1", "p1 + y1 + y2 - x2"},
                        "ineq: 1 0 <= 0\nineq: 0 1 <= 0\n", "p = 0\nx = 0 0\n"));
  EXPECT_EQ(s.pd.grad_qtilde_x(), (RatMat{{1, 0}, {1, 0}}));
  const Verdict v = verdict(s.spec);
  bool seen = false;
  for (const auto& d : v.directions)
    for (const auto& b : d.branches)
      if (b.face_injective.status == Status::Fails) {
        seen = true;
        const RatVec& mu = b.face_injective.witness->mu;
        EXPECT_TRUE(positively_parallel(mu, {1, -1}) || positively_parallel(mu, {-1, 1}));
        EXPECT_TRUE(is_zero(s.pd.grad_qtilde_p().transpose() * mu));
        EXPECT_NE(b.parameter_annihilation.status, Status::Fails);
      }
  EXPECT_TRUE(seen);
  EXPECT_TRUE(hierarchy_violations(v).empty());
  expect_witnesses_recheck(v, s);
}

TEST(Conditions, SubregularityCases) {
  const Instance ex(example_text());
  const Verdict v = verdict(ex.spec);
  for (const auto& d : v.directions)
    for (const auto& b : d.branches) EXPECT_EQ(b.subregular.status, Status::Holds);
  const Instance flat(problem("m=1 n=1 s=1", {"0"}, {"y1 - x1"}, "ineq: 1 <= 0\n", "p = 0\nx = 0\n"));
  const Verdict fv = verdict(flat.spec);
  bool gap = false;
  for (const auto& d : fv.directions)
    for (const auto& b : d.branches)
      if (b.subregular.status == Status::NotEstablished) gap = true;
  EXPECT_TRUE(gap);
  EXPECT_EQ(fv.routes[2].status, Status::Fails);
}

TEST(Nondirectional, ExampleFailsWithExactWitness) {
  const Instance s(example_text());
  const auto res = s.ver.nondirectional();
  ASSERT_EQ(res.status, Status::Fails);
  const Witness& w = *res.witness;
  EXPECT_EQ(w.kind, WitnessKind::NondirectionalSolution);
  EXPECT_TRUE(s.ver.recheck(w, s.spec.D));
  EXPECT_FALSE(is_zero(w.v) && is_zero(w.pstar));
}

TEST(Nondirectional, PublishedTripleOrientation) {
  const Instance s(example_text());
  const RatVec v{-1, r(-1, 2)};
  const RatVec w{r(9, 16), r(7, 16)};
  const RatVec pstar = s.sys->grad_lagrangian().transpose() * v + s.pd.grad_qtilde.transpose() * w;
  EXPECT_EQ(pstar, (RatVec{r(25, 16), 0, 0}));
  EXPECT_TRUE(s.ver.graph_normal_member(v, w, +1));
  EXPECT_FALSE(s.ver.graph_normal_member(v, w, -1));
}

TEST(Nondirectional, HoldsWhenPremiseCollapses) {
  const Instance s(problem("m=1 n=1 s=1", {"x1 - p1"}, {"y1"}, "ineq: 1 <= 0\n", "p = 0\nx = 0\n"));
  EXPECT_EQ(s.ver.nondirectional().status, Status::Holds);
}

TEST(Nondirectional, OriginPairOnlyHasTrivialSolutions) {
  const Instance s(example_text());
  const auto& faces = s.sys->lattice().faces();
  const Face origin = faces.back();
  ASSERT_EQ(origin.label(), "{1,2}");
  EXPECT_FALSE(s.ver.coderivative_solution({{origin, origin}}, WitnessKind::NondirectionalSolution).has_value());
}

TEST(Witness, RejectsTamperedCertificates) {
  const Instance s(example_text());
  Witness w = *s.ver.nondirectional().witness;
  w.pstar = w.pstar + RatVec{1};
  EXPECT_FALSE(s.ver.recheck(w, s.spec.D));
  Witness a;
  a.kind = WitnessKind::AViolation;
  a.lam = {1, 0};
  EXPECT_FALSE(s.ver.recheck(a, s.spec.D));
  Witness gap;
  gap.kind = WitnessKind::ExistenceGap;
  gap.h = {1};
  EXPECT_FALSE(s.ver.recheck(gap, s.spec.D));
}

TEST(Directions, GridOnCubeBoundary) {
  bool sampled = false;
  auto d1 = direction_set(1, {}, sampled);
  EXPECT_FALSE(sampled);
  EXPECT_EQ(d1, (std::vector<RatVec>{{1}, {-1}, {0}}));
  auto d2 = direction_set(2, {{r(1, 3), r(2, 3)}}, sampled);
  EXPECT_TRUE(sampled);
  EXPECT_EQ(d2.size(), 1u + 16u + 1u);
  EXPECT_EQ(d2.front(), (RatVec{r(1, 3), r(2, 3)}));
  EXPECT_EQ(direction_set(0, {}, sampled), (std::vector<RatVec>{{}}));
  EXPECT_EQ(direction_set(4, {}, sampled).size(), 81u - 1u + 1u);
}

TEST(Verdict, TwoParameterProblemIsQualified) {
  const Instance s(problem("m=2 n=1 s=1", {"x1 - p1 - p2"}, {"y1"}, "ineq: 1 <= 0\n", "p = 0 0\nx = 0\n"));
  const Verdict v = verdict(s.spec);
  EXPECT_TRUE(v.sampled_directions);
  EXPECT_TRUE(v.established);
  EXPECT_TRUE(hierarchy_violations(v).empty());
  EXPECT_THROW(verdict(s.spec, {Route::Auto, {{1}}}), std::invalid_argument);
}

}  // namespace
}  // namespace aubin
