#pragma once

#include "aubin/verifier.hpp"

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aubin {

/// SplitMix64; used instead of <random> distributions so that seeded runs
/// produce identical samples on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool chance(unsigned percent) { return next() % 100 < percent; }

  Rat rational(std::int64_t range, std::int64_t max_den) {
    return Rat(BigInt(integer(-range, range)), BigInt(integer(1, max_den)));
  }

  RatVec vector(std::size_t n, std::int64_t range, std::int64_t max_den) {
    RatVec v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(rational(range, max_den));
    return v;
  }

  RatMat integer_matrix(std::size_t r, std::size_t c, std::int64_t range, unsigned zero_percent) {
    RatMat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = chance(zero_percent) ? Rat(0) : Rat(integer(-range, range));
    return m;
  }

 private:
  std::uint64_t state_;
};

struct OracleCheck {
  std::string name;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<std::string> disagreements;

  void disagree(const std::string& what) { disagreements.push_back(what); }
};

struct OracleReport {
  std::vector<OracleCheck> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.disagreements.empty()) return false;
    return true;
  }
};

namespace oracle {

/// Generators of {x | G x <= 0, E x = 0} found by testing every subset of
/// inequality rows for a one-dimensional kernel. No double description.
struct RayEnumeration {
  std::vector<RatVec> rays;
  std::vector<RatVec> lineality;
};

inline bool satisfies(const RatMat& g, const RatMat& e, const RatVec& x) {
  for (std::size_t i = 0; i < g.rows(); ++i)
    if (dot(g.row(i), x).sign() > 0) return false;
  for (std::size_t i = 0; i < e.rows(); ++i)
    if (!dot(e.row(i), x).is_zero()) return false;
  return true;
}

inline RayEnumeration enumerate_rays(const RatMat& g, const RatMat& e, std::size_t dim) {
  RayEnumeration out;
  std::vector<RatVec> fixed = e.row_list();
  for (const auto& r : g.row_list()) fixed.push_back(r);
  if (fixed.empty())
    for (std::size_t i = 0; i < dim; ++i) out.lineality.push_back(unit_vector(dim, i));
  else
    for (const auto& l : nullspace(RatMat::from_rows(fixed, dim))) out.lineality.push_back(primitive(l));
  std::vector<RatVec> base = e.row_list();
  base.insert(base.end(), out.lineality.begin(), out.lineality.end());
  const std::size_t base_rank = rank_of(base, dim);
  if (base_rank + 1 > dim) return out;
  const std::size_t need = dim - 1 - base_rank;
  const std::size_t rows = g.rows();
  if (need > rows) return out;
  std::vector<std::size_t> pick(need);
  for (std::size_t i = 0; i < need; ++i) pick[i] = i;
  for (;;) {
    std::vector<RatVec> sys = base;
    for (auto i : pick) sys.push_back(g.row(i));
    const auto ker = nullspace(sys.empty() ? RatMat(0, dim) : RatMat::from_rows(sys, dim));
    if (ker.size() == 1)
      for (const RatVec& z : {ker[0], -ker[0]})
        if (satisfies(g, e, z)) {
          RatVec p = primitive(z);
          if (std::find(out.rays.begin(), out.rays.end(), p) == out.rays.end()) out.rays.push_back(std::move(p));
        }
    std::size_t j = need;
    while (j > 0 && pick[j - 1] == rows - need + j - 1) --j;
    if (j == 0) break;
    ++pick[j - 1];
    for (std::size_t t = j; t < need; ++t) pick[t] = pick[t - 1] + 1;
  }
  return out;
}

/// Coefficients (alpha >= 0, beta) with x = sum alpha_i rays_i + sum beta_j lin_j,
/// searched over linearly independent subsets of the rays.
inline std::optional<std::pair<std::vector<Rat>, std::vector<Rat>>> conic_combination(
    const RatVec& x, const std::vector<RatVec>& rays, const std::vector<RatVec>& lin) {
  const std::size_t dim = x.size();
  std::vector<std::size_t> lin_idx;
  std::vector<RatVec> lin_basis;
  for (std::size_t j = 0; j < lin.size(); ++j) {
    auto trial = lin_basis;
    trial.push_back(lin[j]);
    if (rank_of(trial, dim) == trial.size()) {
      lin_basis = std::move(trial);
      lin_idx.push_back(j);
    }
  }
  const std::size_t r = rays.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
    std::vector<RatVec> cols = lin_basis;
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < r; ++i)
      if (mask >> i & 1) {
        cols.push_back(rays[i]);
        used.push_back(i);
      }
    if (cols.size() > dim || rank_of(cols, dim) != cols.size()) continue;
    const RatMat a = cols.empty() ? RatMat(dim, 0) : RatMat::from_columns(cols, dim);
    std::optional<LinearSolution> sol;
    if (cols.empty()) {
      if (!is_zero(x)) continue;
      sol = LinearSolution{{}, {}};
    } else {
      sol = solve_linear(a, x);
    }
    if (!sol) continue;
    bool nonneg = true;
    for (std::size_t i = 0; i < used.size(); ++i) nonneg = nonneg && sol->particular[lin_basis.size() + i].sign() >= 0;
    if (!nonneg) continue;
    std::vector<Rat> alpha(r, Rat(0)), beta(lin.size(), Rat(0));
    for (std::size_t i = 0; i < used.size(); ++i) alpha[used[i]] = sol->particular[lin_basis.size() + i];
    for (std::size_t j = 0; j < lin_idx.size(); ++j) beta[lin_idx[j]] = sol->particular[j];
    return std::make_pair(alpha, beta);
  }
  return std::nullopt;
}

inline bool in_conic_hull(const RatVec& x, const RayEnumeration& g) {
  return conic_combination(x, g.rays, g.lineality).has_value();
}

/// Random points of {x | G x <= 0, E x = 0}, drawn from integer combinations
/// of a kernel basis of E and filtered by the inequalities.
inline std::vector<RatVec> sample_points(const RatMat& g, const RatMat& e, std::size_t dim, Rng& rng, std::size_t count) {
  std::vector<RatVec> basis;
  if (e.rows() == 0)
    for (std::size_t i = 0; i < dim; ++i) basis.push_back(unit_vector(dim, i));
  else
    basis = nullspace(e);
  std::vector<RatVec> out;
  for (std::size_t t = 0; t < count * 8 && out.size() < count; ++t) {
    RatVec x = zeros(dim);
    for (const auto& b : basis) x = x + Rat(rng.integer(-3, 3)) * b;
    if (satisfies(g, e, x)) out.push_back(std::move(x));
  }
  return out;
}

/// Checks that the enumerated generators lie in the cone and span every sampled cone point.
inline bool generator_complete(const RatMat& g, const RatMat& e, std::size_t dim, const RayEnumeration& gens, Rng& rng) {
  for (const auto& r : gens.rays)
    if (!satisfies(g, e, r) || is_zero(r)) return false;
  for (const auto& l : gens.lineality)
    if (!satisfies(g, e, l) || !satisfies(g, e, -l)) return false;
  for (const auto& x : sample_points(g, e, dim, rng, 12))
    if (!in_conic_hull(x, gens)) return false;
  return true;
}

/// One instance of the positivity quantifier: for all w != 0 with b w in C
/// there is w~ with M w~ in C and w^T A w~ > 0.
struct FailureInstance {
  RatMat a, b, m;
  PolyCone c;
};

struct FailureComparison {
  bool complete = false;
  bool oracle_fails = false;
  bool reduction_fails = false;
  bool witness_valid = true;
  bool polar_identity = true;
  std::optional<RatVec> oracle_w;
  std::optional<RatVec> reduction_w;

  bool agree() const { return oracle_fails == reduction_fails && witness_valid && polar_identity; }
};

inline Verifier verifier_for(const FailureInstance& inst) {
  PointData pd;
  pd.m = 0;
  pd.n = inst.a.rows();
  pd.s = inst.b.rows();
  pd.f_val = zeros(pd.n);
  pd.qtilde_val = zeros(pd.s);
  pd.grad_f = inst.a;
  pd.grad_qtilde = inst.m;
  pd.b = inst.b;
  pd.hess_b.assign(pd.s, RatMat(pd.n, pd.n));
  auto sys = std::make_shared<const DirectionalSystem>(pd, PolyCone::whole_space(pd.s), zeros(pd.s));
  return Verifier(sys);
}

inline FailureComparison compare_failure_cone(const FailureInstance& inst, Rng& rng) {
  const std::size_t n = inst.a.rows();
  const RatMat gw = inst.c.ineq() * inst.b, ew = inst.c.eq() * inst.b;
  const RatMat gt = inst.c.ineq() * inst.m, et = inst.c.eq() * inst.m;
  const RayEnumeration w_gens = enumerate_rays(gw, ew, n);
  const RayEnumeration t_gens = enumerate_rays(gt, et, n);
  FailureComparison out;
  out.complete = generator_complete(gw, ew, n, w_gens, rng) && generator_complete(gt, et, n, t_gens, rng);

  // sup over w~ of w^T A w~ is +infinity on a lineality direction, else the sign of the best ray
  auto sup_positive = [&](const RatVec& w) {
    const RatVec aw = inst.a.transpose() * w;
    for (const auto& l : t_gens.lineality)
      if (!dot(aw, l).is_zero()) return true;
    for (const auto& r : t_gens.rays)
      if (dot(aw, r).sign() > 0) return true;
    return false;
  };

  std::vector<RatVec> candidates = w_gens.rays;
  for (const auto& l : w_gens.lineality) {
    candidates.push_back(l);
    candidates.push_back(-l);
  }
  for (std::size_t i = 0; i < w_gens.rays.size(); ++i)
    for (std::size_t j = i + 1; j < w_gens.rays.size(); ++j) candidates.push_back(w_gens.rays[i] + w_gens.rays[j]);
  std::vector<RatVec> fg = gw.row_list(), fe = ew.row_list();
  for (const auto& r : t_gens.rays) fg.push_back(inst.a * r);
  for (const auto& l : t_gens.lineality) fe.push_back(inst.a * l);
  const RayEnumeration bad = enumerate_rays(fg.empty() ? RatMat(0, n) : RatMat::from_rows(fg, n),
                                            fe.empty() ? RatMat(0, n) : RatMat::from_rows(fe, n), n);
  candidates.insert(candidates.end(), bad.rays.begin(), bad.rays.end());
  candidates.insert(candidates.end(), bad.lineality.begin(), bad.lineality.end());
  for (const auto& w : candidates)
    if (!is_zero(w) && satisfies(gw, ew, w) && !sup_positive(w)) {
      out.oracle_fails = true;
      out.oracle_w = w;
      break;
    }

  const Verifier ver = verifier_for(inst);
  if (auto wit = ver.failure_cone_witness(inst.c)) {
    out.reduction_fails = true;
    out.reduction_w = wit->first;
    out.witness_valid = !is_zero(wit->first) && satisfies(gw, ew, wit->first) && !sup_positive(wit->first);
  }

  // (M^{-1} C)° = M^T C°: brute-force rays of the left side against generators of the right
  std::vector<RatVec> pg, pe;
  for (const auto& r : t_gens.rays) pg.push_back(r);
  for (const auto& l : t_gens.lineality) pe.push_back(l);
  const RayEnumeration left = enumerate_rays(pg.empty() ? RatMat(0, n) : RatMat::from_rows(pg, n),
                                             pe.empty() ? RatMat(0, n) : RatMat::from_rows(pe, n), n);
  RayEnumeration right;
  for (const auto& r : inst.c.ineq().row_list()) right.rays.push_back(inst.m.transpose() * r);
  for (const auto& l : inst.c.eq().row_list()) right.lineality.push_back(inst.m.transpose() * l);
  for (const auto& r : left.rays) out.polar_identity = out.polar_identity && in_conic_hull(r, right);
  for (const auto& l : left.lineality)
    out.polar_identity = out.polar_identity && in_conic_hull(l, right) && in_conic_hull(-l, right);
  for (const auto& r : right.rays) out.polar_identity = out.polar_identity && in_conic_hull(r, left);
  for (const auto& l : right.lineality)
    out.polar_identity = out.polar_identity && in_conic_hull(l, left) && in_conic_hull(-l, left);
  return out;
}

inline FailureInstance random_failure_instance(Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3)), s = static_cast<std::size_t>(rng.integer(1, 3));
  FailureInstance inst;
  inst.a = rng.integer_matrix(n, n, 2, 40);
  inst.b = rng.integer_matrix(s, n, 2, 40);
  inst.m = rng.integer_matrix(s, n, 2, 40);
  const std::size_t rows = static_cast<std::size_t>(rng.integer(0, 3));
  inst.c = PolyCone(s, rng.integer_matrix(rows, s, 2, 30), rng.chance(20) ? rng.integer_matrix(1, s, 1, 30) : RatMat());
  return inst;
}

inline std::string describe(const FailureInstance& inst) {
  std::ostringstream os;
  os << "A=" << inst.a.str() << " b=" << inst.b.str() << " M=" << inst.m.str() << " C=[";
  const auto d = inst.c.dump();
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "; " : "") << d[i];
  os << "]";
  return os.str();
}

struct QuantifierTally {
  OracleCheck check{"quantifier-reduction"};
  std::size_t failing = 0;
  std::size_t holding = 0;
};

inline QuantifierTally quantifier_reduction(std::size_t instances, std::uint64_t seed) {
  QuantifierTally out;
  Rng rng(seed);
  for (std::size_t t = 0; t < instances; ++t) {
    const FailureInstance inst = random_failure_instance(rng);
    const FailureComparison cmp = compare_failure_cone(inst, rng);
    if (!cmp.complete) {
      ++out.check.skipped;
      continue;
    }
    ++out.check.checked;
    (cmp.reduction_fails ? out.failing : out.holding) += 1;
    if (!cmp.agree())
      out.check.disagree(describe(inst) + ": oracle " + (cmp.oracle_fails ? "fails" : "holds") + ", reduction " +
                         (cmp.reduction_fails ? "fails" : "holds") + (cmp.witness_valid ? "" : ", witness invalid") +
                         (cmp.polar_identity ? "" : ", polar identity broken"));
  }
  return out;
}

inline PolyCone random_cone(Rng& rng, std::size_t max_dim, bool with_eq) {
  const std::size_t d = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_dim)));
  const std::size_t rows = static_cast<std::size_t>(rng.integer(0, 5));
  return PolyCone(d, rng.integer_matrix(rows, d, 3, 30), with_eq && rng.chance(20) ? rng.integer_matrix(1, d, 2, 30) : RatMat());
}

inline OracleCheck polar_roundtrip(std::size_t cones, std::uint64_t seed) {
  OracleCheck out{"polar-roundtrip"};
  Rng rng(seed);
  for (std::size_t t = 0; t < cones; ++t) {
    const PolyCone c = random_cone(rng, 4, true);
    const PolyCone back = c.polar().polar();
    bool ok = back.same_set(c);
    for (int k = 0; k < 10 && ok; ++k) {
      const RatVec x = rng.vector(c.dim(), 3, 3);
      ok = back.contains(x) == c.contains(x);
    }
    // polar generators checked against brute-force rays of the cone
    const RayEnumeration g = enumerate_rays(c.ineq(), c.eq(), c.dim());
    const auto& pg = c.polar().generators();
    for (const auto& y : pg.rays)
      for (const auto& r : g.rays) ok = ok && dot(y, r).sign() <= 0;
    ++out.checked;
    if (!ok) {
      std::string rows;
      for (const auto& line : c.dump()) rows += line + "; ";
      out.disagree("polar(polar(C)) != C for C=[" + rows + "]");
    }
  }
  return out;
}

inline OracleCheck face_difference_containment(std::size_t cones, std::uint64_t seed) {
  OracleCheck out{"face-difference-polar-in-normal-span"};
  Rng rng(seed);
  for (std::size_t t = 0; t < cones; ++t) {
    const PolyCone k = random_cone(rng, 4, false);
    const FaceLattice l(k);
    for (const auto& f1 : l.faces())
      for (const auto& f2 : l.faces()) {
        if (!f2.subset_of(f1)) continue;
        const RatVec v = f2.cone().relative_interior_point();
        const auto basis = span_normal_cone(k, v);
        const PolyCone diff = face_difference(f1, f2);
        const RayEnumeration g = enumerate_rays(diff.ineq(), diff.eq(), k.dim());
        // polar generators of the difference: its defining inequality and equality rows
        bool ok = true;
        for (const auto& r : diff.ineq().row_list()) ok = ok && in_span(basis, r);
        for (const auto& r : diff.eq().row_list()) ok = ok && in_span(basis, r);
        for (const auto& y : diff.polar().generators().rays)
          for (const auto& r : g.rays) ok = ok && dot(y, r).sign() <= 0;
        ++out.checked;
        if (!ok) out.disagree("face pair " + f1.label() + "|" + f2.label() + " at v=" + to_string(v));
      }
  }
  return out;
}

inline OracleCheck orthant_face_counts(std::size_t max_dim) {
  OracleCheck out{"orthant-face-count"};
  for (std::size_t d = 1; d <= max_dim; ++d) {
    const FaceLattice l(PolyCone(d, RatMat::identity(d)));
    ++out.checked;
    if (l.faces().size() != (std::size_t{1} << d))
      out.disagree("orthant of dimension " + std::to_string(d) + " has " + std::to_string(l.faces().size()) + " faces");
  }
  return out;
}

/// Independent test of the directional system at (h, k): v in K, then any
/// eta = sum alpha_i a_i + sum beta_j e_j over active rows with b^T eta matching.
inline std::optional<RatVec> independent_eta(const DirectionalSystem& sys, const RatVec& h, const RatVec& k) {
  const PolyCone& cone = sys.cone();
  const RatVec v = sys.v_of(h, k);
  if (!cone.contains(v)) return std::nullopt;
  const PointData& pd = sys.point_data();
  const RatMat gl = sys.grad_lagrangian();
  const RatVec rhs = -(gl.block(0, 0, pd.n, pd.m) * h + gl.block(0, pd.m, pd.n, pd.n) * k);
  std::vector<RatVec> act, eqs, rays, lin;
  for (std::size_t i = 0; i < cone.num_ineq(); ++i)
    if (dot(cone.ineq().row(i), v).is_zero()) act.push_back(cone.ineq().row(i));
  eqs = cone.eq().row_list();
  const RatMat bt = pd.b.transpose();
  for (const auto& a : act) rays.push_back(bt * a);
  for (const auto& e : eqs) lin.push_back(bt * e);
  const auto comb = conic_combination(rhs, rays, lin);
  if (!comb) return std::nullopt;
  RatVec eta = zeros(pd.s);
  for (std::size_t i = 0; i < act.size(); ++i) eta = eta + comb->first[i] * act[i];
  for (std::size_t j = 0; j < eqs.size(); ++j) eta = eta + comb->second[j] * eqs[j];
  return eta;
}

inline bool in_branch_union(const std::vector<BranchSolution>& branches, const RatVec& k, const RatVec& eta) {
  const RatVec z = concat(concat(k, eta), {Rat(1)});
  for (const auto& b : branches) {
    RayEnumeration g;
    for (const auto& x : b.solution_set.vertices) g.rays.push_back(concat(x, {Rat(1)}));
    for (const auto& r : b.solution_set.rays) g.rays.push_back(concat(r, {Rat(0)}));
    for (const auto& l : b.solution_set.lineality) g.lineality.push_back(concat(l, {Rat(0)}));
    if (in_conic_hull(z, g)) return true;
  }
  return false;
}

/// Grid points k in [-bound, bound]^n with the given denominator that solve
/// the directional system for h, found without the branch solver.
inline std::vector<BranchPoint> grid_solutions(const DirectionalSystem& sys, const RatVec& h, std::int64_t denominator,
                                               std::int64_t bound) {
  const std::size_t n = sys.point_data().n;
  const std::int64_t steps = 2 * bound * denominator;
  std::vector<std::int64_t> idx(n, 0);
  std::vector<BranchPoint> out;
  for (;;) {
    RatVec k;
    for (auto i : idx) k.push_back(Rat(BigInt(i - bound * denominator), BigInt(denominator)));
    if (auto eta = independent_eta(sys, h, k)) out.push_back({k, *eta});
    std::size_t j = 0;
    while (j < n && ++idx[j] > steps) idx[j++] = 0;
    if (j == n) break;
  }
  return out;
}

inline std::string point_str(const RatVec& h, const RatVec& k, const RatVec& eta) {
  return "h=" + to_string(h) + " k=" + to_string(k) + " eta=" + to_string(eta);
}

/// Branch coverage on a full grid plus independent checks of every representative.
inline OracleCheck branch_coverage_grid(const DirectionalSystem& sys, const std::vector<RatVec>& dirs,
                                        std::int64_t denominator, std::int64_t bound) {
  OracleCheck out{"branch-coverage-grid"};
  for (const auto& h : dirs) {
    const auto branches = sys.solve(h);
    for (const auto& p : grid_solutions(sys, h, denominator, bound)) {
      ++out.checked;
      if (!in_branch_union(branches, p.k, p.eta)) out.disagree("grid solution outside the branches: " + point_str(h, p.k, p.eta));
    }
    for (const auto& b : branches)
      for (const auto& p : b.representatives) {
        ++out.checked;
        const auto eta = independent_eta(sys, h, p.k);
        if (!eta || !sys.is_solution(h, p.k, p.eta)) out.disagree("representative does not solve the system: " + point_str(h, p.k, p.eta));
      }
  }
  return out;
}

/// Random grid points instead of the full grid, for problems of any size.
inline OracleCheck branch_coverage_sampled(const DirectionalSystem& sys, const std::vector<RatVec>& dirs, std::size_t samples,
                                           Rng& rng) {
  OracleCheck out{"branch-coverage-sampled"};
  const std::size_t n = sys.point_data().n;
  for (const auto& h : dirs) {
    const auto branches = sys.solve(h);
    for (std::size_t t = 0; t < samples; ++t) {
      RatVec k;
      for (std::size_t i = 0; i < n; ++i) k.push_back(Rat(BigInt(rng.integer(-112, 112)), BigInt(56)));
      const auto eta = independent_eta(sys, h, k);
      if (!eta) {
        ++out.skipped;
        continue;
      }
      ++out.checked;
      if (!in_branch_union(branches, k, *eta)) out.disagree("sampled solution outside the branches: " + point_str(h, k, *eta));
    }
    for (const auto& b : branches)
      for (const auto& p : b.representatives) {
        ++out.checked;
        if (!independent_eta(sys, h, p.k) || !sys.is_solution(h, p.k, p.eta))
          out.disagree("representative does not solve the system: " + point_str(h, p.k, p.eta));
        if (b.eta_unique) {
          const auto basis = span_normal_cone(sys.cone(), sys.v_of(h, p.k));
          if (!basis.empty() && rank(sys.point_data().b.transpose() * RatMat::from_columns(basis, sys.point_data().s)) != basis.size())
            out.disagree("eta not unique at " + point_str(h, p.k, p.eta));
        }
      }
  }
  return out;
}

/// Per face pair: grid search for a nontrivial solution of the non-directional
/// system, compared with the exact search of the verifier.
inline OracleCheck nondirectional_pairs(const Verifier& ver, std::size_t samples, Rng& rng) {
  OracleCheck out{"nondirectional-face-pairs"};
  const DirectionalSystem& sys = ver.system();
  const PointData& pd = sys.point_data();
  const RatMat gl = sys.grad_lagrangian();
  const RatMat l2t = gl.block(0, pd.m, pd.n, pd.n).transpose(), l1t = gl.block(0, 0, pd.n, pd.m).transpose();
  const RatMat q2t = pd.grad_qtilde_x().transpose(), q1t = pd.grad_qtilde_p().transpose();
  for (const auto& pair : ver.all_face_pairs()) {
    const PolyCone c = face_difference(pair.first, pair.second);
    const auto exact = ver.coderivative_solution({pair}, WitnessKind::NondirectionalSolution);
    std::vector<RatVec> rays, lin;
    for (const auto& r : c.ineq().row_list()) rays.push_back(q2t * r);
    for (const auto& l : c.eq().row_list()) lin.push_back(q2t * l);
    std::optional<RatVec> found;
    for (std::size_t t = 0; t < samples && !found; ++t) {
      RatVec v;
      for (std::size_t i = 0; i < pd.n; ++i) v.push_back(Rat(BigInt(rng.integer(-16, 16)), BigInt(rng.integer(1, 8))));
      if (is_zero(v) || !c.contains(-(pd.b * v))) continue;
      if (conic_combination(-(l2t * v), rays, lin)) found = v;
    }
    // v = 0 with a nonzero parameter part: brute-force rays of {w in C°, grad_x q~^T w = 0}
    bool param_part = false;
    const std::size_t a = c.ineq().rows(), e = c.eq().rows();
    if (a + e > 0) {
      const RatMat lift = c.ineq().transpose().hstack(c.eq().transpose());
      RatMat g(a, a + e);
      for (std::size_t i = 0; i < a; ++i) g(i, i) = -1;
      const RayEnumeration z = enumerate_rays(g, q2t * lift, a + e);
      for (const auto& r : z.rays) param_part = param_part || !is_zero(q1t * (lift * r));
      for (const auto& l : z.lineality) param_part = param_part || !is_zero(q1t * (lift * l));
    }
    ++out.checked;
    const std::string label = pair.first.label() + "|" + pair.second.label();
    if ((found || param_part) && !exact)
      out.disagree("pair " + label + ": sampling finds a nontrivial solution" + (found ? " v=" + to_string(*found) : std::string()) +
                   " but the exact search does not");
    if (exact) {
      const RatVec lhs = concat(exact->pstar, zeros(pd.n));
      const RatVec rhs = gl.transpose() * exact->v + pd.grad_qtilde.transpose() * exact->w;
      std::vector<RatVec> pr = c.ineq().row_list(), pl = c.eq().row_list();
      const bool ok = lhs == rhs && c.contains(-(pd.b * exact->v)) && conic_combination(exact->w, pr, pl).has_value() &&
                      !(is_zero(exact->v) && is_zero(exact->pstar));
      if (!ok) out.disagree("pair " + label + ": exact witness fails independent validation");
    }
  }
  return out;
}

/// Random problem text with reference point 0, f(0) = 0 and every set row
/// active at q~ = 0, so the base multiplier is 0 whenever (A) holds.
inline std::string random_problem_text(Rng& rng) {
  const std::size_t m = static_cast<std::size_t>(rng.integer(1, 2)), n = static_cast<std::size_t>(rng.integer(1, 2)),
                    s = static_cast<std::size_t>(rng.integer(1, 2));
  auto linear = [&](const std::vector<std::string>& vars) {
    std::string e;
    for (const auto& v : vars) {
      const std::int64_t c = rng.chance(35) ? 0 : rng.integer(-2, 2);
      if (c != 0) e += (e.empty() ? "" : " + ") + std::string("(") + std::to_string(c) + ")*" + v;
    }
    return e.empty() ? std::string("0") : e;
  };
  std::vector<std::string> px, pxy;
  for (std::size_t i = 1; i <= m; ++i) px.push_back("p" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) px.push_back("x" + std::to_string(i));
  pxy = px;
  for (std::size_t i = 1; i <= n; ++i) pxy.push_back("y" + std::to_string(i));
  std::ostringstream t;
  t << "[problem] m=" << m << " n=" << n << " s=" << s << "\n[functions]\n";
  for (std::size_t i = 1; i <= n; ++i) {
    std::string f = linear(px);
    if (rng.chance(30)) f += " + (" + std::to_string(rng.integer(-1, 1)) + ")*x" + std::to_string(rng.integer(1, static_cast<std::int64_t>(n))) + "^2";
    t << "f" << i << " = \"" << f << "\"\n";
  }
  for (std::size_t j = 1; j <= s; ++j) {
    std::string q = linear(pxy);
    if (rng.chance(25)) q += " + x1*y1";
    t << "q" << j << " = \"" << q << "\"\n";
  }
  t << "[set]\n";
  const std::size_t rows = static_cast<std::size_t>(rng.integer(0, 3));
  for (std::size_t r = 0; r < rows; ++r) {
    t << "ineq:";
    for (std::size_t j = 0; j < s; ++j) t << " " << rng.integer(-1, 1);
    t << " <= 0\n";
  }
  t << "[reference]\np =";
  for (std::size_t i = 0; i < m; ++i) t << " 0";
  t << "\nx =";
  for (std::size_t i = 0; i < n; ++i) t << " 0";
  t << "\n";
  return t.str();
}

/// All sampling cross-checks for one problem. `samples` must be positive.
inline OracleReport run_oracle(const ProblemSpec& spec, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("oracle needs a positive sample count");
  OracleReport rep;
  Rng rng(seed);
  rep.checks.push_back(polar_roundtrip(std::max<std::size_t>(1, samples / 10), rng.next()));
  rep.checks.push_back(face_difference_containment(std::max<std::size_t>(1, samples / 20), rng.next()));
  rep.checks.push_back(orthant_face_counts(4));
  rep.checks.push_back(quantifier_reduction(std::max<std::size_t>(1, samples / 10), rng.next()).check);

  const PointData pd = point_data(spec);
  const auto assumption = check_assumption_A(pd, spec.D);
  if (assumption.result.status != Status::Holds) return rep;
  const RatVec lam = solve_base_multiplier(pd, spec.D, pd.f_val);
  const PolyCone k = critical_cone(tangent_normal(spec.D, pd.qtilde_val).tangent, lam).cone;
  auto sys = std::make_shared<const DirectionalSystem>(pd, k, lam);
  const Verifier ver(sys);
  bool sampled = false;
  const auto dirs = direction_set(spec.m, {}, sampled);
  rep.checks.push_back(branch_coverage_sampled(*sys, dirs, samples, rng));

  OracleCheck pairs{"problem-face-pairs"};
  for (const auto& h : dirs)
    for (const auto& b : sys->solve(h))
      for (const auto& p : b.representatives)
        for (const auto& [f1, f2] : admissible_face_pairs(sys->lattice(), sys->v_of(h, p.k), p.eta)) {
          FailureInstance inst{sys->grad_lagrangian().block(0, pd.m, pd.n, pd.n), pd.b, pd.grad_qtilde_x(), face_difference(f1, f2)};
          const FailureComparison cmp = compare_failure_cone(inst, rng);
          if (!cmp.complete) {
            ++pairs.skipped;
            continue;
          }
          ++pairs.checked;
          if (!cmp.agree()) pairs.disagree("pair " + f1.label() + "|" + f2.label() + " at " + point_str(h, p.k, p.eta));
        }
  rep.checks.push_back(std::move(pairs));
  rep.checks.push_back(nondirectional_pairs(ver, samples, rng));
  return rep;
}

}  // namespace oracle
}  // namespace aubin
