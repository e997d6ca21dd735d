#pragma once

#include "aubin/branches.hpp"
#include "aubin/cones.hpp"
#include "aubin/problem.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace aubin {

enum class Status { Holds, Fails, Indeterminate, NotEstablished };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Holds: return "holds";
    case Status::Fails: return "fails";
    case Status::Indeterminate: return "indeterminate";
    case Status::NotEstablished: return "not-established";
  }
  return "?";
}

enum class WitnessKind {
  AViolation,
  ExistenceGap,
  Thm6iViolation,
  Thm6iiViolation,
  Thm5Violation,
  Cor1Violation,
  SubregGap,
  NondirectionalSolution,
  CoderivativeViolation,
};

inline std::string to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::AViolation: return "A-violation";
    case WitnessKind::ExistenceGap: return "existence-gap";
    case WitnessKind::Thm6iViolation: return "thm6i-violation";
    case WitnessKind::Thm6iiViolation: return "thm6ii-violation";
    case WitnessKind::Thm5Violation: return "thm5-violation";
    case WitnessKind::Cor1Violation: return "cor1-violation";
    case WitnessKind::SubregGap: return "subreg-gap";
    case WitnessKind::NondirectionalSolution: return "nondirectional-solution";
    case WitnessKind::CoderivativeViolation: return "coderivative-violation";
  }
  return "?";
}

/// Certificate for a failed condition. Which vectors are filled depends on
/// the kind; `f1`/`f2` are active sets of faces of the critical cone.
struct Witness {
  WitnessKind kind = WitnessKind::AViolation;
  RatVec h, k, eta;
  bool has_pair = false;
  std::vector<std::size_t> f1, f2;
  RatVec lam;
  RatVec mu;
  RatVec w;
  RatVec v;
  RatVec pstar;
};

struct ConditionResult {
  Status status = Status::Holds;
  std::optional<Witness> witness;
  std::string reason;

  static ConditionResult holds() { return {}; }
  static ConditionResult fails(Witness w) { return {Status::Fails, std::move(w), {}}; }
  static ConditionResult with(Status s, std::string why) { return {s, std::nullopt, std::move(why)}; }
};

class PipelineError : public std::runtime_error {
 public:
  enum class Kind { InfeasibleMultiplier, Internal };
  PipelineError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

/// Basis of span N_D(u): active inequality rows and equality rows of D.
inline std::vector<RatVec> normal_span_basis(const HPolyhedron& d, const RatVec& u) {
  std::vector<RatVec> rows = d.eq().row_list();
  for (auto i : d.active_set(u)) rows.push_back(d.ineq().row(i));
  return span_basis(rows, d.dim());
}

/// Generators mu = C_in^T alpha + C_eq^T beta (alpha >= 0) of the cone
/// {mu in C° | G^T mu = 0}, returned with zero images dropped.
inline std::vector<RatVec> polar_kernel_generators(const PolyCone& c, const RatMat& g) {
  const std::size_t a = c.ineq().rows(), e = c.eq().rows(), dim = a + e;
  if (dim == 0) return {};
  const RatMat lift = c.ineq().transpose().hstack(c.eq().transpose());
  RatMat ineq(a, dim);
  for (std::size_t i = 0; i < a; ++i) ineq(i, i) = -1;
  const Generators gens = cone_generators(ineq, g.transpose() * lift, dim);
  std::vector<RatVec> out;
  auto keep = [&](const RatVec& z) {
    RatVec mu = lift * z;
    if (!is_zero(mu)) out.push_back(std::move(mu));
  };
  for (const auto& r : gens.rays) keep(r);
  for (const auto& l : gens.lineality) {
    keep(l);
    keep(-l);
  }
  return out;
}

inline bool in_polar(const PolyCone& c, const RatVec& mu) { return c.polar().contains(mu); }

}  // namespace detail

/// Assumption (A): b^T lam = 0 with lam in span N_D(q~) forces lam = 0.
struct AssumptionResult {
  ConditionResult result;
  std::vector<RatVec> normal_span;
  bool nondegenerate = true;  // b R^n + lin T_D(q~) = R^s
};

inline AssumptionResult check_assumption_A(const PointData& pd, const HPolyhedron& d) {
  AssumptionResult out;
  out.normal_span = detail::normal_span_basis(d, pd.qtilde_val);
  const auto lin_tangent = orthogonal_complement(out.normal_span, pd.s);
  std::vector<RatVec> cols;
  for (std::size_t j = 0; j < pd.n; ++j) cols.push_back(pd.b.col(j));
  cols.insert(cols.end(), lin_tangent.begin(), lin_tangent.end());
  out.nondegenerate = rank_of(cols, pd.s) == pd.s;
  if (out.normal_span.empty()) return out;
  const RatMat basis = RatMat::from_columns(out.normal_span, pd.s);
  const auto kernel = nullspace(pd.b.transpose() * basis);
  if (kernel.empty()) {
    if (!out.nondegenerate) throw PipelineError(PipelineError::Kind::Internal, "assumption (A) and nondegeneracy disagree");
    return out;
  }
  Witness w;
  w.kind = WitnessKind::AViolation;
  w.lam = primitive(basis * kernel.front());
  out.result = ConditionResult::fails(std::move(w));
  if (out.nondegenerate) throw PipelineError(PipelineError::Kind::Internal, "assumption (A) and nondegeneracy disagree");
  return out;
}

/// The unique lam in N_D(q~) with f + b^T lam = 0.
inline RatVec solve_base_multiplier(const PointData& pd, const HPolyhedron& d, const RatVec& f_val) {
  const auto act = d.active_set(pd.qtilde_val);
  const std::size_t a = act.size(), e = d.eq().rows(), dim = a + e;
  const RatMat lift = d.ineq().select_rows(act).transpose().hstack(d.eq().transpose());
  RatMat ineq(a, dim);
  for (std::size_t i = 0; i < a; ++i) ineq(i, i) = -1;
  const RatMat eq = pd.b.transpose() * lift;
  if (dim == 0) {
    if (!is_zero(f_val))
      throw PipelineError(PipelineError::Kind::InfeasibleMultiplier,
                          "reference point does not solve the generalized equation: f(p,x) = " + to_string(f_val) +
                              " is nonzero and no constraint is active");
    return zeros(pd.s);
  }
  const auto sol = polyhedron_generators(ineq, zeros(a), eq, -f_val, dim);
  if (sol.empty())
    throw PipelineError(PipelineError::Kind::InfeasibleMultiplier,
                        "reference point does not solve the generalized equation: no lam in N_D(q~(p,x)) with f + b^T lam = 0");
  std::vector<RatVec> lams;
  for (const auto& x : sol.vertices) lams.push_back(lift * x);
  for (const auto& r : sol.rays)
    if (!is_zero(lift * r)) throw PipelineError(PipelineError::Kind::Internal, "multiplier not unique");
  for (const auto& l : sol.lineality)
    if (!is_zero(lift * l)) throw PipelineError(PipelineError::Kind::Internal, "multiplier not unique");
  for (const auto& l : lams)
    if (l != lams.front()) throw PipelineError(PipelineError::Kind::Internal, "multiplier not unique");
  return lams.front();
}

/// Condition results for one solution (h, k, eta) of the directional system.
struct PointConditions {
  std::vector<FacePair> pairs;
  ConditionResult span_injective;          // no mu != 0 in sp N_K(v) with grad_x q~^T mu = 0
  ConditionResult face_positivity;         // for all w != 0, b w in C: exists w~, grad_x q~ w~ in C, w^T A w~ > 0
  ConditionResult parameter_annihilation;  // mu in C°, grad_x q~^T mu = 0 => grad_p q~^T mu = 0
  ConditionResult face_injective;          // mu in C°, grad_x q~^T mu = 0 => mu = 0
  ConditionResult subregular;              // mu in C°, grad q~^T mu = 0 => mu = 0
  ConditionResult coderivative;            // the directional coderivative implication itself
};

class Verifier {
 public:
  explicit Verifier(std::shared_ptr<const DirectionalSystem> sys) : sys_(std::move(sys)) {}

  const DirectionalSystem& system() const { return *sys_; }

  ConditionResult span_injective(const RatVec& h, const RatVec& k, const RatVec& eta) const {
    const PointData& pd = sys_->point_data();
    const auto basis = span_normal_cone(sys_->cone(), sys_->v_of(h, k));
    if (basis.empty()) return ConditionResult::holds();
    const RatMat bmat = RatMat::from_columns(basis, pd.s);
    const auto kernel = nullspace(pd.grad_qtilde_x().transpose() * bmat);
    if (kernel.empty()) return ConditionResult::holds();
    Witness w = context(WitnessKind::Thm6iViolation, h, k, eta);
    w.mu = primitive(bmat * kernel.front());
    return ConditionResult::fails(std::move(w));
  }

  ConditionResult face_positivity(const RatVec& h, const RatVec& k, const RatVec& eta,
                                  const std::vector<FacePair>& pairs) const {
    for (const auto& [f1, f2] : pairs) {
      const PolyCone c = face_difference(f1, f2);
      if (auto w = failure_cone_witness(c)) {
        Witness out = context(WitnessKind::Thm6iiViolation, h, k, eta);
        set_pair(out, f1, f2);
        out.w = w->first;
        out.mu = w->second;
        return ConditionResult::fails(std::move(out));
      }
    }
    return ConditionResult::holds();
  }

  /// Nonzero w with b w in C and A^T w = M^T mu for some mu in C°, where
  /// A = grad_x L and M = grad_x q~; nullopt if none exists.
  std::optional<std::pair<RatVec, RatVec>> failure_cone_witness(const PolyCone& c) const {
    const PointData& pd = sys_->point_data();
    const std::size_t n = pd.n, a = c.ineq().rows(), e = c.eq().rows(), dim = n + a + e;
    const RatMat lift = c.ineq().transpose().hstack(c.eq().transpose());
    const RatMat A = sys_->grad_lagrangian().block(0, pd.m, n, n);
    const RatMat M = pd.grad_qtilde_x();
    RatMat ineq(c.ineq().rows() + a, dim);
    const RatMat cb = c.ineq() * pd.b;
    for (std::size_t i = 0; i < cb.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) ineq(i, j) = cb(i, j);
    for (std::size_t i = 0; i < a; ++i) ineq(cb.rows() + i, n + i) = -1;
    const RatMat eb = c.eq() * pd.b;
    const RatMat mt = M.transpose() * lift;
    RatMat eq(eb.rows() + n, dim);
    for (std::size_t i = 0; i < eb.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) eq(i, j) = eb(i, j);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) eq(eb.rows() + i, j) = A(j, i);
      for (std::size_t j = 0; j < a + e; ++j) eq(eb.rows() + i, n + j) = -mt(i, j);
    }
    const Generators g = cone_generators(ineq, eq, dim);
    auto pick = [&](const RatVec& z) -> std::optional<std::pair<RatVec, RatVec>> {
      RatVec w = slice(z, 0, n);
      if (is_zero(w)) return std::nullopt;
      return std::make_pair(std::move(w), lift.cols() ? lift * slice(z, n, a + e) : zeros(pd.s));
    };
    for (const auto& r : g.rays)
      if (auto p = pick(r)) return p;
    for (const auto& l : g.lineality)
      if (auto p = pick(l)) return p;
    return std::nullopt;
  }

  ConditionResult parameter_annihilation(const RatVec& h, const RatVec& k, const RatVec& eta,
                                         const std::vector<FacePair>& pairs) const {
    const PointData& pd = sys_->point_data();
    for (const auto& [f1, f2] : pairs)
      for (const auto& mu : detail::polar_kernel_generators(face_difference(f1, f2), pd.grad_qtilde_x()))
        if (!is_zero(pd.grad_qtilde_p().transpose() * mu)) {
          Witness w = context(WitnessKind::Thm5Violation, h, k, eta);
          set_pair(w, f1, f2);
          w.mu = primitive(mu);
          return ConditionResult::fails(std::move(w));
        }
    return ConditionResult::holds();
  }

  ConditionResult face_injective(const RatVec& h, const RatVec& k, const RatVec& eta,
                                 const std::vector<FacePair>& pairs) const {
    return polar_kernel_trivial(h, k, eta, pairs, sys_->point_data().grad_qtilde_x(), WitnessKind::Cor1Violation,
                                Status::Fails);
  }

  /// Sufficient test only: a nonzero mu leaves subregularity not established.
  ConditionResult subregular(const RatVec& h, const RatVec& k, const RatVec& eta,
                             const std::vector<FacePair>& pairs) const {
    return polar_kernel_trivial(h, k, eta, pairs, sys_->point_data().grad_qtilde, WitnessKind::SubregGap,
                                Status::NotEstablished);
  }

  /// Searches the union of C° x C over `pairs` for (w, -b v) with
  /// (p*, 0) = grad L^T v + grad q~^T w and (v, p*) != 0.
  std::optional<Witness> coderivative_solution(const std::vector<FacePair>& pairs, WitnessKind kind) const {
    const PointData& pd = sys_->point_data();
    const std::size_t n = pd.n, m = pd.m;
    const RatMat gl = sys_->grad_lagrangian();
    const RatMat l1t = gl.block(0, 0, n, m).transpose(), l2t = gl.block(0, m, n, n).transpose();
    const RatMat q1t = pd.grad_qtilde_p().transpose(), q2t = pd.grad_qtilde_x().transpose();
    for (const auto& [f1, f2] : pairs) {
      const PolyCone c = face_difference(f1, f2);
      const std::size_t a = c.ineq().rows(), e = c.eq().rows(), dim = n + a + e;
      const RatMat lift = c.ineq().transpose().hstack(c.eq().transpose());
      const RatMat nb = (c.ineq() * pd.b).scaled(-1);
      RatMat ineq(nb.rows() + a, dim);
      for (std::size_t i = 0; i < nb.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) ineq(i, j) = nb(i, j);
      for (std::size_t i = 0; i < a; ++i) ineq(nb.rows() + i, n + i) = -1;
      const RatMat eb = c.eq() * pd.b;
      const RatMat qw = q2t * lift;
      RatMat eq(eb.rows() + n, dim);
      for (std::size_t i = 0; i < eb.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) eq(i, j) = eb(i, j);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) eq(eb.rows() + i, j) = l2t(i, j);
        for (std::size_t j = 0; j < a + e; ++j) eq(eb.rows() + i, n + j) = qw(i, j);
      }
      const Generators g = cone_generators(ineq, eq, dim);
      std::vector<RatVec> dirs = g.rays;
      dirs.insert(dirs.end(), g.lineality.begin(), g.lineality.end());
      for (const auto& z : dirs) {
        const RatVec v = slice(z, 0, n);
        const RatVec w = lift.cols() ? lift * slice(z, n, a + e) : zeros(pd.s);
        const RatVec pstar = l1t * v + q1t * w;
        if (is_zero(v) && is_zero(pstar)) continue;
        Witness out;
        out.kind = kind;
        set_pair(out, f1, f2);
        out.v = v;
        out.w = w;
        out.pstar = pstar;
        return out;
      }
    }
    return std::nullopt;
  }

  ConditionResult coderivative(const RatVec& h, const RatVec& k, const RatVec& eta,
                               const std::vector<FacePair>& pairs) const {
    auto w = coderivative_solution(pairs, WitnessKind::CoderivativeViolation);
    if (!w) return ConditionResult::holds();
    w->h = h;
    w->k = k;
    w->eta = eta;
    return ConditionResult::fails(std::move(*w));
  }

  /// Every face pair F2 ⊆ F1 of the critical cone, without directional restriction.
  std::vector<FacePair> all_face_pairs() const {
    std::vector<FacePair> out;
    const auto& faces = sys_->lattice().faces();
    for (const auto& f1 : faces)
      for (const auto& f2 : faces)
        if (f2.subset_of(f1)) out.emplace_back(f1, f2);
    return out;
  }

  ConditionResult nondirectional() const {
    auto w = coderivative_solution(all_face_pairs(), WitnessKind::NondirectionalSolution);
    if (!w) return ConditionResult::holds();
    return ConditionResult::fails(std::move(*w));
  }

  PointConditions evaluate(const RatVec& h, const RatVec& k, const RatVec& eta) const {
    PointConditions out;
    out.pairs = admissible_face_pairs(sys_->lattice(), sys_->v_of(h, k), eta);
    out.span_injective = span_injective(h, k, eta);
    out.face_positivity = face_positivity(h, k, eta, out.pairs);
    out.parameter_annihilation = parameter_annihilation(h, k, eta, out.pairs);
    out.face_injective = face_injective(h, k, eta, out.pairs);
    out.subregular = subregular(h, k, eta, out.pairs);
    out.coderivative = coderivative(h, k, eta, out.pairs);
    return out;
  }

  /// Exact re-verification of a witness against its defining relations.
  bool recheck(const Witness& w, const HPolyhedron& d) const {
    const PointData& pd = sys_->point_data();
    try {
      switch (w.kind) {
        case WitnessKind::AViolation: {
          if (is_zero(w.lam)) return false;
          return in_span(detail::normal_span_basis(d, pd.qtilde_val), w.lam) && is_zero(pd.b.transpose() * w.lam);
        }
        case WitnessKind::ExistenceGap:
          return !is_zero(w.h) && sys_->solve(w.h).empty();
        case WitnessKind::Thm6iViolation: {
          if (!sys_->is_solution(w.h, w.k, w.eta) || is_zero(w.mu)) return false;
          return in_span(span_normal_cone(sys_->cone(), sys_->v_of(w.h, w.k)), w.mu) &&
                 is_zero(pd.grad_qtilde_x().transpose() * w.mu);
        }
        case WitnessKind::Thm6iiViolation: {
          const auto c = pair_difference(w);
          if (!c || is_zero(w.w)) return false;
          const RatMat A = sys_->grad_lagrangian().block(0, pd.m, pd.n, pd.n);
          return c->contains(pd.b * w.w) && detail::in_polar(*c, w.mu) &&
                 A.transpose() * w.w == pd.grad_qtilde_x().transpose() * w.mu;
        }
        case WitnessKind::Thm5Violation: {
          const auto c = pair_difference(w);
          return c && detail::in_polar(*c, w.mu) && is_zero(pd.grad_qtilde_x().transpose() * w.mu) &&
                 !is_zero(pd.grad_qtilde_p().transpose() * w.mu);
        }
        case WitnessKind::Cor1Violation:
        case WitnessKind::SubregGap: {
          const auto c = pair_difference(w);
          const RatMat& g = w.kind == WitnessKind::Cor1Violation ? pd.grad_qtilde_x() : pd.grad_qtilde;
          return c && !is_zero(w.mu) && detail::in_polar(*c, w.mu) && is_zero(g.transpose() * w.mu);
        }
        case WitnessKind::NondirectionalSolution:
        case WitnessKind::CoderivativeViolation: {
          if (!w.has_pair) return false;
          if (w.kind == WitnessKind::CoderivativeViolation && !pair_admissible(w)) return false;
          const auto c = pair_difference(w);
          if (!c || (is_zero(w.v) && is_zero(w.pstar))) return false;
          const RatVec lhs = concat(w.pstar, zeros(pd.n));
          const RatVec rhs = sys_->grad_lagrangian().transpose() * w.v + pd.grad_qtilde.transpose() * w.w;
          return lhs == rhs && detail::in_polar(*c, w.w) && c->contains(-(pd.b * w.v));
        }
      }
    } catch (const std::exception&) {
      return false;
    }
    return false;
  }

  /// Whether some face pair puts (w, sign * b v) into C° x C.
  bool graph_normal_member(const RatVec& v, const RatVec& w, int sign) const {
    const RatVec bv = Rat(sign) * (sys_->point_data().b * v);
    for (const auto& [f1, f2] : all_face_pairs()) {
      const PolyCone c = face_difference(f1, f2);
      if (c.contains(bv) && detail::in_polar(c, w)) return true;
    }
    return false;
  }

 private:
  static Witness context(WitnessKind kind, const RatVec& h, const RatVec& k, const RatVec& eta) {
    Witness w;
    w.kind = kind;
    w.h = h;
    w.k = k;
    w.eta = eta;
    return w;
  }

  static void set_pair(Witness& w, const Face& f1, const Face& f2) {
    w.has_pair = true;
    w.f1 = f1.active();
    w.f2 = f2.active();
  }

  std::optional<Face> find_face(const std::vector<std::size_t>& active) const {
    for (const auto& f : sys_->lattice().faces())
      if (f.active() == active) return f;
    return std::nullopt;
  }

  std::optional<PolyCone> pair_difference(const Witness& w) const {
    if (!w.has_pair) return std::nullopt;
    auto f1 = find_face(w.f1), f2 = find_face(w.f2);
    if (!f1 || !f2 || !f2->subset_of(*f1)) return std::nullopt;
    return face_difference(*f1, *f2);
  }

  bool pair_admissible(const Witness& w) const {
    if (!sys_->is_solution(w.h, w.k, w.eta)) return false;
    for (const auto& [f1, f2] : admissible_face_pairs(sys_->lattice(), sys_->v_of(w.h, w.k), w.eta))
      if (f1.active() == w.f1 && f2.active() == w.f2) return true;
    return false;
  }

  ConditionResult polar_kernel_trivial(const RatVec& h, const RatVec& k, const RatVec& eta,
                                       const std::vector<FacePair>& pairs, const RatMat& g, WitnessKind kind,
                                       Status failure) const {
    for (const auto& [f1, f2] : pairs) {
      const auto mus = detail::polar_kernel_generators(face_difference(f1, f2), g);
      if (mus.empty()) continue;
      Witness w = context(kind, h, k, eta);
      set_pair(w, f1, f2);
      w.mu = primitive(mus.front());
      return {failure, std::move(w), {}};
    }
    return ConditionResult::holds();
  }

  std::shared_ptr<const DirectionalSystem> sys_;
};

enum class Route { Auto, Thm5, Thm6, Cor1 };

inline std::string to_string(Route r) {
  switch (r) {
    case Route::Auto: return "auto";
    case Route::Thm5: return "thm5";
    case Route::Thm6: return "thm6";
    case Route::Cor1: return "cor1";
  }
  return "?";
}

inline std::optional<Route> parse_route(const std::string& s) {
  for (Route r : {Route::Auto, Route::Thm5, Route::Thm6, Route::Cor1})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

struct VerifyOptions {
  Route route = Route::Auto;
  std::vector<RatVec> directions;
};

struct BranchReport {
  RatVec h;
  std::string face;
  bool continuum = false;
  bool eta_unique = true;
  std::vector<BranchPoint> points;
  std::vector<std::string> pairs;  // "F1|F2" labels at the first nonzero representative
  bool trivial = false;            // only (h,k) = 0
  ConditionResult span_injective, face_positivity, parameter_annihilation, face_injective, subregular, coderivative;
};

struct DirectionReport {
  RatVec h;
  std::vector<BranchReport> branches;
  DerivativeValues ds;
};

struct RouteResult {
  Route route = Route::Thm6;
  Status status = Status::Holds;
  std::string reason;
};

struct Verdict {
  std::size_t m = 0, n = 0, s = 0;
  AssumptionResult assumption;
  std::optional<RatVec> lam;
  std::optional<PolyCone> critical;
  ConditionResult existence;
  bool sampled_directions = false;
  std::vector<DirectionReport> directions;
  std::vector<RouteResult> routes;
  Route requested = Route::Auto;
  std::optional<Route> used;
  bool established = false;
  std::optional<ConditionResult> nondirectional;
  std::vector<std::string> warnings;
  std::string fatal;
};

/// Directions examined: m = 0 -> {()}, m = 1 -> {1, -1, 0} (exact by
/// homogeneity), m >= 2 -> user list, a grid on the boundary of the unit cube, and 0.
inline std::vector<RatVec> direction_set(std::size_t m, const std::vector<RatVec>& user, bool& sampled) {
  sampled = m >= 2;
  std::vector<RatVec> out;
  auto add = [&](const RatVec& h) {
    if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
  };
  if (m == 0) {
    add({});
    return out;
  }
  if (m == 1) {
    add({1});
    add({-1});
  }
  for (const auto& h : user) add(h);
  if (m >= 2) {
    const std::vector<Rat> levels = m <= 3 ? std::vector<Rat>{-1, Rat(-1, 2), 0, Rat(1, 2), 1} : std::vector<Rat>{-1, 0, 1};
    std::vector<std::size_t> idx(m, 0);
    for (;;) {
      RatVec h;
      bool boundary = false;
      for (auto i : idx) {
        h.push_back(levels[i]);
        boundary = boundary || abs(levels[i]) == Rat(1);
      }
      if (boundary) add(h);
      std::size_t j = 0;
      while (j < m && ++idx[j] == levels.size()) idx[j++] = 0;
      if (j == m) break;
    }
  }
  add(zeros(m));
  return out;
}

namespace detail {

inline std::string pair_label(const FacePair& p) { return p.first.label() + "|" + p.second.label(); }

/// Branch-level status: any exact failure wins; otherwise all representatives
/// must agree and see the same face pairs.
inline ConditionResult merge_results(const std::vector<ConditionResult>& rs, bool pairs_constant) {
  if (rs.empty()) return ConditionResult::holds();
  for (const auto& r : rs)
    if (r.status == Status::Fails) return r;
  for (const auto& r : rs)
    if (r.status != rs.front().status) return ConditionResult::with(Status::Indeterminate, "results differ across branch representatives");
  if (!pairs_constant && rs.front().status == Status::Holds)
    return ConditionResult::with(Status::Indeterminate, "admissible face pairs vary over the branch");
  return rs.front();
}

inline Status route_status(const std::vector<const ConditionResult*>& parts, std::string& reason) {
  Status st = Status::Holds;
  for (const auto* p : parts) {
    if (p->status == Status::Fails) {
      reason = "a required condition fails";
      return Status::Fails;
    }
    if (p->status != Status::Holds && st == Status::Holds) {
      st = p->status;
      reason = p->reason.empty() ? "a required condition is " + to_string(p->status) : p->reason;
    }
  }
  return st;
}

}  // namespace detail

inline BranchReport analyse_branch(const Verifier& ver, const BranchSolution& b) {
  BranchReport rep;
  rep.h = b.h;
  rep.face = b.face.label();
  rep.continuum = b.continuum;
  rep.eta_unique = b.eta_unique;
  rep.points = b.representatives;
  std::vector<PointConditions> checks;
  std::optional<std::vector<std::string>> first_pairs;
  bool pairs_constant = true;
  for (const auto& p : b.representatives) {
    if (is_zero(b.h) && is_zero(p.k)) continue;
    PointConditions c = ver.evaluate(b.h, p.k, p.eta);
    std::vector<std::string> labels;
    for (const auto& fp : c.pairs) labels.push_back(detail::pair_label(fp));
    if (!first_pairs) first_pairs = labels;
    else if (*first_pairs != labels) pairs_constant = false;
    checks.push_back(std::move(c));
  }
  rep.trivial = checks.empty();
  if (first_pairs) rep.pairs = *first_pairs;
  auto merge = [&](ConditionResult PointConditions::*field) {
    std::vector<ConditionResult> rs;
    for (const auto& c : checks) rs.push_back(c.*field);
    return detail::merge_results(rs, pairs_constant);
  };
  rep.span_injective = merge(&PointConditions::span_injective);
  rep.face_positivity = merge(&PointConditions::face_positivity);
  rep.parameter_annihilation = merge(&PointConditions::parameter_annihilation);
  rep.face_injective = merge(&PointConditions::face_injective);
  rep.subregular = merge(&PointConditions::subregular);
  rep.coderivative = merge(&PointConditions::coderivative);
  return rep;
}

/// Full pipeline from a parsed problem to the aggregated verdict.
inline Verdict verdict(const ProblemSpec& spec, const VerifyOptions& opts = {}) {
  Verdict out;
  out.m = spec.m;
  out.n = spec.n;
  out.s = spec.s;
  out.requested = opts.route;
  for (const auto& h : opts.directions)
    if (h.size() != spec.m) throw std::invalid_argument("direction " + to_string(h) + " does not have dimension m=" + std::to_string(spec.m));

  const PointData pd = point_data(spec);
  out.assumption = check_assumption_A(pd, spec.D);
  if (out.assumption.result.status != Status::Holds) {
    out.fatal = "assumption (A) is violated";
    return out;
  }
  out.lam = solve_base_multiplier(pd, spec.D, pd.f_val);
  const TangentNormal tn = tangent_normal(spec.D, pd.qtilde_val);
  out.critical = critical_cone(tn.tangent, *out.lam).cone;
  auto sys = std::make_shared<const DirectionalSystem>(pd, *out.critical, *out.lam);
  const Verifier ver(sys);

  const auto dirs = direction_set(spec.m, opts.directions, out.sampled_directions);
  for (const auto& h : dirs) {
    DirectionReport dr;
    dr.h = h;
    const auto branches = sys->solve(h);
    for (const auto& b : branches) dr.branches.push_back(analyse_branch(ver, b));
    for (const auto& b : branches) {
      dr.ds.continuum = dr.ds.continuum || b.continuum;
      for (const auto& r : b.representatives)
        if (std::find(dr.ds.k.begin(), dr.ds.k.end(), r.k) == dr.ds.k.end()) dr.ds.k.push_back(r.k);
    }
    if (branches.empty() && out.existence.status == Status::Holds) {
      Witness w;
      w.kind = WitnessKind::ExistenceGap;
      w.h = h;
      out.existence = ConditionResult::fails(std::move(w));
    }
    for (const auto& b : dr.branches)
      if (!b.eta_unique) out.warnings.push_back("multiplier direction not unique on branch " + b.face + " for h=" + to_string(h));
    out.directions.push_back(std::move(dr));
  }

  std::vector<const ConditionResult*> base{&out.existence};
  auto collect = [&](std::vector<ConditionResult BranchReport::*> fields) {
    std::vector<const ConditionResult*> parts = base;
    for (const auto& d : out.directions)
      for (const auto& b : d.branches)
        for (auto f : fields) parts.push_back(&(b.*f));
    return parts;
  };
  for (Route r : {Route::Thm6, Route::Cor1, Route::Thm5}) {
    RouteResult rr;
    rr.route = r;
    if (r == Route::Thm6) rr.status = detail::route_status(collect({&BranchReport::span_injective, &BranchReport::face_positivity}), rr.reason);
    if (r == Route::Cor1) rr.status = detail::route_status(collect({&BranchReport::face_injective, &BranchReport::face_positivity}), rr.reason);
    if (r == Route::Thm5)
      rr.status = detail::route_status(
          collect({&BranchReport::parameter_annihilation, &BranchReport::face_positivity, &BranchReport::subregular}), rr.reason);
    out.routes.push_back(rr);
  }
  for (const auto& rr : out.routes)
    if (rr.status == Status::Holds && (opts.route == Route::Auto || opts.route == rr.route)) {
      out.used = rr.route;
      out.established = true;
      break;
    }
  if (!out.established) out.warnings.push_back("DS tables are reported without an established stability verdict");
  if (out.sampled_directions) out.warnings.push_back("directions were sampled; the verdict is verified on sampled directions only");
  out.nondirectional = ver.nondirectional();
  return out;
}

/// Implications between conditions that must hold on every instance. A
/// branch-level "indeterminate" consequent is not counted as a violation.
inline std::vector<std::string> hierarchy_violations(const Verdict& v) {
  std::vector<std::string> out;
  auto holds = [](const ConditionResult& c) { return c.status == Status::Holds; };
  auto refuted = [](const ConditionResult& c) { return c.status == Status::Fails || c.status == Status::NotEstablished; };
  const bool nondir = v.nondirectional && holds(*v.nondirectional);
  for (const auto& d : v.directions)
    for (const auto& b : d.branches) {
      const std::string where = " (h=" + to_string(d.h) + ", face " + b.face + ")";
      if (holds(b.face_injective) && refuted(b.parameter_annihilation))
        out.push_back("face injectivity holds but parameter annihilation does not" + where);
      if (holds(b.face_injective) && refuted(b.subregular)) out.push_back("face injectivity holds but subregularity is not certified" + where);
      if (holds(b.span_injective) && refuted(b.face_injective)) out.push_back("span injectivity holds but face injectivity does not" + where);
      if (holds(b.parameter_annihilation) && holds(b.face_positivity) && refuted(b.coderivative))
        out.push_back("face-pair conditions hold but the coderivative implication fails" + where);
      if (nondir && refuted(b.coderivative)) out.push_back("non-directional condition holds but a directional one fails" + where);
    }
  return out;
}

}  // namespace aubin
