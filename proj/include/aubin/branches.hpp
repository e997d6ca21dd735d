#pragma once

#include "aubin/cones.hpp"
#include "aubin/double_description.hpp"
#include "aubin/problem.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace aubin {

struct BranchPoint {
  RatVec k;
  RatVec eta;

  friend bool operator==(const BranchPoint&, const BranchPoint&) = default;
};

/// Solutions of the directional system for one direction h that put
/// v = grad q~ (h,k) on the face `face` of the critical cone and eta on its
/// conjugate face.
struct BranchSolution {
  RatVec h;
  Face face;
  PolyhedronGenerators solution_set;  // in (k, eta) coordinates
  std::vector<BranchPoint> representatives;
  bool continuum = false;
  bool eta_unique = true;
};

/// DM(h,k) = grad L (h,k) + b^T N_K(v) as an offset plus the image of a cone.
struct DerivativeImage {
  bool empty = true;  // v outside K
  RatVec offset;
  std::optional<PolyCone> normal;
  RatMat bt;

  bool contains(const RatVec& y) const {
    if (empty) return false;
    const std::size_t s = bt.cols();
    const PolyCone& n = *normal;
    RatMat eq = bt.vstack(n.eq());
    RatVec rhs = y - offset;
    for (std::size_t i = 0; i < n.eq().rows(); ++i) rhs.push_back(0);
    return !polyhedron_generators(n.ineq(), zeros(n.ineq().rows()), eq, rhs, s).empty();
  }

  bool contains_zero() const { return !empty && contains(zeros(offset.size())); }
};

struct DerivativeValues {
  std::vector<RatVec> k;
  bool continuum = false;
};

/// The linearized system 0 = grad L (h,k) + b^T eta, eta in N_K(grad q~ (h,k)),
/// solved face by face over the critical cone K.
class DirectionalSystem {
 public:
  DirectionalSystem(PointData pd, const PolyCone& k, RatVec lam)
      : pd_(std::move(pd)), lam_(std::move(lam)), lattice_(std::make_shared<FaceLattice>(k)) {
    if (k.dim() != pd_.s) throw std::invalid_argument("DirectionalSystem: cone dimension differs from s");
    grad_l_ = lagrangian_gradient(pd_, lam_);
    l1_ = grad_l_.block(0, 0, pd_.n, pd_.m);
    l2_ = grad_l_.block(0, pd_.m, pd_.n, pd_.n);
    m1_ = pd_.grad_qtilde_p();
    m2_ = pd_.grad_qtilde_x();
    bt_ = pd_.b.transpose();
  }

  const PointData& point_data() const { return pd_; }
  const RatVec& multiplier() const { return lam_; }
  const FaceLattice& lattice() const { return *lattice_; }
  const PolyCone& cone() const { return lattice_->cone(); }
  const RatMat& grad_lagrangian() const { return grad_l_; }

  RatVec v_of(const RatVec& h, const RatVec& k) const { return m1_ * h + m2_ * k; }
  RatVec residual(const RatVec& h, const RatVec& k, const RatVec& eta) const {
    return l1_ * h + l2_ * k + bt_ * eta;
  }

  /// Exact membership in the solution set of the directional system.
  bool is_solution(const RatVec& h, const RatVec& k, const RatVec& eta) const {
    if (!is_zero(residual(h, k, eta))) return false;
    const RatVec v = v_of(h, k);
    return cone().contains(v) && normal_cone(cone(), v).contains(eta);
  }

  std::vector<BranchSolution> solve(const RatVec& h) const {
    check_direction(h);
    std::vector<BranchSolution> out;
    for (const Face& f : lattice_->faces()) {
      auto branch = solve_face(h, f);
      if (branch) out.push_back(std::move(*branch));
    }
    return out;
  }

  /// All distinct (k, eta) representatives over the branches, in branch order.
  static std::vector<BranchPoint> solution_points(const std::vector<BranchSolution>& branches) {
    std::vector<BranchPoint> out;
    for (const auto& b : branches)
      for (const auto& r : b.representatives)
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    return out;
  }

  RatVec unique_eta(const RatVec& h, const RatVec& k) const {
    check_direction(h);
    if (k.size() != pd_.n) throw std::invalid_argument("unique_eta: k has wrong dimension");
    const RatVec v = v_of(h, k);
    if (!cone().contains(v)) throw std::invalid_argument("unique_eta: grad q~ (h,k) is outside the critical cone");
    const auto basis = span_normal_cone(cone(), v);
    const RatVec rhs = -(l1_ * h + l2_ * k);
    if (basis.empty()) {
      if (!is_zero(rhs)) throw std::invalid_argument("unique_eta: (h,k) does not solve the directional system");
      return zeros(pd_.s);
    }
    const RatMat bmat = RatMat::from_columns(basis, pd_.s);
    const RatMat sys = bt_ * bmat;
    const auto sol = solve_linear(sys, rhs);
    if (!sol) throw std::invalid_argument("unique_eta: (h,k) does not solve the directional system");
    if (!sol->nullspace_basis.empty()) throw std::logic_error("unique_eta: multiplier direction is not unique");
    const RatVec eta = bmat * sol->particular;
    if (!normal_cone(cone(), v).contains(eta))
      throw std::invalid_argument("unique_eta: (h,k) does not solve the directional system");
    return eta;
  }

  DerivativeImage dm(const RatVec& h, const RatVec& k) const {
    check_direction(h);
    DerivativeImage out;
    out.offset = l1_ * h + l2_ * k;
    out.bt = bt_;
    const RatVec v = v_of(h, k);
    if (!cone().contains(v)) return out;
    out.empty = false;
    out.normal = normal_cone(cone(), v);
    return out;
  }

  DerivativeValues ds(const RatVec& h) const {
    DerivativeValues out;
    for (const auto& b : solve(h)) {
      out.continuum = out.continuum || b.continuum;
      for (const auto& r : b.representatives)
        if (std::find(out.k.begin(), out.k.end(), r.k) == out.k.end()) out.k.push_back(r.k);
    }
    return out;
  }

 private:
  void check_direction(const RatVec& h) const {
    if (h.size() != pd_.m) throw std::invalid_argument("direction h has wrong dimension");
  }

  std::optional<BranchSolution> solve_face(const RatVec& h, const Face& f) const {
    const std::size_t n = pd_.n, s = pd_.s, dim = n + s;
    const PolyCone& k = cone();
    const PolyCone conj = f.conjugate();
    const RatVec shift = m1_ * h;

    std::vector<RatVec> eq_rows, ineq_rows;
    RatVec eq_rhs, ineq_rhs;
    auto lift_v = [&](const RatVec& a) { return concat(m2_.transpose() * a, zeros(s)); };
    auto lift_eta = [&](const RatVec& g) { return concat(zeros(n), g); };

    for (std::size_t i = 0; i < n; ++i) {
      eq_rows.push_back(concat(l2_.row(i), pd_.b.col(i)));
      eq_rhs.push_back(-dot(l1_.row(i), h));
    }
    for (std::size_t i = 0; i < k.eq().rows(); ++i) {
      eq_rows.push_back(lift_v(k.eq().row(i)));
      eq_rhs.push_back(-dot(k.eq().row(i), shift));
    }
    for (std::size_t i = 0; i < k.num_ineq(); ++i) {
      const RatVec a = k.ineq().row(i);
      const bool tight = std::binary_search(f.active().begin(), f.active().end(), i);
      (tight ? eq_rows : ineq_rows).push_back(lift_v(a));
      (tight ? eq_rhs : ineq_rhs).push_back(-dot(a, shift));
    }
    for (std::size_t i = 0; i < conj.eq().rows(); ++i) {
      eq_rows.push_back(lift_eta(conj.eq().row(i)));
      eq_rhs.push_back(0);
    }
    for (std::size_t i = 0; i < conj.ineq().rows(); ++i) {
      ineq_rows.push_back(lift_eta(conj.ineq().row(i)));
      ineq_rhs.push_back(0);
    }

    PolyhedronGenerators set = polyhedron_generators(RatMat::from_rows(ineq_rows, dim), ineq_rhs,
                                                     RatMat::from_rows(eq_rows, dim), eq_rhs, dim);
    if (set.empty()) return std::nullopt;

    RatVec centre = zeros(dim);
    for (const auto& x : set.vertices) centre = centre + x;
    centre = Rat(1) / Rat(static_cast<std::int64_t>(set.vertices.size())) * centre;
    for (const auto& r : set.rays) centre = centre + r;
    if (!(lattice_->face_of(v_of(h, slice(centre, 0, n))) == f)) return std::nullopt;

    BranchSolution b{h, f, set, {}, false, eta_unique_on(f)};
    auto add = [&](const RatVec& z) {
      BranchPoint p{slice(z, 0, n), slice(z, n, s)};
      if (std::find(b.representatives.begin(), b.representatives.end(), p) == b.representatives.end())
        b.representatives.push_back(std::move(p));
    };
    for (const auto& x : set.vertices) add(x);
    const RatVec& base = set.vertices.front();
    for (const auto& r : set.rays) add(base + r);
    for (const auto& l : set.lineality) {
      add(base + l);
      add(base - l);
    }
    b.continuum = set.vertices.size() > 1 || !set.rays.empty() || !set.lineality.empty();
    if (b.continuum) add(centre);
    return b;
  }

  bool eta_unique_on(const Face& f) const {
    std::vector<RatVec> rows = cone().eq().row_list();
    for (auto i : f.active()) rows.push_back(cone().ineq().row(i));
    const auto basis = span_basis(rows, pd_.s);
    if (basis.empty()) return true;
    return rank(bt_ * RatMat::from_columns(basis, pd_.s)) == basis.size();
  }

  PointData pd_;
  RatVec lam_;
  std::shared_ptr<FaceLattice> lattice_;
  RatMat grad_l_, l1_, l2_, m1_, m2_, bt_;
};

inline std::vector<BranchSolution> solve_branches(const PointData& pd, const PolyCone& k, const RatVec& lam,
                                                  const RatVec& h) {
  return DirectionalSystem(pd, k, lam).solve(h);
}

inline RatVec unique_eta(const PointData& pd, const PolyCone& k, const RatVec& lam, const RatVec& h,
                         const RatVec& kvec) {
  return DirectionalSystem(pd, k, lam).unique_eta(h, kvec);
}

inline DerivativeImage dm_graphical_derivative(const PointData& pd, const PolyCone& k, const RatVec& lam,
                                               const RatVec& h, const RatVec& kvec) {
  return DirectionalSystem(pd, k, lam).dm(h, kvec);
}

inline DerivativeValues ds_graphical_derivative(const PointData& pd, const PolyCone& k, const RatVec& lam,
                                                const RatVec& h) {
  return DirectionalSystem(pd, k, lam).ds(h);
}

}  // namespace aubin
