#pragma once

#include "aubin/double_description.hpp"
#include "aubin/linalg.hpp"

#include <algorithm>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aubin {

/// Convex polyhedron {u | A u <= c, E u = d} in R^dim.
class HPolyhedron {
 public:
  HPolyhedron() = default;
  HPolyhedron(std::size_t dim, RatMat a, RatVec c, RatMat e, RatVec d)
      : dim_(dim), a_(std::move(a)), c_(std::move(c)), e_(std::move(e)), d_(std::move(d)) {
    if (a_.rows() == 0) a_ = RatMat(0, dim_);
    if (e_.rows() == 0) e_ = RatMat(0, dim_);
    if (a_.cols() != dim_ || e_.cols() != dim_) throw std::invalid_argument("HPolyhedron: row width mismatch");
    if (a_.rows() != c_.size() || e_.rows() != d_.size()) throw std::invalid_argument("HPolyhedron: rhs length mismatch");
  }

  static HPolyhedron whole_space(std::size_t dim) { return HPolyhedron(dim, {}, {}, {}, {}); }

  std::size_t dim() const { return dim_; }
  const RatMat& ineq() const { return a_; }
  const RatVec& ineq_rhs() const { return c_; }
  const RatMat& eq() const { return e_; }
  const RatVec& eq_rhs() const { return d_; }

  /// Index of the first violated row: inequalities first, then equalities
  /// numbered after them. nullopt if u belongs to the set.
  std::optional<std::size_t> first_violated_row(const RatVec& u) const {
    if (u.size() != dim_) throw std::invalid_argument("HPolyhedron: point dimension mismatch");
    const RatVec au = a_ * u;
    for (std::size_t i = 0; i < au.size(); ++i)
      if (au[i] > c_[i]) return i;
    const RatVec eu = e_ * u;
    for (std::size_t i = 0; i < eu.size(); ++i)
      if (eu[i] != d_[i]) return a_.rows() + i;
    return std::nullopt;
  }

  bool contains(const RatVec& u) const { return !first_violated_row(u).has_value(); }

  std::vector<std::size_t> active_set(const RatVec& u) const {
    const RatVec au = a_ * u;
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < au.size(); ++i)
      if (au[i] == c_[i]) act.push_back(i);
    return act;
  }

  bool is_empty() const { return polyhedron_generators(a_, c_, e_, d_, dim_).empty(); }

 private:
  std::size_t dim_ = 0;
  RatMat a_, e_;
  RatVec c_, d_;
};

/// Polyhedral cone {u | A u <= 0, E u = 0}. Zero rows and duplicate rows are
/// dropped and every row is scaled to a primitive integer vector on
/// construction; row indices refer to the cleaned representation. The
/// generator representation is computed on first use and shared by copies.
class PolyCone {
 public:
  PolyCone() : PolyCone(0) {}
  explicit PolyCone(std::size_t dim, const RatMat& ineq = {}, const RatMat& eq = {}) : dim_(dim) {
    if (ineq.rows() && ineq.cols() != dim) throw std::invalid_argument("PolyCone: inequality width mismatch");
    if (eq.rows() && eq.cols() != dim) throw std::invalid_argument("PolyCone: equality width mismatch");
    std::vector<RatVec> in, ev;
    for (const auto& r : ineq.row_list()) {
      if (is_zero(r)) continue;
      RatVec p = primitive(r);
      if (std::find(in.begin(), in.end(), p) == in.end()) in.push_back(std::move(p));
    }
    for (const auto& r : eq.row_list()) {
      if (is_zero(r)) continue;
      RatVec p = primitive(r);
      if (std::find(ev.begin(), ev.end(), p) == ev.end() && std::find(ev.begin(), ev.end(), -p) == ev.end())
        ev.push_back(std::move(p));
    }
    ineq_ = in.empty() ? RatMat(0, dim) : RatMat::from_rows(in, dim);
    eq_ = ev.empty() ? RatMat(0, dim) : RatMat::from_rows(ev, dim);
  }

  static PolyCone whole_space(std::size_t dim) { return PolyCone(dim); }
  static PolyCone origin(std::size_t dim) { return PolyCone(dim, {}, RatMat::identity(dim)); }

  /// cone(rays) + span(lineality), converted to an H-representation.
  static PolyCone from_generators(std::size_t dim, const std::vector<RatVec>& rays,
                                  const std::vector<RatVec>& lineality) {
    auto as_mat = [dim](const std::vector<RatVec>& v) { return v.empty() ? RatMat(0, dim) : RatMat::from_rows(v, dim); };
    Generators facets = cone_generators(as_mat(rays), as_mat(lineality), dim);
    return PolyCone(dim, as_mat(facets.rays), as_mat(facets.lineality));
  }

  std::size_t dim() const { return dim_; }
  const RatMat& ineq() const { return ineq_; }
  const RatMat& eq() const { return eq_; }
  std::size_t num_ineq() const { return ineq_.rows(); }

  const Generators& generators() const& {
    std::call_once(lazy_->once, [this] { lazy_->gens = cone_generators(ineq_, eq_, dim_); });
    return lazy_->gens;
  }
  // A temporary cone hands out a copy so the result cannot dangle.
  Generators generators() const&& { return static_cast<const PolyCone&>(*this).generators(); }

  bool contains(const RatVec& u) const {
    if (u.size() != dim_) throw std::invalid_argument("PolyCone: point dimension mismatch");
    for (std::size_t i = 0; i < ineq_.rows(); ++i)
      if (dot(ineq_.row(i), u).sign() > 0) return false;
    for (std::size_t i = 0; i < eq_.rows(); ++i)
      if (!dot(eq_.row(i), u).is_zero()) return false;
    return true;
  }

  bool subset_of(const PolyCone& other) const {
    const auto& g = generators();
    for (const auto& r : g.rays)
      if (!other.contains(r)) return false;
    for (const auto& l : g.lineality)
      if (!other.contains(l) || !other.contains(-l)) return false;
    return true;
  }

  bool same_set(const PolyCone& other) const { return subset_of(other) && other.subset_of(*this); }

  bool is_origin() const { return generators().rays.empty() && generators().lineality.empty(); }

  /// {z | <z,u> <= 0 for all u in this cone}: generators become constraint rows.
  PolyCone polar() const {
    const auto& g = generators();
    auto as_mat = [this](const std::vector<RatVec>& v) { return v.empty() ? RatMat(0, dim_) : RatMat::from_rows(v, dim_); };
    return PolyCone(dim_, as_mat(g.rays), as_mat(g.lineality));
  }

  /// Sum of the rays; the lineality component is zero.
  RatVec relative_interior_point() const {
    RatVec x = zeros(dim_);
    for (const auto& r : generators().rays) x = x + r;
    return x;
  }

  /// Irredundant representation: implicit equalities in reduced-echelon
  /// form and facet normals, both primitive and sorted.
  PolyCone canonical() const {
    const auto& g = generators();
    auto as_mat = [this](const std::vector<RatVec>& v) { return v.empty() ? RatMat(0, dim_) : RatMat::from_rows(v, dim_); };
    Generators h = cone_generators(as_mat(g.rays), as_mat(g.lineality), dim_);
    return PolyCone(dim_, as_mat(h.rays), as_mat(h.lineality));
  }

  /// Text dump of the canonical representation, one row per line:
  /// "eq: <coeffs> = 0" rows first, then "ineq: <coeffs> <= 0".
  std::vector<std::string> dump() const {
    PolyCone c = canonical();
    std::vector<std::string> lines;
    auto coeffs = [](const RatVec& r) {
      std::string s;
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (j) s += " ";
        s += r[j].str();
      }
      return s;
    };
    for (std::size_t i = 0; i < c.eq_.rows(); ++i) lines.push_back("eq: " + coeffs(c.eq_.row(i)) + " = 0");
    for (std::size_t i = 0; i < c.ineq_.rows(); ++i) lines.push_back("ineq: " + coeffs(c.ineq_.row(i)) + " <= 0");
    if (lines.empty()) lines.emplace_back("(whole space R^" + std::to_string(dim_) + ")");
    return lines;
  }

  std::vector<std::size_t> active_set(const RatVec& u) const {
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < ineq_.rows(); ++i)
      if (dot(ineq_.row(i), u).is_zero()) act.push_back(i);
    return act;
  }

 private:
  struct Lazy {
    std::once_flag once;
    Generators gens;
  };

  std::size_t dim_ = 0;
  RatMat ineq_, eq_;
  std::shared_ptr<Lazy> lazy_ = std::make_shared<Lazy>();
};

/// Normal cone N_K(v) = K° ∩ [v]^⊥ = cone(active rows) + span(equality rows).
inline PolyCone normal_cone(const PolyCone& k, const RatVec& v) {
  if (!k.contains(v)) throw std::invalid_argument("normal_cone: point outside the cone");
  std::vector<RatVec> rays;
  for (auto i : k.active_set(v)) rays.push_back(k.ineq().row(i));
  return PolyCone::from_generators(k.dim(), rays, k.eq().row_list());
}

struct TangentNormal {
  PolyCone tangent;
  PolyCone normal;
};

inline TangentNormal tangent_normal(const HPolyhedron& d, const RatVec& u) {
  if (auto row = d.first_violated_row(u)) {
    throw std::invalid_argument("tangent_normal: point " + to_string(u) + " violates row " + std::to_string(*row + 1));
  }
  const auto act = d.active_set(u);
  RatMat a = d.ineq().select_rows(act);
  PolyCone t(d.dim(), a, d.eq());
  PolyCone n = PolyCone::from_generators(d.dim(), a.row_list(), d.eq().row_list());
  return {std::move(t), std::move(n)};
}

struct CriticalCone {
  PolyCone cone;
  bool dstar_in_polar = true;  // false: dstar is not a normal to T (still well defined)
};

/// T ∩ [dstar]^⊥.
inline CriticalCone critical_cone(const PolyCone& t, const RatVec& dstar) {
  if (dstar.size() != t.dim()) throw std::invalid_argument("critical_cone: dimension mismatch");
  RatMat eq = t.eq().vstack(RatMat::from_rows({dstar}, t.dim()));
  return {PolyCone(t.dim(), t.ineq(), eq), t.polar().contains(dstar)};
}

/// A face of a polyhedral cone, identified by the canonical (maximal) set of
/// parent inequalities that are tight on the whole face.
class Face {
 public:
  Face(std::shared_ptr<const PolyCone> parent, std::vector<std::size_t> active)
      : parent_(std::move(parent)), active_(std::move(active)) {}

  const PolyCone& parent() const { return *parent_; }
  const std::shared_ptr<const PolyCone>& parent_ptr() const { return parent_; }
  const std::vector<std::size_t>& active() const { return active_; }

  PolyCone cone() const { return restrict_to(*parent_, active_); }

  bool contains(const RatVec& v) const {
    if (!parent_->contains(v)) return false;
    for (auto i : active_)
      if (!dot(parent_->ineq().row(i), v).is_zero()) return false;
    return true;
  }

  bool subset_of(const Face& other) const {
    return std::includes(active_.begin(), active_.end(), other.active_.begin(), other.active_.end());
  }

  /// F ⊆ [eta]^⊥, checked on the generators of F.
  bool orthogonal_to(const RatVec& eta) const {
    const auto& g = cone().generators();
    for (const auto& r : g.rays)
      if (!dot(r, eta).is_zero()) return false;
    for (const auto& l : g.lineality)
      if (!dot(l, eta).is_zero()) return false;
    return true;
  }

  /// Conjugate face K° ∩ F^⊥ = cone(active rows) + span(equality rows).
  PolyCone conjugate() const {
    return PolyCone::from_generators(parent_->dim(), parent_->ineq().select_rows(active_).row_list(),
                                     parent_->eq().row_list());
  }

  std::string label() const {
    std::string s = "{";
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(active_[i] + 1);
    }
    return s + "}";
  }

  friend bool operator==(const Face& a, const Face& b) { return a.active_ == b.active_; }

  static PolyCone restrict_to(const PolyCone& k, const std::vector<std::size_t>& tight) {
    return PolyCone(k.dim(), k.ineq(), k.eq().vstack(k.ineq().select_rows(tight)));
  }

 private:
  std::shared_ptr<const PolyCone> parent_;
  std::vector<std::size_t> active_;
};

/// All faces of a cone, smallest active set (the cone itself) first.
class FaceLattice {
 public:
  explicit FaceLattice(PolyCone k) : cone_(std::make_shared<const PolyCone>(std::move(k))) {
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::vector<std::size_t>> queue{closure({})};
    seen.insert(queue.front());
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const auto cur = queue[q];
      for (std::size_t i = 0; i < cone_->num_ineq(); ++i) {
        if (std::binary_search(cur.begin(), cur.end(), i)) continue;
        auto next = cur;
        next.insert(std::upper_bound(next.begin(), next.end(), i), i);
        auto c = closure(next);
        if (seen.insert(c).second) queue.push_back(std::move(c));
      }
    }
    std::vector<std::vector<std::size_t>> sorted(seen.begin(), seen.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (auto& s : sorted) faces_.emplace_back(cone_, std::move(s));
  }

  const PolyCone& cone() const { return *cone_; }
  const std::vector<Face>& faces() const { return faces_; }

  /// The smallest face containing v (v must lie in the cone).
  Face face_of(const RatVec& v) const {
    if (!cone_->contains(v)) throw std::invalid_argument("face_of: point outside the cone");
    return Face(cone_, closure(cone_->active_set(v)));
  }

 private:
  std::vector<std::size_t> closure(const std::vector<std::size_t>& tight) const {
    const auto& g = Face::restrict_to(*cone_, tight).generators();
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < cone_->num_ineq(); ++i) {
      const RatVec a = cone_->ineq().row(i);
      if (std::all_of(g.rays.begin(), g.rays.end(), [&](const RatVec& r) { return dot(a, r).is_zero(); }))
        act.push_back(i);
    }
    return act;
  }

  std::shared_ptr<const PolyCone> cone_;
  std::vector<Face> faces_;
};

inline std::vector<Face> faces(const PolyCone& k) { return FaceLattice(k).faces(); }

using FacePair = std::pair<Face, Face>;  // (F1, F2) with F2 ⊆ F1

/// Ordered pairs (F1, F2) of faces with v ∈ F2 ⊆ F1 ⊆ [eta]^⊥.
inline std::vector<FacePair> admissible_face_pairs(const FaceLattice& lattice, const RatVec& v, const RatVec& eta) {
  const PolyCone& k = lattice.cone();
  if (!k.contains(v)) throw std::invalid_argument("admissible_face_pairs: v is not in the cone");
  if (!k.polar().contains(eta) || !dot(eta, v).is_zero())
    throw std::invalid_argument("admissible_face_pairs: eta is not a normal to the cone at v");
  std::vector<FacePair> out;
  for (const auto& f1 : lattice.faces()) {
    if (!f1.orthogonal_to(eta)) continue;
    for (const auto& f2 : lattice.faces())
      if (f2.contains(v) && f2.subset_of(f1)) out.emplace_back(f1, f2);
  }
  return out;
}

inline std::vector<FacePair> admissible_face_pairs(const PolyCone& k, const RatVec& v, const RatVec& eta) {
  return admissible_face_pairs(FaceLattice(k), v, eta);
}

/// F1 − F2 = {u | a_i u = 0 (i ∈ I1), a_i u <= 0 (i ∈ I2 \ I1)} with the
/// parent's equalities kept; I1 ⊆ I2 are the canonical active sets.
inline PolyCone face_difference(const Face& f1, const Face& f2) {
  if (f1.parent_ptr() != f2.parent_ptr() && !(f1.parent().ineq() == f2.parent().ineq() && f1.parent().eq() == f2.parent().eq()))
    throw std::invalid_argument("face_difference: faces of different cones");
  if (!f2.subset_of(f1)) throw std::invalid_argument("face_difference: F2 is not contained in F1");
  const PolyCone& k = f1.parent();
  std::vector<std::size_t> rest;
  std::set_difference(f2.active().begin(), f2.active().end(), f1.active().begin(), f1.active().end(),
                      std::back_inserter(rest));
  return PolyCone(k.dim(), k.ineq().select_rows(rest), k.eq().vstack(k.ineq().select_rows(f1.active())));
}

/// Basis of span N_K(v): active inequality normals plus equality rows.
inline std::vector<RatVec> span_normal_cone(const PolyCone& k, const RatVec& v) {
  if (!k.contains(v)) throw std::invalid_argument("span_normal_cone: v is not in the cone");
  std::vector<RatVec> rows = k.eq().row_list();
  for (auto i : k.active_set(v)) rows.push_back(k.ineq().row(i));
  return span_basis(rows, k.dim());
}

/// One member K'° × K' of the union describing a (directional) limiting
/// normal cone to the graph of N_D.
struct NormalProduct {
  Face f1;
  Face f2;
  PolyCone polar_part;  // K'°, the first (primal-variable) factor
  PolyCone cone_part;   // K' = F1 − F2, the second (multiplier) factor
};

struct GraphNormalCone {
  std::vector<NormalProduct> products;
  bool direction_outside_tangent = false;  // empty union by convention

  bool contains(const RatVec& first, const RatVec& second) const {
    return std::any_of(products.begin(), products.end(), [&](const NormalProduct& p) {
      return p.polar_part.contains(first) && p.cone_part.contains(second);
    });
  }
};

inline GraphNormalCone graph_normal_from_pairs(const std::vector<FacePair>& pairs) {
  GraphNormalCone out;
  for (const auto& [f1, f2] : pairs) {
    PolyCone diff = face_difference(f1, f2);
    PolyCone pol = diff.polar();
    out.products.push_back({f1, f2, std::move(pol), std::move(diff)});
  }
  return out;
}

/// Directional limiting normal cone to gph N_D at (dbar, lam) in direction
/// (u, eta), as the union of K'° × K' over admissible face pairs of the
/// critical cone. Direction (0,0) gives the limiting normal cone.
inline GraphNormalCone dlnc_gph_normal(const HPolyhedron& d, const RatVec& dbar, const RatVec& lam, const RatVec& u,
                                       const RatVec& eta) {
  auto tn = tangent_normal(d, dbar);
  if (!tn.normal.contains(lam)) throw std::invalid_argument("dlnc_gph_normal: lam is not a normal to D at dbar");
  FaceLattice lattice(critical_cone(tn.tangent, lam).cone);
  const PolyCone& k = lattice.cone();
  if (!k.contains(u) || !k.polar().contains(eta) || !dot(u, eta).is_zero()) {
    GraphNormalCone empty;
    empty.direction_outside_tangent = true;
    return empty;
  }
  return graph_normal_from_pairs(admissible_face_pairs(lattice, u, eta));
}

}  // namespace aubin
