#pragma once

// Double description (Motzkin) conversion from an H-representation
// {x | Ax <= 0, Ex = 0} to generators cone(rays) + span(lineality).

#include "aubin/linalg.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace aubin {

struct Generators {
  std::vector<RatVec> rays;
  std::vector<RatVec> lineality;

  friend bool operator==(const Generators&, const Generators&) = default;
};

namespace detail {

inline bool lex_less(const RatVec& a, const RatVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// Orthogonal projection of x onto the complement of span(basis).
inline RatVec project_out(const RatVec& x, const std::vector<RatVec>& basis) {
  if (basis.empty()) return x;
  const std::size_t k = basis.size();
  RatMat gram(k, k);
  RatVec rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) gram(i, j) = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], x);
  }
  auto sol = solve_linear(gram, rhs);
  RatVec y = x;
  for (std::size_t i = 0; i < k; ++i) y = y - sol->particular[i] * basis[i];
  return y;
}

/// Rank test for adjacency of two rays (or extremality of one ray when a == b).
inline std::size_t tight_rank(const std::vector<RatVec>& ineqs, const std::vector<RatVec>& eqs,
                              const RatVec& a, const RatVec& b, std::size_t dim) {
  std::vector<RatVec> rows = eqs;
  for (const auto& r : ineqs)
    if (dot(r, a).is_zero() && dot(r, b).is_zero()) rows.push_back(r);
  return rank_of(rows, dim);
}

}  // namespace detail

/// Generators of {x in R^dim | ineq x <= 0, eq x = 0}. Output is canonical:
/// lineality is the reduced-echelon basis made primitive, rays are extreme,
/// orthogonal to the lineality space, primitive, and sorted.
inline Generators cone_generators(const RatMat& ineq, const RatMat& eq, std::size_t dim) {
  if (ineq.rows() && ineq.cols() != dim) throw std::invalid_argument("cone_generators: inequality width mismatch");
  if (eq.rows() && eq.cols() != dim) throw std::invalid_argument("cone_generators: equality width mismatch");

  std::vector<RatVec> lin;
  for (std::size_t i = 0; i < dim; ++i) lin.push_back(unit_vector(dim, i));
  std::vector<RatVec> rays;
  std::vector<RatVec> ineqs_done;
  std::vector<RatVec> eqs_done;

  // Removes the lineality vector at `idx` after making every other generator
  // orthogonal to `a` along it. Returns the removed vector.
  auto pivot = [&](const RatVec& a, std::size_t idx) {
    RatVec l = lin[idx];
    const Rat al = dot(a, l);
    lin.erase(lin.begin() + static_cast<std::ptrdiff_t>(idx));
    for (auto& v : lin) {
      const Rat t = dot(a, v);
      if (!t.is_zero()) v = v - (t / al) * l;
    }
    for (auto& r : rays) {
      const Rat t = dot(a, r);
      if (!t.is_zero()) r = r - (t / al) * l;
    }
    return l;
  };

  auto find_pivot = [&](const RatVec& a) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < lin.size(); ++i)
      if (!dot(a, lin[i]).is_zero()) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };

  auto motzkin = [&](const RatVec& a) {
    std::vector<RatVec> pos, neg, next;
    std::vector<Rat> pos_val, neg_val;
    for (auto& r : rays) {
      const Rat t = dot(a, r);
      if (t.sign() > 0) {
        pos.push_back(r);
        pos_val.push_back(t);
      } else {
        if (t.sign() < 0) {
          neg.push_back(r);
          neg_val.push_back(t);
        }
        next.push_back(r);
      }
    }
    const std::size_t target = dim - lin.size();
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (std::size_t j = 0; j < neg.size(); ++j) {
        if (target < 2 || detail::tight_rank(ineqs_done, eqs_done, pos[i], neg[j], dim) != target - 2) continue;
        next.push_back(primitive(pos_val[i] * neg[j] - neg_val[j] * pos[i]));
      }
    rays = std::move(next);
  };

  auto add_inequality = [&](const RatVec& a) {
    if (is_zero(a)) return;
    const auto p = find_pivot(a);
    if (p >= 0) {
      RatVec l = pivot(a, static_cast<std::size_t>(p));
      if (dot(a, l).sign() > 0) l = -l;
      rays.push_back(primitive(l));
    } else {
      motzkin(a);
    }
    ineqs_done.push_back(a);
  };

  for (std::size_t i = 0; i < eq.rows(); ++i) {
    const RatVec e = eq.row(i);
    if (is_zero(e)) continue;
    const auto p = find_pivot(e);
    if (p >= 0) {
      pivot(e, static_cast<std::size_t>(p));
      eqs_done.push_back(e);
    } else {
      add_inequality(e);
      add_inequality(-e);
    }
  }
  for (std::size_t i = 0; i < ineq.rows(); ++i) add_inequality(ineq.row(i));

  Generators g;
  for (const auto& v : span_basis(lin, dim)) g.lineality.push_back(primitive(v));
  std::sort(g.lineality.begin(), g.lineality.end(), detail::lex_less);

  const std::size_t extreme_rank = dim - g.lineality.size() - 1;
  std::vector<RatVec> all_ineq = ineq.row_list();
  std::vector<RatVec> all_eq = eq.row_list();
  for (const auto& r : rays) {
    RatVec c = primitive(detail::project_out(r, g.lineality));
    if (is_zero(c)) continue;
    if (detail::tight_rank(all_ineq, all_eq, c, c, dim) != extreme_rank) continue;
    g.rays.push_back(std::move(c));
  }
  std::sort(g.rays.begin(), g.rays.end(), detail::lex_less);
  g.rays.erase(std::unique(g.rays.begin(), g.rays.end()), g.rays.end());
  return g;
}

/// Vertices, recession rays and lineality of {x | A x <= c, E x = d}; all
/// lists empty means the polyhedron is empty.
struct PolyhedronGenerators {
  std::vector<RatVec> vertices;
  std::vector<RatVec> rays;
  std::vector<RatVec> lineality;

  bool empty() const { return vertices.empty(); }
};

inline PolyhedronGenerators polyhedron_generators(const RatMat& a, const RatVec& c, const RatMat& e,
                                                  const RatVec& d, std::size_t dim) {
  if (a.rows() != c.size() || e.rows() != d.size()) throw std::invalid_argument("polyhedron_generators: rhs mismatch");
  RatMat hi(a.rows() + 1, dim + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) hi(i, j) = a(i, j);
    hi(i, dim) = -c[i];
  }
  hi(a.rows(), dim) = -1;
  RatMat he(e.rows(), dim + 1);
  for (std::size_t i = 0; i < e.rows(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) he(i, j) = e(i, j);
    he(i, dim) = -d[i];
  }
  Generators g = cone_generators(hi, he, dim + 1);
  PolyhedronGenerators out;
  for (const auto& r : g.rays) {
    const Rat t = r[dim];
    RatVec x = slice(r, 0, dim);
    if (t.sign() > 0) {
      out.vertices.push_back(Rat(1) / t * x);
    } else {
      out.rays.push_back(std::move(x));
    }
  }
  if (out.vertices.empty()) return {};
  for (const auto& l : g.lineality) out.lineality.push_back(slice(l, 0, dim));
  std::sort(out.vertices.begin(), out.vertices.end(), detail::lex_less);
  return out;
}

}  // namespace aubin
