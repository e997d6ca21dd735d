#pragma once

#include "aubin/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aubin {

using RatVec = std::vector<Rat>;

inline RatVec zeros(std::size_t dim) { return RatVec(dim, Rat(0)); }

inline RatVec unit_vector(std::size_t dim, std::size_t i) {
  RatVec e = zeros(dim);
  e.at(i) = 1;
  return e;
}

inline void require_same_dim(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
}

inline Rat dot(const RatVec& a, const RatVec& b) {
  require_same_dim(a, b);
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
  }
  return s;
}

inline RatVec operator+(RatVec a, const RatVec& b) {
  require_same_dim(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline RatVec operator-(RatVec a, const RatVec& b) {
  require_same_dim(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline RatVec operator-(RatVec a) {
  for (auto& x : a) x = -x;
  return a;
}

inline RatVec operator*(const Rat& t, RatVec a) {
  for (auto& x : a) x *= t;
  return a;
}

inline bool is_zero(const RatVec& a) {
  return std::all_of(a.begin(), a.end(), [](const Rat& x) { return x.is_zero(); });
}

inline RatVec concat(RatVec a, const RatVec& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline RatVec slice(const RatVec& a, std::size_t from, std::size_t count) {
  if (from + count > a.size()) throw std::out_of_range("vector slice out of range");
  return RatVec(a.begin() + static_cast<std::ptrdiff_t>(from), a.begin() + static_cast<std::ptrdiff_t>(from + count));
}

/// Positive multiple of `a` with coprime integer entries; zero stays zero.
inline RatVec primitive(const RatVec& a) {
  BigInt l = 1;
  for (const auto& x : a) l = boost::multiprecision::lcm(l, x.den());
  BigInt g = 0;
  std::vector<BigInt> ints;
  ints.reserve(a.size());
  for (const auto& x : a) {
    ints.push_back(x.num() * (l / x.den()));
    g = boost::multiprecision::gcd(g, ints.back());
  }
  RatVec out;
  out.reserve(a.size());
  for (const auto& v : ints) out.emplace_back(g == 0 ? BigInt(0) : BigInt(v / g));
  return out;
}

/// True if b = t a for some t > 0 (both nonzero).
inline bool positively_parallel(const RatVec& a, const RatVec& b) {
  if (is_zero(a) || is_zero(b)) return false;
  return primitive(a) == primitive(b);
}

inline std::string to_string(const RatVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i].str();
  }
  return s + ")";
}

/// Dense row-major rational matrix.
class RatMat {
 public:
  RatMat() = default;
  RatMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rat(0)) {}
  RatMat(std::initializer_list<std::initializer_list<Rat>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : init) {
      if (r.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static RatMat from_rows(const std::vector<RatVec>& rows, std::size_t cols) {
    RatMat m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw std::invalid_argument("row length mismatch");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static RatMat from_columns(const std::vector<RatVec>& columns, std::size_t rows) {
    return from_rows(columns, rows).transpose();
  }

  static RatMat identity(std::size_t n) {
    RatMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RatVec row(std::size_t i) const {
    return RatVec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  RatVec col(std::size_t j) const {
    RatVec c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  std::vector<RatVec> row_list() const {
    std::vector<RatVec> out;
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
    return out;
  }

  RatMat transpose() const {
    RatMat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  RatMat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("matrix block out of range");
    RatMat b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  RatMat select_rows(const std::vector<std::size_t>& idx) const {
    RatMat b(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) b(i, j) = (*this)(idx[i], j);
    return b;
  }

  RatVec operator*(const RatVec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
    RatVec y = zeros(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!(*this)(i, j).is_zero() && !x[j].is_zero()) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  RatMat operator*(const RatMat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    RatMat p(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rat& a = (*this)(i, k);
        if (a.is_zero()) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) p(i, j) += a * o(k, j);
      }
    return p;
  }

  RatMat operator+(const RatMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum dimension mismatch");
    RatMat s = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) s.data_[i] += o.data_[i];
    return s;
  }

  RatMat scaled(const Rat& t) const {
    RatMat s = *this;
    for (auto& x : s.data_) x *= t;
    return s;
  }

  /// Stacks rows of `below` under this matrix; an empty operand adopts the other's width.
  RatMat vstack(const RatMat& below) const {
    if (rows_ == 0 && cols_ == 0) return below;
    if (below.rows_ == 0 && below.cols_ == 0) return *this;
    if (cols_ != below.cols_) throw std::invalid_argument("vstack width mismatch");
    RatMat s(rows_ + below.rows_, cols_);
    std::copy(data_.begin(), data_.end(), s.data_.begin());
    std::copy(below.data_.begin(), below.data_.end(), s.data_.begin() + static_cast<std::ptrdiff_t>(data_.size()));
    return s;
  }

  RatMat hstack(const RatMat& right) const {
    if (rows_ != right.rows_) throw std::invalid_argument("hstack height mismatch");
    RatMat s(rows_, cols_ + right.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) s(i, j) = (*this)(i, j);
      for (std::size_t j = 0; j < right.cols_; ++j) s(i, cols_ + j) = right(i, j);
    }
    return s;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rat& x) { return x.is_zero(); });
  }

  friend bool operator==(const RatMat& a, const RatMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i) s += ", ";
      s += "[";
      for (std::size_t j = 0; j < cols_; ++j) {
        if (j) s += ", ";
        s += (*this)(i, j).str();
      }
      s += "]";
    }
    return s + "]";
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rat> data_;
};

namespace detail {

/// Row echelon form computed by fraction-free (Bareiss) elimination over the
/// integers after clearing row denominators. Entries stay integral.
struct IntegerEchelon {
  std::vector<std::vector<BigInt>> rows;
  std::vector<std::size_t> pivot_cols;
};

inline IntegerEchelon bareiss_echelon(const RatMat& a) {
  IntegerEchelon e;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  e.rows.assign(m, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < m; ++i) {
    BigInt l = 1;
    for (std::size_t j = 0; j < n; ++j) l = boost::multiprecision::lcm(l, a(i, j).den());
    for (std::size_t j = 0; j < n; ++j) e.rows[i][j] = a(i, j).num() * (l / a(i, j).den());
  }
  BigInt prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t p = r;
    while (p < m && e.rows[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(e.rows[p], e.rows[r]);
    const BigInt& piv = e.rows[r][c];
    for (std::size_t i = r + 1; i < m; ++i) {
      const BigInt lead = e.rows[i][c];
      for (std::size_t j = c + 1; j < n; ++j) {
        BigInt t = piv * e.rows[i][j] - lead * e.rows[r][j];
        if (t % prev != 0) throw std::logic_error("Bareiss step lost exactness");
        e.rows[i][j] = t / prev;
      }
      e.rows[i][c] = 0;
    }
    prev = piv;
    e.pivot_cols.push_back(c);
    ++r;
  }
  e.rows.resize(r);
  return e;
}

}  // namespace detail

inline std::size_t rank(const RatMat& a) { return detail::bareiss_echelon(a).pivot_cols.size(); }

/// Reduced row echelon form (nonzero rows only) and the pivot columns.
struct ReducedEchelon {
  RatMat rref;
  std::vector<std::size_t> pivot_cols;
};

inline ReducedEchelon reduced_echelon(const RatMat& a) {
  auto e = detail::bareiss_echelon(a);
  const std::size_t r = e.pivot_cols.size();
  RatMat out(r, a.cols());
  for (std::size_t i = 0; i < r; ++i) {
    const BigInt& piv = e.rows[i][e.pivot_cols[i]];
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = Rat(e.rows[i][j], piv);
  }
  for (std::size_t i = r; i-- > 0;) {
    const std::size_t pc = e.pivot_cols[i];
    for (std::size_t k = 0; k < i; ++k) {
      const Rat f = out(k, pc);
      if (f.is_zero()) continue;
      for (std::size_t j = pc; j < a.cols(); ++j) out(k, j) -= f * out(i, j);
    }
  }
  return {std::move(out), std::move(e.pivot_cols)};
}

/// Basis of ker A, one vector per free column.
inline std::vector<RatVec> nullspace(const RatMat& a) {
  auto [r, piv] = reduced_echelon(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    RatVec v = zeros(a.cols());
    v[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -r(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

struct LinearSolution {
  RatVec particular;
  std::vector<RatVec> nullspace_basis;
};

/// Solves A x = b exactly. Returns nullopt when the system is inconsistent.
inline std::optional<LinearSolution> solve_linear(const RatMat& a, const RatVec& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_linear: A.rows != b.dim");
  RatMat aug = a.hstack(RatMat::from_columns({b}, b.size()));
  if (a.rows() == 0) aug = RatMat(0, a.cols() + 1);
  auto [r, piv] = reduced_echelon(aug);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  RatVec x = zeros(a.cols());
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = r(i, a.cols());
  return LinearSolution{std::move(x), nullspace(a)};
}

/// Canonical basis (nonzero rows of the reduced echelon form) of span(vectors).
inline std::vector<RatVec> span_basis(const std::vector<RatVec>& vectors, std::size_t dim) {
  if (vectors.empty()) return {};
  auto [r, piv] = reduced_echelon(RatMat::from_rows(vectors, dim));
  return r.row_list();
}

inline std::size_t rank_of(const std::vector<RatVec>& vectors, std::size_t dim) {
  if (vectors.empty()) return 0;
  return rank(RatMat::from_rows(vectors, dim));
}

inline bool in_span(const std::vector<RatVec>& basis, const RatVec& v) {
  if (is_zero(v)) return true;
  if (basis.empty()) return false;
  auto with = basis;
  with.push_back(v);
  return rank_of(with, v.size()) == rank_of(basis, v.size());
}

/// Basis of the orthogonal complement of span(vectors) in R^dim.
inline std::vector<RatVec> orthogonal_complement(const std::vector<RatVec>& vectors, std::size_t dim) {
  if (vectors.empty()) {
    std::vector<RatVec> all;
    for (std::size_t i = 0; i < dim; ++i) all.push_back(unit_vector(dim, i));
    return all;
  }
  return nullspace(RatMat::from_rows(vectors, dim));
}

}  // namespace aubin
