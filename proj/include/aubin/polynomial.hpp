#pragma once

#include "aubin/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aubin {

/// Sparse multivariate polynomial with rational coefficients, stored in
/// canonical form (exponent vector -> nonzero coefficient).
class Polynomial {
 public:
  using Exponents = std::vector<unsigned>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rat& c) {
    Polynomial p(nvars);
    if (!c.is_zero()) p.terms_[Exponents(nvars, 0)] = c;
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t index) {
    Polynomial p(nvars);
    Exponents e(nvars, 0);
    e.at(index) = 1;
    p.terms_[e] = 1;
    return p;
  }

  std::size_t num_vars() const { return nvars_; }
  const std::map<Exponents, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool uses_var(std::size_t index) const {
    for (const auto& [e, c] : terms_)
      if (e[index] > 0) return true;
    return false;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  Polynomial operator-() const {
    Polynomial p = *this;
    for (auto& [e, c] : p.terms_) c = -c;
    return p;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_compatible(b);
    Polynomial p(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(a.nvars_);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        p.add_term(e, ca * cb);
      }
    return p;
  }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(nvars_, 1);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  Polynomial derivative(std::size_t index) const {
    if (index >= nvars_) throw std::out_of_range("derivative: variable index out of range");
    Polynomial d(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[index] == 0) continue;
      Exponents f = e;
      --f[index];
      d.add_term(f, c * Rat(static_cast<std::int64_t>(e[index])));
    }
    return d;
  }

  Rat evaluate(const RatVec& point) const {
    if (point.size() != nvars_) throw std::invalid_argument("evaluate: point dimension mismatch");
    Rat s = 0;
    for (const auto& [e, c] : terms_) {
      Rat t = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
      s += t;
    }
    return s;
  }

  /// Replaces variable i by variable target[i].
  Polynomial rename(const std::vector<std::size_t>& target) const {
    if (target.size() != nvars_) throw std::invalid_argument("rename: map size mismatch");
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) {
      Exponents f(nvars_, 0);
      for (std::size_t i = 0; i < nvars_; ++i) f.at(target[i]) += e[i];
      p.add_term(f, c);
    }
    return p;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// Terms by ascending total degree; within a degree, earlier variables first.
  std::string str(const std::vector<std::string>& names) const {
    if (names.size() != nvars_) throw std::invalid_argument("str: name count mismatch");
    if (terms_.empty()) return "0";
    std::vector<std::pair<Exponents, Rat>> ordered(terms_.begin(), terms_.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      const unsigned da = total_degree(a.first), db = total_degree(b.first);
      if (da != db) return da < db;
      return a.first > b.first;
    });
    std::string out;
    for (std::size_t t = 0; t < ordered.size(); ++t) {
      const auto& [e, c] = ordered[t];
      std::string mono;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += names[i];
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      const Rat mag = abs(c);
      std::string term;
      if (mono.empty()) term = mag.str();
      else if (mag == Rat(1)) term = mono;
      else term = mag.str() + "*" + mono;
      if (t == 0) out = (c.sign() < 0 ? "-" : "") + term;
      else out += (c.sign() < 0 ? " - " : " + ") + term;
    }
    return out;
  }

 private:
  static unsigned total_degree(const Exponents& e) {
    unsigned d = 0;
    for (auto k : e) d += k;
    return d;
  }

  void check_compatible(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("polynomials over different variable sets");
  }

  void add_term(const Exponents& e, const Rat& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  std::size_t nvars_ = 0;
  std::map<Exponents, Rat> terms_;
};

/// Variables p1..pm, x1..xn, y1..yn laid out as indices 0..m+2n-1.
struct VariableLayout {
  std::size_t m = 0;
  std::size_t n = 0;

  std::size_t count() const { return m + 2 * n; }
  std::size_t p(std::size_t i) const { return i; }
  std::size_t x(std::size_t i) const { return m + i; }
  std::size_t y(std::size_t i) const { return m + n + i; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= m; ++i) out.push_back("p" + std::to_string(i));
    for (std::size_t i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
    for (std::size_t i = 1; i <= n; ++i) out.push_back("y" + std::to_string(i));
    return out;
  }

  /// Substitution map y_i -> x_i.
  std::vector<std::size_t> collapse_y() const {
    std::vector<std::size_t> t(count());
    for (std::size_t i = 0; i < count(); ++i) t[i] = i;
    for (std::size_t i = 0; i < n; ++i) t[y(i)] = x(i);
    return t;
  }
};

/// Syntax error inside an expression; `column` is 1-based.
class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& what, std::size_t column) : std::runtime_error(what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Recursive-descent parser for polynomial expressions:
///   expr  := term (('+' | '-') term)*
///   term  := unary ('*' unary)*
///   unary := ('+' | '-') unary | power
///   power := atom ('^' integer)?
///   atom  := rational | variable | '(' expr ')'
class ExpressionParser {
 public:
  ExpressionParser(VariableLayout layout, bool allow_y) : layout_(layout), allow_y_(allow_y) {}

  Polynomial parse(std::string_view text) {
    text_ = text;
    pos_ = 0;
    skip_space();
    if (pos_ == text_.size()) fail("empty expression");
    Polynomial p = expr();
    skip_space();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExprError(msg, pos_ + 1); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    while (accept('*')) acc = acc * unary();
    return acc;
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      unsigned k = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        k = k * 10 + static_cast<unsigned>(text_[pos_] - '0');
        if (k > 64) fail("exponent too large");
        ++pos_;
      }
      if (pos_ == start) fail("expected a nonnegative integer exponent");
      return base.pow(k);
    }
    return base;
  }

  Polynomial atom() {
    skip_space();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      try {
        return Polynomial::constant(layout_.count(), Rat::parse_prefix(text_, pos_));
      } catch (const std::invalid_argument& e) {
        pos_ = start;
        fail(e.what());
      }
    }
    if (c == 'p' || c == 'x' || c == 'y') {
      const std::size_t start = pos_;
      ++pos_;
      std::size_t idx = 0;
      const std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        idx = idx * 10 + static_cast<std::size_t>(text_[pos_] - '0');
        ++pos_;
      }
      if (pos_ == digits || idx == 0) {
        pos_ = start;
        fail("expected a variable p<i>, x<i> or y<i>");
      }
      const std::size_t limit = c == 'p' ? layout_.m : layout_.n;
      if (idx > limit) {
        const std::string token(text_.substr(start, pos_ - start));
        pos_ = start;
        fail("variable " + token + " exceeds dimension " + std::to_string(limit));
      }
      if (c == 'y' && !allow_y_) {
        pos_ = start;
        fail("y-variables are not allowed in f");
      }
      const std::size_t k = idx - 1;
      return Polynomial::variable(layout_.count(), c == 'p' ? layout_.p(k) : c == 'x' ? layout_.x(k) : layout_.y(k));
    }
    fail(std::string("unexpected '") + c + "'");
  }

  VariableLayout layout_;
  bool allow_y_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace aubin
