#pragma once

#include "aubin/cones.hpp"
#include "aubin/linalg.hpp"
#include "aubin/polynomial.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aubin {

class ProblemError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Dimension, Infeasible, Io };

  ProblemError(Kind kind, const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(format(message, line, column)), kind_(kind), line_(line), column_(column) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Parameterized variational system: find x with 0 in f(p,x) + N_{Gamma(p,x)}(x),
/// Gamma(p,x) = {y | q(p,x,y) in D}.
struct ProblemSpec {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t s = 0;
  std::vector<Polynomial> f;
  std::vector<Polynomial> q;
  HPolyhedron D;
  RatVec pbar;
  RatVec xbar;

  VariableLayout layout() const { return {m, n}; }

  /// Point (pbar, xbar, xbar) in the full variable layout.
  RatVec reference_point() const { return concat(concat(pbar, xbar), xbar); }

  /// q(p,x,x) as polynomials.
  std::vector<Polynomial> qtilde() const {
    std::vector<Polynomial> out;
    const auto t = layout().collapse_y();
    for (const auto& qi : q) out.push_back(qi.rename(t));
    return out;
  }

  RatVec qtilde_value() const {
    RatVec v;
    const RatVec z = reference_point();
    for (const auto& qi : qtilde()) v.push_back(qi.evaluate(z));
    return v;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s, std::size_t* offset = nullptr) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  if (offset) *offset += a;
  return s.substr(a, b - a);
}

/// Whitespace- or comma-separated rational list; `col0` is the 1-based column of s[0].
inline RatVec parse_rat_list(std::string_view s, std::size_t line, std::size_t col0) {
  RatVec out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ',') ++i;
    try {
      out.push_back(Rat::parse(s.substr(start, i - start)));
    } catch (const std::exception& e) {
      throw ProblemError(ProblemError::Kind::Syntax, e.what(), line, col0 + start);
    }
  }
  return out;
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace detail

/// Parses the line-oriented problem format:
///
///   [problem]   m=<nat> n=<nat> s=<nat>
///   [functions] f<i> = "<expr>", q<j> = "<expr>"
///   [set]       ineq: <s coeffs> <= <rhs>   /   eq: <s coeffs> = <rhs>
///   [reference] p = <m rationals>, x = <n rationals>
///
/// '#' starts a comment. Throws ProblemError.
inline ProblemSpec parse_problem(std::string_view text) {
  using Kind = ProblemError::Kind;
  ProblemSpec spec;
  std::optional<std::size_t> dims[3];
  bool dims_done = false;
  std::vector<std::optional<Polynomial>> f, q;
  std::vector<RatVec> ineq_rows, eq_rows;
  RatVec ineq_rhs, eq_rhs;
  std::optional<RatVec> pbar, xbar;
  std::string section;

  auto require_dims = [&](std::size_t line) {
    if (dims_done) return;
    for (int i = 0; i < 3; ++i)
      if (!dims[i]) throw ProblemError(Kind::Dimension, "[problem] must declare m, n and s before other sections", line, 1);
    spec.m = *dims[0];
    spec.n = *dims[1];
    spec.s = *dims[2];
    f.assign(spec.n, std::nullopt);
    q.assign(spec.s, std::nullopt);
    dims_done = true;
  };

  auto handle_problem = [&](std::string_view body, std::size_t line, std::size_t col0) {
    if (dims_done) throw ProblemError(Kind::Syntax, "dimensions declared after use", line, col0);
    std::size_t i = 0;
    while (i < body.size()) {
      if (std::isspace(static_cast<unsigned char>(body[i]))) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      const char key = body[i++];
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      if ((key != 'm' && key != 'n' && key != 's') || i >= body.size() || body[i] != '=')
        throw ProblemError(Kind::Syntax, "expected m=<nat>, n=<nat> or s=<nat>", line, col0 + start);
      ++i;
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      const std::size_t vstart = i;
      std::size_t value = 0;
      while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        value = value * 10 + static_cast<std::size_t>(body[i] - '0');
        if (value > 1000) throw ProblemError(Kind::Dimension, "dimension too large", line, col0 + vstart);
        ++i;
      }
      if (i == vstart) throw ProblemError(Kind::Syntax, "expected a natural number", line, col0 + vstart);
      const int slot = key == 'm' ? 0 : key == 'n' ? 1 : 2;
      if (dims[slot]) throw ProblemError(Kind::Syntax, std::string("duplicate dimension ") + key, line, col0 + start);
      dims[slot] = value;
    }
  };

  auto handle_function = [&](std::string_view body, std::size_t line, std::size_t col0) {
    require_dims(line);
    const char kind = body[0];
    if (kind != 'f' && kind != 'q') throw ProblemError(Kind::Syntax, "expected f<i> or q<j>", line, col0);
    std::size_t i = 1;
    std::size_t idx = 0;
    while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
      idx = idx * 10 + static_cast<std::size_t>(body[i] - '0');
      ++i;
    }
    if (i == 1 || idx == 0) throw ProblemError(Kind::Syntax, "expected a positive function index", line, col0 + 1);
    const std::size_t limit = kind == 'f' ? spec.n : spec.s;
    if (idx > limit)
      throw ProblemError(Kind::Dimension,
                         std::string(1, kind) + std::to_string(idx) + " exceeds declared " + (kind == 'f' ? "n=" : "s=") + std::to_string(limit),
                         line, col0);
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i >= body.size() || body[i] != '=') throw ProblemError(Kind::Syntax, "expected '='", line, col0 + i);
    ++i;
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i >= body.size() || body[i] != '"') throw ProblemError(Kind::Syntax, "expected a quoted expression", line, col0 + i);
    const std::size_t open = i;
    const std::size_t close = body.find('"', open + 1);
    if (close == std::string_view::npos) throw ProblemError(Kind::Syntax, "unterminated string", line, col0 + open);
    if (!detail::trim(body.substr(close + 1)).empty())
      throw ProblemError(Kind::Syntax, "trailing characters after expression", line, col0 + close + 1);
    auto& slot = kind == 'f' ? f[idx - 1] : q[idx - 1];
    if (slot) throw ProblemError(Kind::Syntax, std::string(1, kind) + std::to_string(idx) + " defined twice", line, col0);
    ExpressionParser parser(spec.layout(), kind == 'q');
    try {
      slot = parser.parse(body.substr(open + 1, close - open - 1));
    } catch (const ExprError& e) {
      throw ProblemError(Kind::Syntax, e.what(), line, col0 + open + e.column());
    }
  };

  auto handle_set = [&](std::string_view body, std::size_t line, std::size_t col0) {
    require_dims(line);
    const bool is_ineq = body.starts_with("ineq:");
    const bool is_eq = body.starts_with("eq:");
    if (!is_ineq && !is_eq) throw ProblemError(Kind::Syntax, "expected 'ineq:' or 'eq:'", line, col0);
    const std::size_t head = is_ineq ? 5 : 3;
    const std::string_view rel = is_ineq ? "<=" : "=";
    const std::size_t at = body.find(rel, head);
    if (at == std::string_view::npos)
      throw ProblemError(Kind::Syntax, std::string("expected '") + std::string(rel) + "'", line, col0 + body.size());
    RatVec coeffs = detail::parse_rat_list(body.substr(head, at - head), line, col0 + head);
    const std::size_t rstart = at + rel.size();
    RatVec rhs = detail::parse_rat_list(body.substr(rstart), line, col0 + rstart);
    if (coeffs.size() != spec.s)
      throw ProblemError(Kind::Dimension,
                         "set row has " + std::to_string(coeffs.size()) + " coefficients, expected s=" + std::to_string(spec.s),
                         line, col0 + head);
    if (rhs.size() != 1) throw ProblemError(Kind::Syntax, "expected one right-hand side", line, col0 + rstart);
    (is_ineq ? ineq_rows : eq_rows).push_back(coeffs);
    (is_ineq ? ineq_rhs : eq_rhs).push_back(rhs[0]);
  };

  auto handle_reference = [&](std::string_view body, std::size_t line, std::size_t col0) {
    require_dims(line);
    const char key = body[0];
    std::size_t i = 1;
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    if ((key != 'p' && key != 'x') || i >= body.size() || body[i] != '=')
      throw ProblemError(Kind::Syntax, "expected 'p = ...' or 'x = ...'", line, col0);
    RatVec v = detail::parse_rat_list(body.substr(i + 1), line, col0 + i + 1);
    const std::size_t want = key == 'p' ? spec.m : spec.n;
    if (v.size() != want)
      throw ProblemError(Kind::Dimension,
                         std::string(1, key) + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(want),
                         line, col0 + i + 1);
    auto& slot = key == 'p' ? pbar : xbar;
    if (slot) throw ProblemError(Kind::Syntax, std::string(1, key) + " given twice", line, col0);
    slot = std::move(v);
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string stripped = detail::strip_comment(raw);
    std::size_t col = 1;
    std::string_view body = detail::trim(stripped, &col);
    if (body.empty()) continue;
    if (body[0] == '[') {
      const std::size_t close = body.find(']');
      if (close == std::string_view::npos) throw ProblemError(Kind::Syntax, "unterminated section header", line, col);
      section = std::string(body.substr(1, close - 1));
      if (section != "problem" && section != "functions" && section != "set" && section != "reference")
        throw ProblemError(Kind::Syntax, "unknown section [" + section + "]", line, col);
      col += close + 1;
      body = detail::trim(body.substr(close + 1), &col);
      if (section != "problem") require_dims(line);
      if (body.empty()) continue;
    }
    if (section.empty()) throw ProblemError(Kind::Syntax, "content outside of a section", line, col);
    if (section == "problem") handle_problem(body, line, col);
    else if (section == "functions") handle_function(body, line, col);
    else if (section == "set") handle_set(body, line, col);
    else handle_reference(body, line, col);
  }

  require_dims(line + 1);
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (!f[i]) throw ProblemError(Kind::Dimension, "missing f" + std::to_string(i + 1));
    spec.f.push_back(*f[i]);
  }
  for (std::size_t j = 0; j < spec.s; ++j) {
    if (!q[j]) throw ProblemError(Kind::Dimension, "missing q" + std::to_string(j + 1));
    spec.q.push_back(*q[j]);
  }
  if (!pbar && spec.m > 0) throw ProblemError(Kind::Dimension, "missing reference p");
  if (!xbar && spec.n > 0) throw ProblemError(Kind::Dimension, "missing reference x");
  spec.pbar = pbar.value_or(RatVec{});
  spec.xbar = xbar.value_or(RatVec{});
  spec.D = HPolyhedron(spec.s, RatMat::from_rows(ineq_rows, spec.s), ineq_rhs, RatMat::from_rows(eq_rows, spec.s), eq_rhs);

  const RatVec qt = spec.qtilde_value();
  if (auto row = spec.D.first_violated_row(qt)) {
    const bool is_ineq = *row < ineq_rows.size();
    const std::size_t k = is_ineq ? *row : *row - ineq_rows.size();
    const RatVec& coeffs = is_ineq ? ineq_rows[k] : eq_rows[k];
    std::string desc = is_ineq ? "ineq:" : "eq:";
    for (const auto& c : coeffs) desc += " " + c.str();
    desc += (is_ineq ? " <= " : " = ") + (is_ineq ? ineq_rhs[k] : eq_rhs[k]).str();
    throw ProblemError(Kind::Infeasible,
                       "reference point infeasible: q~(p,x) = " + to_string(qt) + " violates set row " +
                           std::to_string(*row + 1) + " (" + desc + ")");
  }
  return spec;
}

inline ProblemSpec load_problem(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ProblemError(ProblemError::Kind::Io, "cannot read problem file '" + path.string() + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_problem(buf.str());
}

/// Derivative data at (pbar, xbar). Columns of every (m+n)-wide matrix are
/// ordered p1..pm, x1..xn.
struct PointData {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t s = 0;
  RatVec f_val;
  RatVec qtilde_val;
  RatMat grad_qtilde;
  RatMat b;
  RatMat grad_f;
  std::vector<RatMat> hess_b;

  RatMat grad_qtilde_p() const { return grad_qtilde.block(0, 0, s, m); }
  RatMat grad_qtilde_x() const { return grad_qtilde.block(0, m, s, n); }
  RatMat grad_f_p() const { return grad_f.block(0, 0, n, m); }
  RatMat grad_f_x() const { return grad_f.block(0, m, n, n); }
};

inline PointData point_data(const ProblemSpec& spec) {
  const VariableLayout lay = spec.layout();
  const RatVec z = spec.reference_point();
  const auto collapse = lay.collapse_y();
  const std::size_t w = spec.m + spec.n;
  PointData pd;
  pd.m = spec.m;
  pd.n = spec.n;
  pd.s = spec.s;
  pd.grad_f = RatMat(spec.n, w);
  for (std::size_t i = 0; i < spec.n; ++i) {
    pd.f_val.push_back(spec.f[i].evaluate(z));
    for (std::size_t c = 0; c < w; ++c) pd.grad_f(i, c) = spec.f[i].derivative(c).evaluate(z);
  }
  const auto qt = spec.qtilde();
  pd.grad_qtilde = RatMat(spec.s, w);
  pd.b = RatMat(spec.s, spec.n);
  for (std::size_t i = 0; i < spec.s; ++i) {
    pd.qtilde_val.push_back(qt[i].evaluate(z));
    for (std::size_t c = 0; c < w; ++c) pd.grad_qtilde(i, c) = qt[i].derivative(c).evaluate(z);
    RatMat h(spec.n, w);
    for (std::size_t j = 0; j < spec.n; ++j) {
      const Polynomial btilde = spec.q[i].derivative(lay.y(j)).rename(collapse);
      pd.b(i, j) = btilde.evaluate(z);
      for (std::size_t c = 0; c < w; ++c) h(j, c) = btilde.derivative(c).evaluate(z);
    }
    pd.hess_b.push_back(std::move(h));
  }
  return pd;
}

/// Jacobian of L_lam(p,x) = f(p,x) + b(p,x)^T lam, an n x (m+n) matrix.
inline RatMat lagrangian_gradient(const PointData& pd, const RatVec& lam) {
  if (lam.size() != pd.s) throw std::invalid_argument("lagrangian_gradient: multiplier has wrong dimension");
  RatMat g = pd.grad_f;
  for (std::size_t i = 0; i < pd.s; ++i)
    if (!lam[i].is_zero()) g = g + pd.hess_b[i].scaled(lam[i]);
  return g;
}

}  // namespace aubin
