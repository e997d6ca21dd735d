#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aubin {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number kept in lowest terms with a positive denominator.
///
/// Text form: optional sign, decimal integer, optional "/" and a positive
/// decimal integer ("25/16", "-1", "0"). No decimal points or exponents.
class Rat {
 public:
  Rat() = default;
  Rat(std::int64_t value) : v_(value) {}  // NOLINT(google-explicit-constructor)
  explicit Rat(const BigInt& value) : v_(value) {}
  Rat(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    v_ = Impl(num);
    v_ /= Impl(den);
  }

  static Rat parse(std::string_view text) {
    std::size_t pos = 0;
    Rat r = parse_prefix(text, pos);
    if (pos != text.size()) throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
    return r;
  }

  /// Parses a rational literal starting at `pos`; advances `pos` past it.
  static Rat parse_prefix(std::string_view text, std::size_t& pos) {
    const std::size_t start = pos;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      negative = text[pos] == '-';
      ++pos;
    }
    BigInt num = read_digits(text, pos, start);
    BigInt den = 1;
    if (pos < text.size() && text[pos] == '/') {
      ++pos;
      den = read_digits(text, pos, start);
      if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text.substr(start)) + "'");
    }
    if (negative) num = -num;
    return Rat(num, den);
  }

  BigInt num() const { return boost::multiprecision::numerator(v_); }
  BigInt den() const { return boost::multiprecision::denominator(v_); }
  int sign() const { return v_.sign(); }
  bool is_zero() const { return v_.is_zero(); }
  bool is_integer() const { return den() == 1; }

  std::string str() const {
    if (is_integer()) return num().str();
    return num().str() + "/" + den().str();
  }

  Rat operator-() const { return Rat(Impl(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

  std::size_t hash() const { return std::hash<std::string>{}(str()); }

 private:
  using Impl = boost::multiprecision::cpp_rational;
  explicit Rat(Impl v) : v_(std::move(v)) {}

  static BigInt read_digits(std::string_view text, std::size_t& pos, std::size_t start) {
    const std::size_t first = pos;
    BigInt value = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      value = value * 10 + (text[pos] - '0');
      ++pos;
    }
    if (pos == first) throw std::invalid_argument("expected digits in rational literal '" + std::string(text.substr(start)) + "'");
    return value;
  }

  Impl v_;
};

inline Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }

}  // namespace aubin
