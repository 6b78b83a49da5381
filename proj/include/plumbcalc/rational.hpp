#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "plumbcalc/errors.hpp"

namespace plumbcalc {

// Exact rational scalar used throughout the core.  Backed by int64 with
// __int128 intermediates; any result that would leave the int64 range throws
// OverflowError instead of wrapping.  Always normalized: den > 0, gcd = 1.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  template <typename T, typename = std::enable_if_t<std::is_integral_v<T>>>
  Rational(T n) : num_(static_cast<long long>(n)), den_(1) {}  // NOLINT
  Rational(long long n, long long d) { assign(n, d); }

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sgn() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw InvalidParamsError("rational division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  // Largest integer <= value.
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  long long ceil() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }
  // Nearest integer, halves toward +infinity (deterministic tie rule).
  long long round_half_up() const { return (*this + Rational(1, 2)).floor(); }

  // "p" for integers, "p/q" otherwise; parses both forms back.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  static Rational parse(std::string_view s);

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  using i128 = __int128;

  void assign(long long n, long long d) {
    if (d == 0) throw InvalidParamsError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    num_ = n;
    den_ = d;
  }

  static Rational from_i128(i128 n, i128 d) {
    if (d == 0) throw InvalidParamsError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr i128 lo = i128(INT64_MIN), hi = i128(INT64_MAX);
    if (n < lo || n > hi || d > hi) throw OverflowError("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  long long num_;
  long long den_;
};

inline Rational Rational::parse(std::string_view s) {
  auto bad = [&] { throw ParseError("not a rational: '" + std::string(s) + "'"); };
  if (s.empty()) bad();
  // Accept "p", "p/q" and plain decimals like "0.25" (converted exactly).
  size_t slash = s.find('/');
  size_t dot = s.find('.');
  try {
    if (slash != std::string_view::npos) {
      if (dot != std::string_view::npos) bad();
      size_t pos1 = 0, pos2 = 0;
      long long n = std::stoll(std::string(s.substr(0, slash)), &pos1);
      long long d = std::stoll(std::string(s.substr(slash + 1)), &pos2);
      if (pos1 != slash || pos2 != s.size() - slash - 1) bad();
      if (d == 0) bad();
      return Rational(n, d);
    }
    if (dot != std::string_view::npos) {
      std::string head(s.substr(0, dot)), tail(s.substr(dot + 1));
      if (tail.empty() || tail.size() > 12) bad();
      for (char c : tail)
        if (c < '0' || c > '9') bad();
      size_t pos = 0;
      long long ip = head.empty() || head == "-" ? 0 : std::stoll(head, &pos);
      if (!(head.empty() || head == "-") && pos != head.size()) bad();
      long long den = 1;
      for (size_t i = 0; i < tail.size(); ++i) den *= 10;
      long long frac = tail.empty() ? 0 : std::stoll(tail);
      bool neg = !head.empty() && head[0] == '-';
      Rational r = Rational(ip < 0 ? -ip : ip) + Rational(frac, den);
      return (neg || ip < 0) ? -r : r;
    }
    size_t pos = 0;
    long long n = std::stoll(std::string(s), &pos);
    if (pos != s.size()) bad();
    return Rational(n);
  } catch (const std::invalid_argument&) {
    bad();
  } catch (const std::out_of_range&) {
    throw OverflowError("rational literal out of range: '" + std::string(s) + "'");
  }
  return Rational();  // unreachable
}

inline Rational abs(const Rational& r) { return r.abs(); }

// Checked integer helpers shared by the exact linear algebra.
inline long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer addition overflow");
  return r;
}
inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer multiplication overflow");
  return r;
}

}  // namespace plumbcalc
