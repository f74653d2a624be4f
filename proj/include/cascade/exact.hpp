#pragma once

// Overflow-checked 128-bit integers and a small exact rational built on them.

#include <cstdint>
#include <numeric>
#include <string>

#include "cascade/error.hpp"

namespace cascade {

using i128 = __int128;

inline i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::CapacityExceeded, "128-bit addition overflow");
  return r;
}

inline i128 checked_sub(i128 a, i128 b) {
  i128 r;
  if (__builtin_sub_overflow(a, b, &r)) fail(ErrorKind::CapacityExceeded, "128-bit subtraction overflow");
  return r;
}

inline i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::CapacityExceeded, "128-bit multiplication overflow");
  return r;
}

inline i128 abs128(i128 a) { return a < 0 ? checked_sub(0, a) : a; }

inline i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Work on the negative side so INT128_MIN does not overflow.
  std::string out;
  i128 x = neg ? v : -v;
  while (x != 0) {
    int digit = -static_cast<int>(x % 10);
    out.push_back(static_cast<char>('0' + digit));
    x /= 10;
  }
  if (neg) out.push_back('-');
  return {out.rbegin(), out.rend()};
}

inline i128 parse_i128(const std::string& s) {
  require(!s.empty(), ErrorKind::InvalidInput, "empty integer literal");
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  require(i < s.size(), ErrorKind::InvalidInput, "bad integer literal '" + s + "'");
  i128 v = 0;
  for (; i < s.size(); ++i) {
    require(s[i] >= '0' && s[i] <= '9', ErrorKind::InvalidInput, "bad integer literal '" + s + "'");
    v = checked_add(checked_mul(v, 10), s[i] - '0');
  }
  return neg ? -v : v;
}

inline long double to_long_double(i128 v) { return static_cast<long double>(v); }

// Normalized num/den with den > 0 and gcd(num, den) = 1.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(i128 num) : num_(num), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(i128 num, i128 den) : num_(num), den_(den) {
    require(den != 0, ErrorKind::InvalidInput, "zero denominator");
    normalize();
  }

  i128 num() const { return num_; }
  i128 den() const { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    i128 g = gcd128(a.den_, b.den_);
    i128 da = a.den_ / g;
    i128 db = b.den_ / g;
    return {checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da)), checked_mul(a.den_, db)};
  }
  friend Rational operator-(const Rational& a) { return {checked_sub(0, a.num_), a.den_}; }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    i128 g1 = gcd128(a.num_, b.den_);
    i128 g2 = gcd128(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return {checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1)};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    require(b.num_ != 0, ErrorKind::InvalidInput, "division by zero rational");
    return a * Rational(b.den_, b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(const Rational& a, const Rational& b) {
    return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

  bool is_zero() const { return num_ == 0; }
  long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }
  double to_double() const { return static_cast<double>(to_long_double()); }
  std::string str() const {
    return den_ == 1 ? cascade::to_string(num_) : cascade::to_string(num_) + "/" + cascade::to_string(den_);
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = checked_sub(0, num_);
      den_ = checked_sub(0, den_);
    }
    i128 g = gcd128(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  i128 num_ = 0;
  i128 den_ = 1;
};

}  // namespace cascade
