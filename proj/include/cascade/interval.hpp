#pragma once

// Closed intervals with MPFR endpoints. Every operation rounds the lower
// endpoint toward -inf and the upper endpoint toward +inf, so the true real
// result is always enclosed.

#include <mpfr.h>

#include <algorithm>
#include <string>
#include <utility>

#include "cascade/exact.hpp"

namespace cascade {

inline constexpr mpfr_prec_t kIntervalPrecision = 128;

inline mpfr_prec_t& working_precision() {
  thread_local mpfr_prec_t prec = kIntervalPrecision;
  return prec;
}

// Raises the working precision for the lifetime of the guard. Never lowers it
// below the default.
class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits) : saved_(working_precision()) {
    working_precision() = std::max<mpfr_prec_t>(bits, kIntervalPrecision);
  }
  ~PrecisionScope() { working_precision() = saved_; }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class BigFloat {
 public:
  BigFloat() : BigFloat(working_precision()) {}
  explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept : BigFloat(mpfr_get_prec(o.v_)) { mpfr_swap(v_, o.v_); }
  BigFloat& operator=(BigFloat o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
  long double to_long_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_ld(v_, rnd); }

  std::string str(int digits = 40) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", digits, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

 private:
  mpfr_t v_;
};

// Sets dst to the integer v exactly (precision is large enough for 128 bits).
inline void set_i128(mpfr_ptr dst, i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  auto hi = static_cast<unsigned long>(u >> 64);
  auto lo = static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL);
  mpfr_set_ui(dst, hi, MPFR_RNDN);
  mpfr_mul_2ui(dst, dst, 64, MPFR_RNDN);
  mpfr_add_ui(dst, dst, lo, MPFR_RNDN);
  if (neg) mpfr_neg(dst, dst, MPFR_RNDN);
}

class Interval {
 public:
  Interval() = default;

  static Interval point(i128 v) {
    Interval r;
    set_i128(r.lo_.get(), v);
    set_i128(r.hi_.get(), v);
    return r;
  }
  static Interval point_double(double v) {
    Interval r;
    mpfr_set_d(r.lo_.get(), v, MPFR_RNDD);
    mpfr_set_d(r.hi_.get(), v, MPFR_RNDU);
    return r;
  }
  static Interval rational(i128 num, i128 den) { return point(num) / point(den); }
  static Interval hull(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  const BigFloat& lo() const { return lo_; }
  const BigFloat& hi() const { return hi_; }
  double lower() const { return lo_.to_double(MPFR_RNDD); }
  double upper() const { return hi_.to_double(MPFR_RNDU); }
  BigFloat mid() const {
    BigFloat m;
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m;
  }
  BigFloat width() const {
    BigFloat w;
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    return w;
  }

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a) {
    Interval r;
    mpfr_neg(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
    return r;
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    Interval r;
    BigFloat t;
    const BigFloat* xs[2] = {&a.lo_, &a.hi_};
    const BigFloat* ys[2] = {&b.lo_, &b.hi_};
    mpfr_set_inf(r.lo_.get(), 1);
    mpfr_set_inf(r.hi_.get(), -1);
    for (auto* x : xs) {
      for (auto* y : ys) {
        mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
        mpfr_min(r.lo_.get(), r.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
        mpfr_max(r.hi_.get(), r.hi_.get(), t.get(), MPFR_RNDU);
      }
    }
    return r;
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    require(b.strictly_positive() || b.strictly_negative(), ErrorKind::InvalidInput,
            "interval division by an interval containing zero");
    Interval r;
    BigFloat t;
    const BigFloat* xs[2] = {&a.lo_, &a.hi_};
    const BigFloat* ys[2] = {&b.lo_, &b.hi_};
    mpfr_set_inf(r.lo_.get(), 1);
    mpfr_set_inf(r.hi_.get(), -1);
    for (auto* x : xs) {
      for (auto* y : ys) {
        mpfr_div(t.get(), x->get(), y->get(), MPFR_RNDD);
        mpfr_min(r.lo_.get(), r.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_div(t.get(), x->get(), y->get(), MPFR_RNDU);
        mpfr_max(r.hi_.get(), r.hi_.get(), t.get(), MPFR_RNDU);
      }
    }
    return r;
  }

  Interval abs() const {
    if (mpfr_sgn(lo_.get()) >= 0) return *this;
    if (mpfr_sgn(hi_.get()) <= 0) return -*this;
    Interval r;
    mpfr_set_zero(r.lo_.get(), 1);
    BigFloat nlo;
    mpfr_neg(nlo.get(), lo_.get(), MPFR_RNDU);
    mpfr_max(r.hi_.get(), nlo.get(), hi_.get(), MPFR_RNDU);
    return r;
  }

  // Natural log; monotone so endpoints map directly.
  Interval log() const {
    require(strictly_positive(), ErrorKind::InvalidInput, "log of non-positive interval");
    Interval r;
    mpfr_log(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_log(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
  }
  Interval exp() const {
    Interval r;
    mpfr_exp(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_exp(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
  }
  // x^y for x > 0 via exp(y log x).
  Interval pow(const Interval& y) const { return (y * log()).exp(); }

  bool strictly_positive() const { return mpfr_sgn(lo_.get()) > 0; }
  bool strictly_negative() const { return mpfr_sgn(hi_.get()) < 0; }
  bool contains_zero() const { return !strictly_positive() && !strictly_negative(); }
  bool is_point() const { return mpfr_equal_p(lo_.get(), hi_.get()) != 0; }

  // True only when every point of *this is <= every point of o.
  bool certainly_le(const Interval& o) const { return mpfr_lessequal_p(hi_.get(), o.lo_.get()) != 0; }
  bool certainly_lt(const Interval& o) const { return mpfr_less_p(hi_.get(), o.lo_.get()) != 0; }

 private:
  BigFloat lo_;
  BigFloat hi_;
};

}  // namespace cascade
