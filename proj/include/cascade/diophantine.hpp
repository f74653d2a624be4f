#pragma once

// Continued fractions, convergents and rigorous psi-approximation tests.
//
// A frequency omega is never held as a bare float. It is a digit list plus a
// description of what follows the last listed digit:
//   Terminated  the expansion ends; omega is the rational value of the digits
//   Periodic    digits[period_start..] repeat forever (quadratic irrationals)
//   Open        the complete quotient after the last digit is some real number
//               >= tail_min (unknown continuation)
// Every numeric statement about omega is made on an interval enclosure that is
// valid for all admissible continuations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cascade/error.hpp"
#include "cascade/exact.hpp"
#include "cascade/interval.hpp"
#include "cascade/random.hpp"

namespace cascade {

struct Convergent {
  i128 p = 0;
  i128 q = 1;

  friend bool operator==(const Convergent&, const Convergent&) = default;
};

enum class TailKind { Terminated, Periodic, Open };

struct ContinuedFraction {
  std::vector<i128> digits;
  TailKind tail = TailKind::Open;
  std::size_t period_start = 0;
  i128 tail_min = 1;

  bool has_digit(std::size_t n) const { return tail == TailKind::Periodic || n < digits.size(); }

  i128 digit(std::size_t n) const {
    if (n < digits.size()) return digits[n];
    require(tail == TailKind::Periodic, ErrorKind::InvalidInput, "continued fraction has no digit at this depth");
    const std::size_t period = digits.size() - period_start;
    return digits[period_start + (n - period_start) % period];
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (tail == TailKind::Periodic && i == period_start) os << "(";
      os << cascade::to_string(digits[i]);
      if (i + 1 < digits.size()) os << (i == 0 ? ";" : ",");
    }
    if (tail == TailKind::Periodic) os << ")";
    if (tail == TailKind::Open) os << ",...";
    return os.str();
  }
};

// psi(q) = 1/(q log q) (Log) or c/q^(1+tau) (Power).
struct ApproxFunction {
  enum class Kind { Log, Power };

  Kind kind = Kind::Log;
  double c = 1.0;
  double tau = 0.0;

  static ApproxFunction log_kind() { return {Kind::Log, 1.0, 0.0}; }
  static ApproxFunction power(double c, double tau) { return {Kind::Power, c, tau}; }

  double operator()(double q) const {
    if (kind == Kind::Log) return q <= 1.0 ? INFINITY : 1.0 / (q * std::log(q));
    return c / std::pow(q, 1.0 + tau);
  }

  // Enclosure of psi(q); log kind at q = 1 is infinite and handled by callers.
  Interval enclose(i128 q) const {
    Interval iq = Interval::point(q);
    if (kind == Kind::Log) return Interval::point(1) / (iq * iq.log());
    return Interval::point_double(c) / iq.pow(Interval::point(1) + Interval::point_double(tau));
  }

  std::string str() const {
    std::ostringstream os;
    if (kind == Kind::Log) {
      os << "1/(q log q)";
    } else {
      os << c << "/q^(1+" << tau << ")";
    }
    return os.str();
  }
};

namespace detail {

inline int bit_length(i128 v) {
  int bits = 0;
  for (i128 x = abs128(v); x != 0; x >>= 1) ++bits;
  return bits;
}

}  // namespace detail

/// Enclosure of the complete quotient x_k = [a_k; a_{k+1}, ...]. For k = 0 this
/// is omega itself.
inline Interval complete_quotient(const ContinuedFraction& cf, std::size_t k = 0) {
  require(!cf.digits.empty(), ErrorKind::InvalidInput, "empty continued fraction");
  std::size_t last = 0;
  Interval reciprocal_tail;  // enclosure of 1 / x_{last+1}
  switch (cf.tail) {
    case TailKind::Terminated:
      require(k < cf.digits.size(), ErrorKind::InvalidInput, "complete quotient past a terminated expansion");
      last = cf.digits.size() - 1;
      reciprocal_tail = Interval::point(0);
      break;
    case TailKind::Open:
      require(k < cf.digits.size(), ErrorKind::InvalidInput, "complete quotient past the known digits");
      last = cf.digits.size() - 1;
      reciprocal_tail = Interval::hull(Interval::point(0), Interval::rational(1, std::max<i128>(cf.tail_min, 1)));
      break;
    case TailKind::Periodic:
      // Each extra digit shrinks the enclosure by at least the golden ratio squared.
      last = std::max(k, cf.digits.size()) + static_cast<std::size_t>(working_precision()) + 8;
      reciprocal_tail = Interval::hull(Interval::point(0), Interval::point(1));
      break;
  }
  Interval y = Interval::point(cf.digit(last)) + reciprocal_tail;
  for (std::size_t i = last; i-- > k;) {
    y = Interval::point(cf.digit(i)) + Interval::point(1) / y;
  }
  return y;
}

inline Interval omega_enclosure(const ContinuedFraction& cf) { return complete_quotient(cf, 0); }

inline double omega_value(const ContinuedFraction& cf) { return omega_enclosure(cf).mid().to_double(); }

inline long double omega_value_ld(const ContinuedFraction& cf) {
  return omega_enclosure(cf).mid().to_long_double();
}

/// Continued-fraction digits of a finite double x >= 1, computed by an exact
/// Euclidean algorithm on the dyadic rational that x represents.
inline ContinuedFraction expand(double x, std::size_t depth) {
  require(std::isfinite(x), ErrorKind::InvalidInput, "expand: non-finite input");
  require(x >= 1.0, ErrorKind::InvalidInput, "expand: input must be >= 1");
  require(depth >= 1, ErrorKind::InvalidInput, "expand: depth must be >= 1");
  int exp2 = 0;
  const double mant = std::frexp(x, &exp2);  // x = mant * 2^exp2, mant in [0.5, 1)
  const auto m = static_cast<i128>(std::ldexp(mant, 53));
  int e = exp2 - 53;
  i128 num = m;
  i128 den = 1;
  if (e >= 0) {
    require(e < 70, ErrorKind::CapacityExceeded, "expand: input too large for exact expansion");
    num = m << e;
  } else {
    den = static_cast<i128>(1) << (-e);
  }
  ContinuedFraction cf;
  cf.tail = TailKind::Open;
  while (cf.digits.size() < depth) {
    const i128 a = num / den;
    cf.digits.push_back(a);
    const i128 r = num - a * den;
    if (r == 0) {
      cf.tail = TailKind::Terminated;
      break;
    }
    num = den;
    den = r;
  }
  return cf;
}

/// Exact expansion of a positive rational.
inline ContinuedFraction expand_rational(i128 num, i128 den) {
  require(den > 0 && num >= den, ErrorKind::InvalidInput, "expand_rational: need num >= den > 0");
  ContinuedFraction cf;
  cf.tail = TailKind::Terminated;
  while (den != 0) {
    const i128 a = num / den;
    cf.digits.push_back(a);
    const i128 r = num - a * den;
    num = den;
    den = r;
  }
  return cf;
}

/// Convergents of levels 0..count-1 by the standard three-term recurrence.
inline std::vector<Convergent> convergents(const ContinuedFraction& cf, std::size_t count) {
  require(count >= 1, ErrorKind::InvalidInput, "convergents: count must be >= 1");
  require(cf.has_digit(count - 1), ErrorKind::InvalidInput, "convergents: not enough digits");
  std::vector<Convergent> out;
  out.reserve(count);
  i128 p_prev = 1, q_prev = 0, p = cf.digit(0), q = 1;
  out.push_back({p, q});
  for (std::size_t n = 1; n < count; ++n) {
    const i128 a = cf.digit(n);
    const i128 p_next = checked_add(checked_mul(a, p), p_prev);
    const i128 q_next = checked_add(checked_mul(a, q), q_prev);
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    out.push_back({p, q});
  }
  return out;
}

/// All convergents available without leaving the exact-integer range, capped
/// at max_count levels.
inline std::vector<Convergent> available_convergents(const ContinuedFraction& cf, std::size_t max_count) {
  std::vector<Convergent> out;
  if (max_count == 0 || !cf.has_digit(0)) return out;
  i128 p_prev = 1, q_prev = 0, p = cf.digit(0), q = 1;
  out.push_back({p, q});
  for (std::size_t n = 1; n < max_count && cf.has_digit(n); ++n) {
    const i128 a = cf.digit(n);
    i128 ap, aq, p_next, q_next;
    if (__builtin_mul_overflow(a, p, &ap) || __builtin_add_overflow(ap, p_prev, &p_next) ||
        __builtin_mul_overflow(a, q, &aq) || __builtin_add_overflow(aq, q_prev, &q_next)) {
      break;
    }
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    out.push_back({p, q});
  }
  return out;
}

/// Enclosure of |omega - p/q|. When (p, q) is a convergent of the expansion
/// the error is formed from the complete quotient, which avoids cancellation;
/// otherwise a direct subtraction is done at a precision scaled to q.
inline Interval approximation_error(const ContinuedFraction& cf, const Convergent& c) {
  require(c.q > 0, ErrorKind::InvalidInput, "approximation_error: q must be positive");
  const auto levels = available_convergents(cf, 4096);
  for (std::size_t n = 0; n < levels.size(); ++n) {
    if (levels[n].q > c.q) break;
    if (levels[n] != c) continue;
    if (cf.tail == TailKind::Terminated && n + 1 >= cf.digits.size()) return Interval::point(0);
    const i128 q_prev = n == 0 ? 0 : levels[n - 1].q;
    const Interval iq = Interval::point(c.q);
    if (cf.tail == TailKind::Open && n + 1 >= cf.digits.size()) {
      // x_{n+1} is only known to lie in [tail_min, inf)
      const Interval x_min = Interval::point(std::max<i128>(cf.tail_min, 1));
      return Interval::hull(Interval::point(0), Interval::point(1) / (iq * (x_min * iq + Interval::point(q_prev))));
    }
    const Interval x_next = complete_quotient(cf, n + 1);
    return Interval::point(1) / (iq * (x_next * iq + Interval::point(q_prev)));
  }
  PrecisionScope scope(kIntervalPrecision + 8 * detail::bit_length(c.q) + 64);
  return (omega_enclosure(cf) - Interval::rational(c.p, c.q)).abs();
}

/// Rigorous test of |omega - p/q| <= psi(q)/q. Returns true only when the
/// inequality holds for every point of the enclosures.
inline bool certify(const ContinuedFraction& cf, const Convergent& c, const ApproxFunction& psi) {
  if (psi.kind == ApproxFunction::Kind::Log && c.q == 1) return true;
  const int bits = detail::bit_length(c.q);
  PrecisionScope scope(kIntervalPrecision + bits * (4 + 2 * static_cast<int>(std::ceil(psi.tau))));
  const Interval err = approximation_error(cf, c);
  const Interval bound = psi.enclose(c.q) / Interval::point(c.q);
  return err.certainly_le(bound);
}

/// 2^-1 omega q <= p <= 2 omega q.
inline bool monza_bracket_holds(const ContinuedFraction& cf, const Convergent& c) {
  const Interval w = omega_enclosure(cf);
  const Interval wq = w * Interval::point(c.q);
  const Interval p = Interval::point(c.p);
  return (wq / Interval::point(2)).certainly_le(p) && p.certainly_le(wq * Interval::point(2));
}

/// |omega - p/q| >= q^-(1 + log q), checked on a single convergent.
inline bool lower_diophantine_holds(const ContinuedFraction& cf, const Convergent& c) {
  if (c.q < 2) return true;
  PrecisionScope scope(kIntervalPrecision + 16 * detail::bit_length(c.q));
  const Interval iq = Interval::point(c.q);
  const Interval bound = iq.pow(-(Interval::point(1) + iq.log()));
  return bound.certainly_le(approximation_error(cf, c));
}

namespace detail {

// ceil(q^tau / c); exact for integral tau and c, otherwise a rigorous upper
// ceiling (never below the true value).
inline i128 min_digit(i128 q, const ApproxFunction& psi) {
  const bool integral = psi.tau == std::floor(psi.tau) && psi.c == std::floor(psi.c) && psi.tau <= 64;
  if (integral) {
    i128 num = 1;
    for (int i = 0; i < static_cast<int>(psi.tau); ++i) num = checked_mul(num, q);
    const auto c = static_cast<i128>(psi.c);
    return std::max<i128>(1, (num + c - 1) / c);
  }
  PrecisionScope scope(kIntervalPrecision + 4 * bit_length(q) * (2 + static_cast<int>(std::ceil(psi.tau))));
  const Interval v = Interval::point(q).pow(Interval::point_double(psi.tau)) / Interval::point_double(psi.c);
  BigFloat up;
  mpfr_ceil(up.get(), v.hi().get());
  require(mpfr_cmp_d(up.get(), 0x1.0p125) < 0, ErrorKind::CapacityExceeded,
          "synthesize: required digit leaves the exact-integer range");
  BigFloat hi;
  mpfr_div_2ui(hi.get(), up.get(), 64, MPFR_RNDZ);
  mpfr_floor(hi.get(), hi.get());
  BigFloat lo;
  mpfr_mul_2ui(lo.get(), hi.get(), 64, MPFR_RNDN);
  mpfr_sub(lo.get(), up.get(), lo.get(), MPFR_RNDN);
  const i128 result = (static_cast<i128>(mpfr_get_uj(hi.get(), MPFR_RNDN)) << 64) +
                      static_cast<i128>(mpfr_get_uj(lo.get(), MPFR_RNDN));
  return std::max<i128>(1, result);
}

}  // namespace detail

/// Builds a frequency in W(psi) for power-kind psi. Each digit a_{n+1} is the
/// smallest integer with q_{n+1} >= a_{n+1} q_n >= 1/psi(q_n), so every
/// convergent satisfies |omega - p_n/q_n| < 1/(q_n q_{n+1}) <= psi(q_n)/q_n.
/// The result has digits a_0..a_depth and an open tail whose next complete
/// quotient is bounded below by the same rule. `jitter` adds a seeded
/// 0..jitter to each digit; the default picks the lowest admissible digit.
inline ContinuedFraction synthesize(const ApproxFunction& psi, std::uint64_t seed, std::size_t depth,
                                    std::int64_t jitter = 0) {
  require(psi.kind == ApproxFunction::Kind::Power, ErrorKind::InvalidInput, "synthesize: power-kind psi required");
  require(psi.tau > 0.0 && std::isfinite(psi.tau), ErrorKind::InvalidInput, "synthesize: tau must be > 0");
  require(psi.c >= 1.0, ErrorKind::InvalidInput, "synthesize: c must be >= 1");
  require(depth >= 1, ErrorKind::InvalidInput, "synthesize: depth must be >= 1");
  require(jitter >= 0, ErrorKind::InvalidInput, "synthesize: jitter must be >= 0");
  SplitMix64 rng(seed);
  ContinuedFraction cf;
  cf.tail = TailKind::Open;
  cf.digits.push_back(1 + rng.uniform_int(0, 2));
  i128 q_prev = 0, q = 1;
  for (std::size_t n = 0; n < depth; ++n) {
    const i128 a = checked_add(detail::min_digit(q, psi), jitter > 0 ? rng.uniform_int(0, jitter) : 0);
    cf.digits.push_back(a);
    const i128 q_next = checked_add(checked_mul(a, q), q_prev);
    q_prev = q;
    q = q_next;
  }
  cf.tail_min = detail::min_digit(q, psi);
  return cf;
}

/// Per-level check of q_n^(1+tau) - q_n <= q_{n+1} <= q_n^(log q_n).
struct GrowthLevel {
  Convergent conv;
  bool lower_ok = false;
  bool upper_ok = false;
};

inline std::vector<GrowthLevel> growth_bracket(const ContinuedFraction& cf, double tau) {
  const auto cs = available_convergents(cf, cf.digits.size());
  std::vector<GrowthLevel> out;
  for (std::size_t n = 0; n + 1 < cs.size(); ++n) {
    const long double q = static_cast<long double>(cs[n].q);
    const long double qn = static_cast<long double>(cs[n + 1].q);
    GrowthLevel lvl{cs[n]};
    lvl.lower_ok = std::pow(q, 1.0L + tau) - q <= qn * (1.0L + 1e-15L);
    lvl.upper_ok = std::log(qn) <= std::log(q) * std::log(q) * (1.0L + 1e-15L);
    out.push_back(lvl);
  }
  return out;
}

struct ScalingRequest {
  double L_min = 1.0;
  int N = 2;
  double R = 1.0;
  double sup_V = 0.0;
  double c_universal = 0.125;
  bool enforce_assumption = true;
  std::size_t max_levels = 512;
};

struct ScalingChoice {
  Convergent conv;
  std::size_t level = 0;
  bool certified = false;
  double L = 0.0;               // omega^2 q^2 / 8 - 4 sup|V|
  double assumption_lhs = 0.0;  // 3^{2N} R^2 psi(q) / q
  double assumption_rhs = 0.0;  // c
};

inline double scaling_L(double omega, i128 q, double sup_V) {
  const double qd = static_cast<double>(q);
  return omega * omega * qd * qd / 8.0 - 4.0 * sup_V;
}

inline double assumption_lhs(int N, double R, const ApproxFunction& psi, i128 q) {
  const double qd = static_cast<double>(q);
  return std::pow(3.0, 2.0 * N) * R * R * psi(qd) / qd;
}

/// Smallest certified psi-convergent whose L reaches L_min and, when
/// requested, that satisfies 3^{2N} R^2 psi(q)/q <= c.
inline ScalingChoice select_scaling(const ContinuedFraction& cf, const ApproxFunction& psi,
                                    const ScalingRequest& req) {
  const double omega = omega_value(cf);
  const auto cs = available_convergents(cf, req.max_levels);
  for (std::size_t n = 0; n < cs.size(); ++n) {
    const Convergent& c = cs[n];
    ScalingChoice choice{c, n};
    choice.L = scaling_L(omega, c.q, req.sup_V);
    choice.assumption_lhs = assumption_lhs(req.N, req.R, psi, c.q);
    choice.assumption_rhs = req.c_universal;
    if (choice.L < req.L_min) continue;
    if (req.enforce_assumption && !(choice.assumption_lhs <= req.c_universal)) continue;
    choice.certified = certify(cf, c, psi);
    if (!choice.certified) continue;
    return choice;
  }
  fail(ErrorKind::NoConvergentInRange, "no certified convergent meets the scaling conditions within " +
                                           std::to_string(cs.size()) + " exact levels");
}

/// Parses an omega specification:
///   golden | sqrt2 | sqrt3 | silver   periodic presets
///   p/q                                exact rational (terminated)
///   a0;a1,a2,...                       digit list with an open tail
///   a0;a1,(a2,a3)                      digits with a periodic block
inline ContinuedFraction parse_omega(const std::string& text) {
  auto periodic = [](std::vector<i128> d, std::size_t start) {
    ContinuedFraction cf;
    cf.digits = std::move(d);
    cf.tail = TailKind::Periodic;
    cf.period_start = start;
    return cf;
  };
  if (text == "golden") return periodic({1}, 0);
  if (text == "sqrt2") return periodic({1, 2}, 1);
  if (text == "sqrt3") return periodic({1, 1, 2}, 1);
  if (text == "silver") return periodic({2}, 0);
  if (auto slash = text.find('/'); slash != std::string::npos) {
    return expand_rational(parse_i128(text.substr(0, slash)), parse_i128(text.substr(slash + 1)));
  }
  ContinuedFraction cf;
  cf.tail = TailKind::Open;
  std::string token;
  bool in_period = false;
  auto flush = [&]() {
    if (token.empty()) return;
    cf.digits.push_back(parse_i128(token));
    token.clear();
  };
  for (char ch : text) {
    if (ch == ';' || ch == ',' || ch == ' ') {
      flush();
    } else if (ch == '(') {
      flush();
      require(!in_period, ErrorKind::InvalidInput, "nested period in omega text");
      in_period = true;
      cf.tail = TailKind::Periodic;
      cf.period_start = cf.digits.size();
    } else if (ch == ')') {
      flush();
      require(in_period, ErrorKind::InvalidInput, "unbalanced ')' in omega text");
    } else {
      token.push_back(ch);
    }
  }
  flush();
  require(!cf.digits.empty(), ErrorKind::InvalidInput, "omega '" + text + "' has no digits");
  require(cf.digits[0] >= 1, ErrorKind::InvalidInput, "omega must be >= 1 (a0 >= 1)");
  for (std::size_t i = 1; i < cf.digits.size(); ++i) {
    require(cf.digits[i] >= 1, ErrorKind::InvalidInput, "continued-fraction digits must be >= 1");
  }
  if (cf.tail == TailKind::Periodic) {
    require(cf.period_start < cf.digits.size(), ErrorKind::InvalidInput, "empty periodic block");
  }
  return cf;
}

}  // namespace cascade
