#pragma once

// Resonance functionals Omega_w, Omega_V, Omega_{w,V} on momentum quadruples,
// the classes A(d), and the extremal divisors L_k, U_k.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "cascade/diophantine.hpp"
#include "cascade/error.hpp"
#include "cascade/exact.hpp"
#include "cascade/interval.hpp"
#include "cascade/lambda_set.hpp"
#include "cascade/lattice.hpp"

namespace cascade {

/// omega with a cached high-precision value; `rational` is set when the
/// expansion terminates.
struct Frequency {
  ContinuedFraction cf;
  BigFloat hp{256};
  double value = 1.0;
  long double value_ld = 1.0L;
  std::optional<Rational> rational;
};

inline Frequency make_frequency(const ContinuedFraction& cf) {
  Frequency f;
  f.cf = cf;
  {
    PrecisionScope scope(320);
    const Interval w = omega_enclosure(cf);
    const BigFloat mid = w.mid();
    mpfr_set(f.hp.get(), mid.get(), MPFR_RNDN);
  }
  f.value = f.hp.to_double();
  f.value_ld = f.hp.to_long_double();
  if (cf.tail == TailKind::Terminated) {
    const auto c = convergents(cf, cf.digits.size()).back();
    f.rational = Rational(c.p, c.q);
  }
  return f;
}

inline Frequency make_frequency(const Rational& r) { return make_frequency(expand_rational(r.num(), r.den())); }

/// Quadruple with the momentum relation n1 - n2 + n3 - n4 = 0.
inline Quad make_quadruple(const Mode& n1, const Mode& n2, const Mode& n3, const Mode& n4) {
  require(n1 - n2 + n3 - n4 == Mode{}, ErrorKind::InvalidInput, "quadruple violates n1 - n2 + n3 - n4 = 0");
  return {n1, n2, n3, n4};
}

inline Quad complete_quadruple(const Mode& n1, const Mode& n2, const Mode& n3) { return {n1, n2, n3, n1 - n2 + n3}; }

struct OmegaValues {
  double omega = 0.0;  // Omega_w
  double V = 0.0;      // Omega_V
  double total = 0.0;  // Omega_{w,V}
};

/// Definition path: sum of +-|n_i|^2_w.
inline double omega_definition(const Quad& n, double w) {
  return eigenvalue(n[0], w) - eigenvalue(n[1], w) + eigenvalue(n[2], w) - eigenvalue(n[3], w);
}

inline Rational omega_definition(const Quad& n, const Rational& w) {
  return eigenvalue(n[0], w) - eigenvalue(n[1], w) + eigenvalue(n[2], w) - eigenvalue(n[3], w);
}

/// Parallelogram identity path: 2 <n1 - n2, n2 - n3>_w.
inline double omega_identity(const Quad& n, double w) { return 2.0 * dot_omega(n[0] - n[1], n[1] - n[2], w); }

inline Rational omega_identity(const Quad& n, const Rational& w) {
  return Rational(2) * dot_omega(n[0] - n[1], n[1] - n[2], w);
}

/// Omega_w through the identity with omega at 256+ bits; no cancellation
/// issues for near-resonant families with large modes.
inline long double omega_precise(const Quad& n, const Frequency& f) {
  const Mode a = n[0] - n[1];
  const Mode b = n[1] - n[2];
  BigFloat jj(320), kk(320), w2(320);
  set_i128(jj.get(), checked_mul(a.j, b.j));
  set_i128(kk.get(), checked_mul(a.k, b.k));
  mpfr_sqr(w2.get(), f.hp.get(), MPFR_RNDN);
  mpfr_fma(jj.get(), w2.get(), kk.get(), jj.get(), MPFR_RNDN);
  mpfr_mul_2ui(jj.get(), jj.get(), 1, MPFR_RNDN);
  return jj.to_long_double();
}

inline double omega_V(const Quad& n, const PotentialSpec& V) {
  return potential_coeff(V, n[0]) - potential_coeff(V, n[1]) + potential_coeff(V, n[2]) - potential_coeff(V, n[3]);
}

inline OmegaValues omega_values(const Quad& n, double w, const PotentialSpec& V) {
  OmegaValues r;
  r.omega = omega_identity(n, w);
  r.V = omega_V(n, V);
  r.total = r.omega + r.V;
  return r;
}

inline OmegaValues omega_values(const Quad& n, const Frequency& f, const PotentialSpec& V) {
  OmegaValues r;
  if (f.rational) {
    r.omega = omega_identity(n, *f.rational).to_double();
  } else {
    r.omega = static_cast<double>(omega_precise(n, f));
  }
  r.V = omega_V(n, V);
  r.total = r.omega + r.V;
  return r;
}

/// Number of members outside the set.
inline int classify(const Quad& n, const std::unordered_set<Mode, detail::ModeHash>& lambda) {
  int d = 0;
  for (const auto& m : n) d += lambda.count(m) ? 0 : 1;
  return d;
}

inline std::unordered_set<Mode, detail::ModeHash> mode_set(const std::vector<Mode>& modes) {
  return {modes.begin(), modes.end()};
}

inline int classify(const Quad& n, const PlacedSet& ps) { return classify(n, mode_set(ps.all_modes())); }

// ---------------------------------------------------------------------------
// L_1

struct L1Estimate {
  double value = 0.0;
  Quad witness{};
  std::size_t admissible = 0;       // quadruples enumerated in A(1) with |n4| <= box
  std::size_t outside_box = 0;      // completions discarded by the box
  double max_completion = 0.0;      // largest |n4| over all completions
  double box = 0.0;
  bool exhaustive = false;          // max_completion <= box: every A(1) element was seen
};

/// Exhaustive minimum of |Omega_{w,V}| over A(1). Up to the symmetries
/// (n1<->n3, n2<->n4, and (n1,n2,n3,n4) -> (n2,n1,n4,n3) which flips the
/// sign) every element of A(1) has its off-set member in slot 4, so ordered
/// triples of the set with n4 = n1 - n2 + n3 outside it cover the class.
/// Since |n4| <= |n1| + |n2| + |n3|, the search is exhaustive whenever the
/// box contains every completion; the report carries this certificate.
inline L1Estimate estimate_L1(const std::vector<Mode>& lambda, const Frequency& f, const PotentialSpec& V, double box) {
  const auto in = mode_set(lambda);
  L1Estimate est;
  est.box = box;
  est.value = std::numeric_limits<double>::infinity();
  for (const auto& n1 : lambda)
    for (const auto& n2 : lambda)
      for (const auto& n3 : lambda) {
        const Mode n4 = n1 - n2 + n3;
        if (in.count(n4)) continue;
        est.max_completion = std::max(est.max_completion, n4.norm());
        if (n4.norm() > box) {
          ++est.outside_box;
          continue;
        }
        ++est.admissible;
        const Quad qd{n1, n2, n3, n4};
        const double v = std::fabs(omega_values(qd, f, V).total);
        if (v < est.value) {
          est.value = v;
          est.witness = qd;
        }
      }
  require(est.admissible > 0, ErrorKind::EmptyClass, "no quadruple of A(1) inside the box");
  est.exhaustive = est.outside_box == 0;
  return est;
}

// ---------------------------------------------------------------------------
// U_0

struct U0Estimate {
  double value = 0.0;
  Quad witness{};
  std::size_t families = 0;
};

/// max |Omega_{w,V}| over the nuclear families (the trivial class adds 0).
inline U0Estimate compute_U0(const PlacedSet& ps, const Frequency& f, const PotentialSpec& V) {
  U0Estimate est;
  for (const auto& qd : ps.family_quads()) {
    ++est.families;
    const double v = std::fabs(omega_values(qd, f, V).total);
    if (v >= est.value) {
      est.value = v;
      est.witness = qd;
    }
  }
  return est;
}

/// theta = 3^{2N} R^2 w^3 q psi(q) + 4 (qR)^{-s0}
inline double theta(int N, double R, double omega, double q, const ApproxFunction& psi, double s0) {
  return std::pow(3.0, 2.0 * N) * R * R * omega * omega * omega * q * psi(q) + 4.0 * std::pow(q * R, -s0);
}

// ---------------------------------------------------------------------------
// reporting-only class extrema on a finite halo

struct ClassExtrema {
  std::array<double, 5> L{};
  std::array<double, 5> U{};
  std::array<std::size_t, 5> count{};
  std::array<Quad, 5> L_witness{};
  std::array<Quad, 5> U_witness{};
};

/// Extrema of |Omega_{w,V}| per class A(d) over quadruples whose members all
/// lie in lambda union halo. Only a finite window of the true classes.
inline ClassExtrema class_extrema(const std::vector<Mode>& lambda, const std::vector<Mode>& halo, const Frequency& f,
                                  const PotentialSpec& V) {
  ClassExtrema ex;
  ex.L.fill(std::numeric_limits<double>::infinity());
  ex.U.fill(0.0);
  std::vector<Mode> all = lambda;
  for (const auto& h : halo)
    if (std::find(all.begin(), all.end(), h) == all.end()) all.push_back(h);
  const auto in_lambda = mode_set(lambda);
  const auto in_all = mode_set(all);
  for (const auto& n1 : all)
    for (const auto& n2 : all)
      for (const auto& n3 : all) {
        const Mode n4 = n1 - n2 + n3;
        if (!in_all.count(n4)) continue;
        const Quad qd{n1, n2, n3, n4};
        const int d = classify(qd, in_lambda);
        const double v = std::fabs(omega_values(qd, f, V).total);
        ++ex.count[static_cast<std::size_t>(d)];
        if (v < ex.L[static_cast<std::size_t>(d)]) {
          ex.L[static_cast<std::size_t>(d)] = v;
          ex.L_witness[static_cast<std::size_t>(d)] = qd;
        }
        if (v > ex.U[static_cast<std::size_t>(d)]) {
          ex.U[static_cast<std::size_t>(d)] = v;
          ex.U_witness[static_cast<std::size_t>(d)] = qd;
        }
      }
  return ex;
}

/// The completions of A(1) closest to the origin, at most `cap` of them.
inline std::vector<Mode> a1_halo(const std::vector<Mode>& lambda, std::size_t cap) {
  const auto in = mode_set(lambda);
  std::set<Mode> seen;
  for (const auto& n1 : lambda)
    for (const auto& n2 : lambda)
      for (const auto& n3 : lambda) {
        const Mode n4 = n1 - n2 + n3;
        if (!in.count(n4)) seen.insert(n4);
      }
  std::vector<Mode> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(), [](const Mode& a, const Mode& b) { return a.norm2() < b.norm2(); });
  if (out.size() > cap) out.resize(cap);
  return out;
}

// ---------------------------------------------------------------------------
// report

struct ResonanceReport {
  L1Estimate L1;
  U0Estimate U0;
  double L = 0.0;        // w^2 q^2 / 8 - 4 sup|V|
  double theta = 0.0;
  double R_empirical = 0.0;
  double C_empirical = 0.0;
  std::optional<ClassExtrema> classes;
};

inline nlohmann::json quad_json(const Quad& qd) {
  auto a = nlohmann::json::array();
  for (const auto& m : qd) a.push_back(to_json(m));
  return a;
}

inline nlohmann::ordered_json to_json(const ResonanceReport& r) {
  nlohmann::ordered_json j;
  j["L1_empirical"] = r.L1.value;
  j["L1_witness"] = quad_json(r.L1.witness);
  j["L1_admissible"] = r.L1.admissible;
  j["L1_box"] = r.L1.box;
  j["L1_max_completion"] = r.L1.max_completion;
  j["L1_exhaustive"] = r.L1.exhaustive;
  j["U0_empirical"] = r.U0.value;
  j["U0_witness"] = quad_json(r.U0.witness);
  j["L"] = r.L;
  j["theta"] = r.theta;
  j["U0_over_theta"] = r.theta > 0 ? r.U0.value / r.theta : 0.0;
  j["L1_over_L"] = r.L != 0 ? r.L1.value / r.L : 0.0;
  j["R_empirical"] = r.R_empirical;
  j["C_empirical"] = r.C_empirical;
  if (r.classes) {
    auto cls = nlohmann::ordered_json::array();
    for (std::size_t d = 0; d < 5; ++d) {
      nlohmann::ordered_json c;
      c["d"] = d;
      c["count"] = r.classes->count[d];
      c["L"] = r.classes->count[d] ? r.classes->L[d] : 0.0;
      c["U"] = r.classes->U[d];
      cls.push_back(c);
    }
    j["classes_on_halo"] = cls;
  }
  return j;
}

}  // namespace cascade
