#pragma once

// Galerkin-truncated gauged NLS Hamiltonian on a finite mode set, in the lab
// frame and in rotating coordinates; shadowing and Sobolev-ratio experiments
// against the embedded toy orbit; strong-regime parameter planner.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "cascade/diophantine.hpp"
#include "cascade/error.hpp"
#include "cascade/lambda_set.hpp"
#include "cascade/lattice.hpp"
#include "cascade/normal_form.hpp"
#include "cascade/ode.hpp"
#include "cascade/resonance.hpp"
#include "cascade/toy_model.hpp"

namespace cascade {

// n1 + n3 = n + n4 with n1 != n, n1 != n4, as seen from mode n
struct Interaction {
  std::uint32_t i1 = 0, i3 = 0, i4 = 0;
  int cls = 0;
  double Omega = 0.0;  // Omega_{w,V}(n1, n, n3, n4)
};

using ClassMask = std::array<bool, 5>;
inline constexpr ClassMask kAllClasses{true, true, true, true, true};
inline constexpr ClassMask kClassZero{true, false, false, false, false};

struct Truncation {
  std::vector<Mode> modes;  // lexicographic
  std::unordered_map<Mode, std::uint32_t, detail::ModeHash> index;
  std::vector<char> in_lambda;
  std::vector<double> lam;  // |n|^2_w + V_n
  std::vector<std::vector<Interaction>> inter;
  int closure_depth = 0;
  double radius = -1.0;

  std::size_t size() const { return modes.size(); }
  std::size_t interaction_count() const {
    std::size_t c = 0;
    for (const auto& v : inter) c += v.size();
    return c;
  }
  CVec to_vec(const FourierState& z) const {
    CVec v(modes.size());
    for (const auto& [n, a] : z) {
      auto it = index.find(n);
      require(it != index.end(), ErrorKind::SupportViolation, "mode " + n.str() + " outside the truncation");
      v[it->second] = a;
    }
    return v;
  }
  FourierState to_state(const CVec& v) const {
    FourierState z;
    for (std::size_t i = 0; i < modes.size(); ++i) z.set(modes[i], v[i]);
    return z;
  }
};

inline Truncation build_truncation(const std::vector<Mode>& lambda, int closure_depth, double radius, const Frequency& f,
                                   const PotentialSpec& V, std::size_t max_modes = 400) {
  require(closure_depth >= 0 && closure_depth <= 2, ErrorKind::InvalidInput, "closure depth must be 0, 1 or 2");
  Truncation tr;
  tr.closure_depth = closure_depth;
  tr.radius = radius;
  // radius filters the added completions only; Lambda itself is always kept
  tr.modes = completion_closure(lambda, closure_depth, radius, max_modes);
  require(tr.modes.size() <= max_modes, ErrorKind::CapacityExceeded, "truncation above " + std::to_string(max_modes) + " modes");
  const auto inside = mode_set(lambda);
  for (std::uint32_t i = 0; i < tr.modes.size(); ++i) {
    tr.index.emplace(tr.modes[i], i);
    tr.in_lambda.push_back(inside.count(tr.modes[i]) ? 1 : 0);
    tr.lam.push_back(eigenvalue(tr.modes[i], f.value) + potential_coeff(V, tr.modes[i]));
  }
  const auto M = static_cast<std::uint32_t>(tr.modes.size());
  tr.inter.resize(M);
  for (std::uint32_t n = 0; n < M; ++n)
    for (std::uint32_t a = 0; a < M; ++a) {
      if (a == n) continue;
      for (std::uint32_t c = 0; c < M; ++c) {
        auto it = tr.index.find(tr.modes[a] + tr.modes[c] - tr.modes[n]);
        if (it == tr.index.end() || it->second == a) continue;
        Interaction x;
        x.i1 = a;
        x.i3 = c;
        x.i4 = it->second;
        x.cls = 4 - tr.in_lambda[a] - tr.in_lambda[n] - tr.in_lambda[c] - tr.in_lambda[x.i4];
        x.Omega = omega_values({tr.modes[a], tr.modes[n], tr.modes[c], tr.modes[x.i4]}, f, V).total;
        tr.inter[n].push_back(x);
      }
    }
  return tr;
}

namespace detail {

struct KahanC {
  cplx s{}, c{};
  void add(cplx x) {
    const cplx y = x - c;
    const cplx t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

}  // namespace detail

/// dH4/d(conj z_n) restricted to the masked classes (diagonal term always kept).
inline void quartic_gradient(const Truncation& tr, const CVec& z, CVec& g, const ClassMask& mask = kAllClasses) {
  g.assign(z.size(), cplx{});
  for (std::size_t n = 0; n < z.size(); ++n) {
    detail::KahanC acc;
    for (const auto& x : tr.inter[n])
      if (mask[x.cls]) acc.add(z[x.i1] * z[x.i3] * std::conj(z[x.i4]));
    g[n] = acc.s - std::norm(z[n]) * z[n];
  }
}

/// Lab frame: z_n' = i ((|n|^2_w + V_n) z_n + dH4/d(conj z_n)).
inline void lab_field(const Truncation& tr, const CVec& z, CVec& dz, const ClassMask& mask = kAllClasses) {
  quartic_gradient(tr, z, dz, mask);
  const cplx I{0.0, 1.0};
  for (std::size_t n = 0; n < z.size(); ++n) dz[n] = I * (tr.lam[n] * z[n] + dz[n]);
}

inline FourierState field_H(const FourierState& z, const Truncation& tr, const ClassMask& mask = kAllClasses) {
  CVec dz;
  lab_field(tr, tr.to_vec(z), dz, mask);
  return tr.to_state(dz);
}

/// Rotating coordinates z_n = r_n e^{i Lambda_n t}:
///   r_n' = i (sum r1 r3 conj(r4) e^{i Omega t} - |r_n|^2 r_n).
inline void rotating_field(const Truncation& tr, const CVec& r, CVec& dr, double t, const ClassMask& mask = kAllClasses) {
  dr.assign(r.size(), cplx{});
  const cplx I{0.0, 1.0};
  for (std::size_t n = 0; n < r.size(); ++n) {
    detail::KahanC acc;
    for (const auto& x : tr.inter[n])
      if (mask[x.cls]) acc.add(r[x.i1] * r[x.i3] * std::conj(r[x.i4]) * std::polar(1.0, x.Omega * t));
    dr[n] = I * (acc.s - std::norm(r[n]) * r[n]);
  }
}

/// H = sum Lambda_n |z_n|^2 - 1/2 sum |z_n|^4 + 1/2 sum_{off-diagonal} z1 conj(z2) z3 conj(z4)
inline double energy_H(const Truncation& tr, const CVec& z, const ClassMask& mask = kAllClasses) {
  CVec g;
  quartic_gradient(tr, z, g, mask);
  double h2 = 0.0, h4 = 0.0;
  for (std::size_t n = 0; n < z.size(); ++n) {
    h2 += tr.lam[n] * std::norm(z[n]);
    h4 += 0.5 * (std::conj(z[n]) * g[n]).real();
  }
  return h2 + h4;
}

inline double mass(const CVec& z) {
  double m = 0.0;
  for (const auto& x : z) m += std::norm(x);
  return m;
}

inline std::array<double, 2> momentum(const Truncation& tr, const CVec& z) {
  std::array<double, 2> p{0.0, 0.0};
  for (std::size_t n = 0; n < z.size(); ++n) {
    p[0] += static_cast<double>(tr.modes[n].j) * std::norm(z[n]);
    p[1] += static_cast<double>(tr.modes[n].k) * std::norm(z[n]);
  }
  return p;
}

/// direction +1: rotating -> lab (multiply by e^{i Lambda_n t}); -1: inverse.
inline FourierState rotate(const FourierState& z, double t, double omega, const PotentialSpec& V, int direction) {
  require(direction == 1 || direction == -1, ErrorKind::InvalidInput, "direction must be +1 or -1");
  FourierState r;
  for (const auto& [n, a] : z) r.set(n, a * std::polar(1.0, direction * (eigenvalue(n, omega) + potential_coeff(V, n)) * t));
  return r;
}

inline CVec rotate(const Truncation& tr, const CVec& z, double t, int direction) {
  CVec r(z.size());
  for (std::size_t n = 0; n < z.size(); ++n) r[n] = z[n] * std::polar(1.0, direction * tr.lam[n] * t);
  return r;
}

struct Series {
  std::vector<double> t;
  std::vector<CVec> z;
};

enum class Frame { Lab, Rotating };

struct FlowOptions {
  double tol = 1e-10;
  ClassMask mask = kAllClasses;
  Frame frame = Frame::Lab;
  bool add_mass_square = false;  // integrate H = H_gauged + M^2 (lab frame only)
  std::size_t max_steps = 50'000'000;
};

inline OdeField nls_ode(const Truncation& tr, const FlowOptions& o) {
  if (o.frame == Frame::Rotating)
    return [&tr, o](const CVec& y, CVec& dy, double t) { rotating_field(tr, y, dy, t, o.mask); };
  return [&tr, o](const CVec& y, CVec& dy, double) {
    lab_field(tr, y, dy, o.mask);
    if (o.add_mass_square) {
      const double m2 = 2.0 * mass(y);
      for (std::size_t n = 0; n < y.size(); ++n) dy[n] += cplx{0.0, m2} * y[n];
    }
  };
}

inline Series integrate_nls(const Truncation& tr, const CVec& z0, const std::vector<double>& times, const FlowOptions& o) {
  Series s;
  s.t = times;
  if (times.empty()) return s;
  CVec y = z0;
  OdeOptions opt;
  opt.tol = o.tol;
  opt.max_steps = o.max_steps;
  integrate_adaptive(nls_ode(tr, o), y, 0.0, times.back(), opt, times, &s.z);
  return s;
}

inline std::vector<double> uniform_times(double t_end, std::size_t samples) {
  std::vector<double> t;
  for (std::size_t i = 0; i <= samples; ++i) t.push_back(t_end * static_cast<double>(i) / static_cast<double>(samples));
  t.back() = t_end;
  return t;
}

// ---------------------------------------------------------------------------
// shadowing

struct ShadowOptions {
  double epsilon = 0.1;
  double perturbation = 0.5;  // fraction of the admissible initial distance
  bool strong = false;        // admissible distance lambda^{-(1+2 eps)} instead of lambda^{-2} L^{-1/2}
  double L = 1.0;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::size_t samples = 200;
  ClassMask mask = kAllClasses;
};

struct ShadowReport {
  double lambda = 0.0;
  int N = 0;
  double T = 0.0;
  double admissible = 0.0;
  double initial_distance = 0.0;
  bool precondition_ok = true;
  double sup_distance = 0.0;
  double threshold = 0.0;  // lambda^{-(1+eps)}
  double bootstrap = 0.0;  // 2 lambda^{-(1+eps)}
  bool pass = false;
  std::vector<double> t, distance;
};

inline ShadowReport shadow_experiment(const PlacedSet& ps, const CascadeOrbit& orbit, double lambda, const Truncation& tr,
                                      const ShadowOptions& opt) {
  require(lambda >= 2.0, ErrorKind::InvalidInput, "shadow experiment needs lambda >= 2");
  require(orbit.N == ps.N(), ErrorKind::InvalidInput, "orbit and placed set differ in N");
  ShadowReport rep;
  rep.lambda = lambda;
  rep.N = ps.N();
  rep.T = lambda * lambda * orbit.T0;
  rep.threshold = std::pow(lambda, -(1.0 + opt.epsilon));
  rep.bootstrap = 2.0 * rep.threshold;
  rep.admissible = opt.strong ? std::pow(lambda, -(1.0 + 2.0 * opt.epsilon)) : std::pow(lambda, -2.0) / std::sqrt(opt.L);
  rep.precondition_ok = opt.perturbation <= 1.0;

  rep.t = uniform_times(rep.T, opt.samples);
  std::vector<double> tau;
  for (double t : rep.t) tau.push_back(t / (lambda * lambda));
  const auto b = toy_at(orbit.initial, tau, std::max(opt.tol, 1e-13));

  CVec r0 = tr.to_vec(embed(b.front(), ps, lambda));
  if (opt.perturbation > 0.0) {
    const auto p = tr.to_vec(random_state(ps.all_modes(), opt.perturbation * rep.admissible, opt.seed));
    for (std::size_t i = 0; i < r0.size(); ++i) r0[i] += p[i];
  }
  FlowOptions fo;
  fo.tol = opt.tol;
  fo.mask = opt.mask;
  fo.frame = Frame::Rotating;
  const auto s = integrate_nls(tr, r0, rep.t, fo);
  for (std::size_t k = 0; k < rep.t.size(); ++k) {
    const CVec ref = tr.to_vec(embed(b[k], ps, lambda));
    double d = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) d += std::abs(s.z[k][i] - ref[i]);
    rep.distance.push_back(d);
    rep.sup_distance = std::max(rep.sup_distance, d);
  }
  rep.initial_distance = rep.distance.front();
  rep.pass = rep.sup_distance <= rep.threshold;
  return rep;
}

struct ShadowSweep {
  std::vector<ShadowReport> runs;
  double slope = 0.0;  // d log sup / d log lambda
};

inline ShadowSweep shadow_sweep(const PlacedSet& ps, const CascadeOrbit& orbit, const std::vector<double>& lambdas,
                                const Truncation& tr, const ShadowOptions& opt) {
  ShadowSweep sw;
  std::vector<double> x, y;
  for (double l : lambdas) {
    sw.runs.push_back(shadow_experiment(ps, orbit, l, tr, opt));
    x.push_back(std::log(l));
    y.push_back(std::log(sw.runs.back().sup_distance));
  }
  if (x.size() >= 2) sw.slope = fit_line(x, y).first;
  return sw;
}

inline nlohmann::ordered_json to_json(const ShadowReport& r, bool series = false) {
  nlohmann::ordered_json j;
  j["stage"] = "shadow";
  j["lambda"] = r.lambda;
  j["N"] = r.N;
  j["T"] = r.T;
  j["admissible_initial_distance"] = r.admissible;
  j["initial_distance"] = r.initial_distance;
  j["precondition_ok"] = r.precondition_ok;
  j["sup_distance"] = r.sup_distance;
  j["threshold"] = r.threshold;
  j["bootstrap_threshold"] = r.bootstrap;
  j["verdict"] = r.pass ? "pass" : "fail";
  if (series) {
    j["t"] = r.t;
    j["distance"] = r.distance;
  }
  return j;
}

inline nlohmann::ordered_json to_json(const ShadowSweep& s) {
  nlohmann::ordered_json j;
  j["stage"] = "shadow";
  j["slope"] = s.slope;
  auto runs = nlohmann::ordered_json::array();
  for (const auto& r : s.runs) runs.push_back(to_json(r));
  j["runs"] = runs;
  return j;
}

// ---------------------------------------------------------------------------
// Sobolev ratio

struct RatioOptions {
  double s = 1.5;
  double tol = 1e-12;
  ClassMask mask = kAllClasses;
  // when the truncation carries class-1 monomials, the generator uses this divisor floor
  double L = 0.0;
};

struct RatioReport {
  double lambda = 0.0;
  double s = 0.0;
  int N = 0;
  double T = 0.0;
  double norm0 = 0.0;  // |z(0)|_s^2
  double normT = 0.0;  // |z(T)|_s^2
  double ratio = 0.0;
  double closed_form = 0.0;  // sum |b_i(T0)|^2 S_i / sum |b_i(0)|^2 S_i with bracket weights
  double S_ratio = 0.0;      // S_{N-2} / S_3
  double growth_target = 0.0; // 2^{(s-1)(N-6)} w^{-2s}
  double birkhoff_offset = 0.0;  // |Gamma^{-1}(z(0)) - z(0)|_1
  bool pass = false;         // ratio >= S_ratio / 4
};

inline RatioReport sobolev_ratio_experiment(const PlacedSet& ps, const CascadeOrbit& orbit, double lambda, const Truncation& tr,
                                            const Frequency& f, const PotentialSpec& V, const RatioOptions& opt) {
  require(lambda >= 2.0, ErrorKind::InvalidInput, "ratio experiment needs lambda >= 2");
  require(orbit.N == ps.N(), ErrorKind::InvalidInput, "orbit and placed set differ in N");
  RatioReport rep;
  rep.lambda = lambda;
  rep.s = opt.s;
  rep.N = ps.N();
  rep.T = lambda * lambda * orbit.T0;

  const auto b = toy_at(orbit.initial, {0.0, orbit.T0}, std::max(opt.tol, 1e-13));
  const CVec z0 = tr.to_vec(embed(b[0], ps, lambda));

  // Birkhoff coordinates of the datum (identity when no class-1 monomial fits)
  {
    std::vector<Mode> modes = tr.modes;
    const auto quartic = build_quartic(ps.all_modes(), modes, std::max<std::size_t>(400, modes.size()));
    if (quartic.count(1) > 0) {
      const auto g = build_generator(quartic, f, V, opt.L);
      TransformOptions to;
      to.eta0 = std::max(to.eta0, 2.0 * l1_norm(z0));
      const CVec w0 = transform(z0, g, -1, to);
      double d = 0.0;
      for (std::size_t i = 0; i < z0.size(); ++i) d += std::abs(w0[i] - z0[i]);
      rep.birkhoff_offset = d;
    }
  }

  FlowOptions fo;
  fo.tol = opt.tol;
  fo.mask = opt.mask;
  fo.frame = Frame::Rotating;  // |z_n| = |r_n|, so norms agree with the lab frame
  const auto s = integrate_nls(tr, z0, {0.0, rep.T}, fo);
  rep.norm0 = hs_norm2(tr.to_state(s.z.front()), opt.s);
  rep.normT = hs_norm2(tr.to_state(s.z.back()), opt.s);
  rep.ratio = rep.normT / rep.norm0;

  const auto st = stats(ps, opt.s, f.value);
  double num = 0.0, den = 0.0;
  for (int i = 1; i <= ps.N(); ++i) {
    num += std::norm(b[1][i - 1]) * st.S_bracket[i - 1];
    den += std::norm(b[0][i - 1]) * st.S_bracket[i - 1];
  }
  rep.closed_form = num / den;
  rep.S_ratio = st.S[ps.N() - 3] / st.S[2];
  rep.growth_target = std::pow(2.0, (opt.s - 1.0) * (ps.N() - 6)) * std::pow(f.value, -2.0 * opt.s);
  rep.pass = rep.ratio >= 0.25 * rep.S_ratio;
  return rep;
}

inline nlohmann::ordered_json to_json(const RatioReport& r) {
  nlohmann::ordered_json j;
  j["stage"] = "ratio";
  j["lambda"] = r.lambda;
  j["s"] = r.s;
  j["N"] = r.N;
  j["T"] = r.T;
  j["norm0"] = r.norm0;
  j["normT"] = r.normT;
  j["ratio"] = r.ratio;
  j["closed_form_class0"] = r.closed_form;
  j["S_ratio"] = r.S_ratio;
  j["growth_target"] = r.growth_target;
  j["birkhoff_offset"] = r.birkhoff_offset;
  j["verdict"] = r.pass ? "pass" : "fail";
  return j;
}

// ---------------------------------------------------------------------------
// strong regime planner and Gronwall condition report

struct StrongPlanInput {
  double s = 1.5, tau = 4.0, s0 = 4.0, epsilon = 0.01;
  int N = 5;
  double omega = 1.5, R = 1.0, C = 1.0, mu = 0.1;
  double q = 0.0;  // candidate convergent denominator; 0: use the minimal admissible q
};

struct StrongPlan {
  double nu = 0.0, nu_star = 0.0;
  double log10_q_min = 0.0;  // from the two lower bounds on q
  double log10_q = 0.0;
  double log10_lambda_lo = 0.0, log10_lambda_hi = 0.0;
  bool feasible = false;
  std::string binding;
};

/// Constants hidden in the "up to constants" relations are set to 1; all
/// outputs are base-10 logarithms to stay finite.
inline StrongPlan plan_strong_regime(const StrongPlanInput& in) {
  require(in.s > 1.0 && in.epsilon > 0.0 && in.mu > 0.0 && in.R > 0.0 && in.omega > 0.0, ErrorKind::InvalidInput,
          "planner needs s > 1 and positive epsilon, mu, R, omega");
  StrongPlan p;
  p.nu = in.tau / (2.0 * (1.0 + in.epsilon)) - in.s;
  p.nu_star = in.s0 / (2.0 * (1.0 + in.epsilon)) - in.s;
  if (!(in.tau > 2.0 * in.s) || p.nu <= 0.0)
    fail(ErrorKind::InfeasibleRegime, "nu = tau/(2(1+eps)) - s = " + std::to_string(p.nu) + " <= 0 (needs tau > 2s(1+eps))");
  if (!(in.s0 > 2.0 * in.s) || p.nu_star <= 0.0)
    fail(ErrorKind::InfeasibleRegime, "nu* = s0/(2(1+eps)) - s = " + std::to_string(p.nu_star) + " <= 0 (needs s0 > 2s(1+eps))");
  const double l10 = std::log(10.0);
  const double e1 = 1.0 + in.epsilon;
  // q^nu >= w^{3/(2(1+e))} 3^{N/(1+e)} 2^{N/2} R^{s + 1/(1+e)} / mu
  const double a = (1.5 / e1 * std::log(in.omega) + in.N / e1 * std::log(3.0) + 0.5 * in.N * std::log(2.0) +
                    (in.s + 1.0 / e1) * std::log(in.R) - std::log(in.mu)) / p.nu;
  // (q R)^{nu*} >= 2^{N/2} / mu
  const double b = (0.5 * in.N * std::log(2.0) - std::log(in.mu)) / p.nu_star - std::log(in.R);
  p.log10_q_min = std::max(a, b) / l10;
  p.binding = a >= b ? "q^nu lower bound" : "(qR)^nu* lower bound";
  const double lq = in.q > 0.0 ? std::log(in.q) : std::max(a, b);
  p.log10_q = lq / l10;
  // C^{-s} 2^{N/2} q^s R^s / mu  <=  lambda  <=  C^s 2^{N/2} 3^{Ns} w^s q^s R^s / mu
  const double base = 0.5 * in.N * std::log(2.0) + in.s * (lq + std::log(in.R)) - std::log(in.mu);
  p.log10_lambda_lo = (base - in.s * std::log(in.C)) / l10;
  p.log10_lambda_hi = (base + in.s * std::log(in.C) + in.N * in.s * std::log(3.0) + in.s * std::log(in.omega)) / l10;
  p.feasible = lq >= std::max(a, b);
  if (!p.feasible) p.binding += " violated by the requested q";
  return p;
}

inline nlohmann::ordered_json to_json(const StrongPlan& p) {
  nlohmann::ordered_json j;
  j["stage"] = "plan_strong";
  j["nu"] = p.nu;
  j["nu_star"] = p.nu_star;
  j["log10_q_min"] = p.log10_q_min;
  j["log10_q"] = p.log10_q;
  j["log10_lambda_lo"] = p.log10_lambda_lo;
  j["log10_lambda_hi"] = p.log10_lambda_hi;
  j["feasible"] = p.feasible;
  j["binding"] = p.binding;
  return j;
}

struct GronwallInput {
  int N = 5;
  double log_lambda = std::log(8.0);  // the relevant lambdas overflow a double
  double L = 1.0, theta = 0.0, epsilon = 0.1;
  double K = 1.0, gamma = 1.0, C0 = 1.0;
};

struct GronwallReport {
  double log_growth = 0.0;  // K gamma N^4 4^N C0
  std::array<bool, 3> holds{};
  std::array<double, 3> lhs_log{}, rhs_log{};
};

/// Evaluates the three bootstrap conditions in log form at desk parameters.
inline GronwallReport gronwall_conditions(const GronwallInput& in) {
  GronwallReport r;
  const double N = in.N;
  const double g = in.K * in.gamma * std::pow(N, 4) * std::pow(4.0, N) * in.C0;
  r.log_growth = g;
  const double ll = in.log_lambda, lL = std::log(in.L);
  r.lhs_log[0] = std::log(1.5) + g;
  r.rhs_log[0] = (1.0 - in.epsilon) * ll + 0.5 * lL;
  r.lhs_log[1] = in.theta > 0.0 ? std::log(in.theta) : -INFINITY;
  r.rhs_log[1] = std::log(2.0 / 3.0) - (2.0 + in.epsilon) * ll - 7.0 * std::log(N) + (1.0 - 3.0 * N) * std::log(2.0) -
                 2.0 * std::log(in.gamma) - 2.0 * std::log(in.K) - g;
  r.lhs_log[2] = std::log(in.K * in.gamma) + 7.0 * std::log(N) + 5.0 * N * std::log(2.0) + std::log(1.5) + g;
  r.rhs_log[2] = (2.0 - in.epsilon) * ll + lL;
  for (int i = 0; i < 3; ++i) r.holds[i] = r.lhs_log[i] < r.rhs_log[i];
  return r;
}

inline nlohmann::ordered_json to_json(const GronwallReport& r) {
  nlohmann::ordered_json j;
  j["stage"] = "gronwall_conditions";
  j["log_growth_exponent"] = r.log_growth;
  auto a = nlohmann::ordered_json::array();
  for (int i = 0; i < 3; ++i) a.push_back({{"condition", i + 1}, {"log_lhs", r.lhs_log[i]}, {"log_rhs", r.rhs_log[i]}, {"holds", r.holds[i]}});
  j["conditions"] = a;
  return j;
}

}  // namespace cascade
