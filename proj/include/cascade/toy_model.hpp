#pragma once

// Nearest-neighbour toy system for generation amplitudes
//   b_i' = -i |b_i|^2 b_i + 2i conj(b_i) (b_{i-1}^2 + b_{i+1}^2),  b_0 = b_{N+1} = 0,
// its conserved quantities, a stage-wise cascade-orbit finder, scaling and
// embedding into Fourier states on a placed set.

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cascade/error.hpp"
#include "cascade/lambda_set.hpp"
#include "cascade/lattice.hpp"
#include "cascade/ode.hpp"

namespace cascade {

using ToyState = CVec;

inline ToyState toy_field(const ToyState& b) {
  const std::size_t N = b.size();
  ToyState d(N);
  const cplx I{0.0, 1.0};
  for (std::size_t i = 0; i < N; ++i) {
    cplx nb{};
    if (i > 0) nb += b[i - 1] * b[i - 1];
    if (i + 1 < N) nb += b[i + 1] * b[i + 1];
    d[i] = -I * std::norm(b[i]) * b[i] + 2.0 * I * std::conj(b[i]) * nb;
  }
  return d;
}

/// h = 1/2 sum |b_i|^4 - sum_i (conj(b_i)^2 b_{i+1}^2 + c.c.), with b_i' = -i dh/d(conj b_i)
inline double toy_energy(const ToyState& b) {
  double h = 0.0;
  for (const auto& x : b) h += 0.5 * std::norm(x) * std::norm(x);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const cplx c = std::conj(b[i] * b[i]) * b[i + 1] * b[i + 1];
    h -= 2.0 * c.real();
  }
  return h;
}

inline double toy_mass(const ToyState& b) {
  double m = 0.0;
  for (const auto& x : b) m += std::norm(x);
  return m;
}

inline double mass_fraction(const ToyState& b, std::size_t mode) {
  const double m = toy_mass(b);
  return m > 0.0 ? std::norm(b.at(mode - 1)) / m : 0.0;
}

/// Two-mode heteroclinic (modes 1, 2 of an N=2 system):
/// b_1 = e^{-it} / sqrt(1 + e^{2 sqrt3 t}),  b_2 = e^{-it} e^{i pi/3} / sqrt(1 + e^{-2 sqrt3 t}).
inline ToyState slider(double t) {
  const double r3 = std::sqrt(3.0);
  const cplx ph = std::polar(1.0, -t);
  const cplx beta = std::polar(1.0, std::numbers::pi / 3.0);
  return {ph / std::sqrt(1.0 + std::exp(2.0 * r3 * t)), ph * beta / std::sqrt(1.0 + std::exp(-2.0 * r3 * t))};
}

struct ToyTrajectory {
  std::vector<double> t;
  std::vector<ToyState> b;
};

inline OdeField toy_ode() {
  return [](const CVec& y, CVec& dy, double) { dy = toy_field(y); };
}

/// Samples on a uniform grid of `samples` intervals over [0, t_end].
inline ToyTrajectory integrate_toy(const ToyState& b0, double t_end, double tol, std::size_t samples = 200) {
  require(tol >= 1e-13 && tol <= 1e-6, ErrorKind::InvalidInput, "toy tolerance must lie in [1e-13, 1e-6]");
  require(t_end >= 0.0 && samples >= 1, ErrorKind::InvalidInput, "bad toy integration window");
  ToyTrajectory tr;
  for (std::size_t i = 0; i <= samples; ++i) tr.t.push_back(t_end * static_cast<double>(i) / static_cast<double>(samples));
  tr.t.back() = t_end;
  CVec y = b0;
  OdeOptions opt;
  opt.tol = tol;
  integrate_adaptive(toy_ode(), y, 0.0, t_end, opt, tr.t, &tr.b);
  return tr;
}

/// Evaluates the solution at the given ascending times.
inline std::vector<ToyState> toy_at(const ToyState& b0, const std::vector<double>& times, double tol) {
  std::vector<ToyState> out;
  if (times.empty()) return out;
  CVec y = b0;
  OdeOptions opt;
  opt.tol = tol;
  integrate_adaptive(toy_ode(), y, 0.0, times.back(), opt, times, &out);
  return out;
}

// ---------------------------------------------------------------------------
// cascade orbit finder

struct CascadeOptions {
  double tol = 1e-10;
  double first_injection = 0.05;  // on mode 4
  double injection = 1e-4;        // first probe at later junctions
  double log_lo = std::log(1e-14);
  double log_hi = std::log(0.3);
  double stage_time = 200.0;  // cap per junction
  int budget = 200;           // total trial integrations
  std::size_t samples = 400;
};

struct CascadeOrbit {
  int N = 0;
  double delta = 0.0;
  ToyState initial;
  std::vector<double> injections;  // amplitude on modes 4..N
  double T0 = 0.0;
  double start_fraction = 0.0;  // mode 3 at t = 0
  double end_fraction = 0.0;    // mode N-1 at T0
  double sigma = 0.0;           // reporting only
  int trials = 0;
  ToyTrajectory trajectory;
};

namespace detail {

enum class Departure { Forward, Backward, Stalled, NoArrival };

struct JunctionTrial {
  Departure dir = Departure::NoArrival;
  double peak = 0.0;  // max mass fraction on the arrival mode
  double t_peak = 0.0;
  ToyState at_peak;
};

inline ToyState cascade_initial(int N, const std::vector<double>& inj) {
  ToyState b(N);
  b[2] = 1.0;
  const cplx dir = std::polar(1.0, std::numbers::pi / 3.0);
  for (std::size_t i = 0; i < inj.size(); ++i) b[3 + i] = inj[i] * dir;
  return b;
}

// Follows the orbit through arrival at `mode` (1-based) and reports where it goes next.
inline JunctionTrial run_junction(const ToyState& b0, int mode, const CascadeOptions& opt, double t_cap) {
  JunctionTrial r;
  bool arrived = false;
  CVec y = b0;
  OdeOptions o;
  o.tol = opt.tol;
  const std::size_t m = static_cast<std::size_t>(mode - 1);
  auto obs = [&](double t, const CVec& x) {
    const double mass = toy_mass(x);
    const double f = std::norm(x[m]) / mass;
    if (!arrived) {
      if (f > 0.5) arrived = true;
      else return true;
    }
    if (f > r.peak) {
      r.peak = f;
      r.t_peak = t;
      r.at_peak = x;
    }
    if (m + 1 < x.size() && std::norm(x[m + 1]) / mass > 0.5) {
      r.dir = Departure::Forward;
      return false;
    }
    if (m >= 1 && std::norm(x[m - 1]) / mass > 0.5) {
      r.dir = Departure::Backward;
      return false;
    }
    return true;
  };
  integrate_adaptive(toy_ode(), y, 0.0, t_cap, o, {}, nullptr, obs);
  if (r.dir == Departure::NoArrival && arrived) r.dir = Departure::Stalled;
  // mode 3 at t = 0 is already "arrived"
  if (r.peak == 0.0 && !arrived) r.dir = Departure::NoArrival;
  return r;
}

}  // namespace detail

/// Stage-wise shooting: mode 3 carries the mass, mode 4 gets the slider
/// injection, and each further mode's injection amplitude is bisected (in log
/// scale) so the orbit leaves mode j forward after reaching fraction 1-delta.
inline CascadeOrbit find_cascade(int N, double delta, const CascadeOptions& opt = {}) {
  require(N >= 5 && N <= 9, ErrorKind::InvalidInput, "find_cascade needs 5 <= N <= 9");
  require(delta > 0.0 && delta < 1.0, ErrorKind::InvalidInput, "delta must lie in (0, 1)");
  CascadeOrbit orb;
  orb.N = N;
  orb.delta = delta;
  std::vector<double> inj{opt.first_injection};
  int trials = 0;
  detail::JunctionTrial last;

  // mode j receives mass from j-1 and must hand it on to j+1
  for (int j = 4; j <= N - 1; ++j) {
    double lo = opt.log_lo, hi = opt.log_hi;
    double x = std::log(opt.injection);
    bool done = false;
    const double t_cap = opt.stage_time * (j - 2);
    while (!done) {
      if (++trials > opt.budget)
        fail(ErrorKind::CascadeNotFound, "bisection budget exhausted at junction " + std::to_string(j));
      auto trial_inj = inj;
      trial_inj.push_back(std::exp(x));
      const auto tr = detail::run_junction(detail::cascade_initial(N, trial_inj), j, opt, t_cap);
      if (tr.dir == detail::Departure::NoArrival)
        fail(ErrorKind::CascadeNotFound, "orbit never reached mode " + std::to_string(j));
      if (tr.dir == detail::Departure::Forward && tr.peak >= 1.0 - delta) {
        inj = trial_inj;
        last = tr;
        done = true;
      } else if (tr.dir == detail::Departure::Forward) {
        hi = x;  // left too early
      } else {
        lo = x;  // fell back or lingered
      }
      if (!done) {
        if (hi - lo < 1e-9) fail(ErrorKind::CascadeNotFound, "bisection collapsed at junction " + std::to_string(j));
        x = 0.5 * (lo + hi);
      }
    }
  }
  orb.injections = inj;
  orb.initial = detail::cascade_initial(N, inj);
  orb.trials = trials;
  orb.T0 = last.t_peak;
  orb.start_fraction = mass_fraction(orb.initial, 3);
  orb.end_fraction = mass_fraction(last.at_peak, static_cast<std::size_t>(N - 1));
  if (orb.start_fraction < 1.0 - delta || orb.end_fraction < 1.0 - delta)
    fail(ErrorKind::CascadeNotFound, "achieved concentrations below 1-delta");
  orb.sigma = std::log(1.0 - std::sqrt(orb.end_fraction)) / std::log(delta);
  orb.trajectory = integrate_toy(orb.initial, orb.T0, opt.tol, opt.samples);
  return orb;
}

/// b^lambda(t) = b(t / lambda^2) / lambda on the rescaled time grid.
inline ToyTrajectory scale_orbit(const ToyTrajectory& tr, double lambda) {
  require(lambda >= 1.0, ErrorKind::InvalidInput, "lambda must be >= 1");
  ToyTrajectory s;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    s.t.push_back(lambda * lambda * tr.t[i]);
    ToyState b = tr.b[i];
    for (auto& x : b) x /= lambda;
    s.b.push_back(std::move(b));
  }
  return s;
}

/// r_n = b_i / lambda for n in generation i.
inline FourierState embed(const ToyState& b, const PlacedSet& ps, double lambda) {
  require(static_cast<int>(b.size()) == ps.N(), ErrorKind::InvalidInput,
          "toy state has " + std::to_string(b.size()) + " components for " + std::to_string(ps.N()) + " generations");
  require(lambda > 0.0, ErrorKind::InvalidInput, "lambda must be positive");
  FourierState z;
  for (int i = 1; i <= ps.N(); ++i)
    for (const auto& n : ps.generation(i)) z.set(n, b[i - 1] / lambda);
  return z;
}

// ---------------------------------------------------------------------------
// I/O

inline void write_trajectory_csv(std::ostream& os, const ToyTrajectory& tr) {
  const std::size_t N = tr.b.empty() ? 0 : tr.b.front().size();
  os << "t";
  for (std::size_t i = 1; i <= N; ++i) os << ",re" << i << ",im" << i;
  os << '\n';
  os.precision(17);
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    os << tr.t[k];
    for (const auto& x : tr.b[k]) os << ',' << x.real() << ',' << x.imag();
    os << '\n';
  }
}

inline nlohmann::json toy_state_json(const ToyState& b) {
  auto a = nlohmann::json::array();
  for (const auto& x : b) a.push_back({x.real(), x.imag()});
  return a;
}

inline ToyState toy_state_from_json(const nlohmann::json& j) {
  ToyState b;
  try {
    for (const auto& x : j) b.emplace_back(x.at(0).get<double>(), x.at(1).get<double>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("bad toy state: ") + e.what());
  }
  return b;
}

inline nlohmann::ordered_json to_json(const CascadeOrbit& o) {
  nlohmann::ordered_json j;
  j["N"] = o.N;
  j["delta"] = o.delta;
  j["T0"] = o.T0;
  j["start_fraction"] = o.start_fraction;
  j["end_fraction"] = o.end_fraction;
  j["sigma_fit"] = o.sigma;
  j["trials"] = o.trials;
  j["injections"] = o.injections;
  j["initial"] = toy_state_json(o.initial);
  return j;
}

}  // namespace cascade
