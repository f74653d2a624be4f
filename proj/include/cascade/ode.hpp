#pragma once

// Thin wrappers around boost::odeint for complex state vectors: an adaptive
// Runge-Kutta-Fehlberg 7(8) driver that lands exactly on requested output
// times, and a fixed-step variant used where the map must be smooth in the data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "cascade/error.hpp"

namespace cascade {

using CVec = std::vector<std::complex<double>>;

struct OdeOptions {
  double tol = 1e-10;
  double dt0 = 1e-2;
  double dt_min = 1e-13;
  double dt_max = 0.0;  // 0: unlimited
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// Field signature: void(const CVec& y, CVec& dy, double t).
using OdeField = std::function<void(const CVec&, CVec&, double)>;
// Called after every accepted step; return false to stop early.
using OdeObserver = std::function<bool(double, const CVec&)>;

/// Integrates from t0 to t1 (t1 >= t0). The state at each time in `outputs`
/// (ascending, inside [t0, t1]) is appended to `out`; steps are clipped so the
/// solution is computed at those times rather than interpolated.
/// Returns the time reached (t1 unless the observer stopped the run).
inline double integrate_adaptive(const OdeField& f, CVec& y, double t0, double t1, const OdeOptions& opt,
                                 const std::vector<double>& outputs = {}, std::vector<CVec>* out = nullptr,
                                 const OdeObserver& obs = {}, OdeStats* stats = nullptr) {
  namespace ode = boost::numeric::odeint;
  require(t1 >= t0, ErrorKind::InvalidInput, "integration interval reversed");
  require(opt.tol > 0.0, ErrorKind::InvalidInput, "tolerance must be positive");
  auto stepper = ode::make_controlled(opt.tol, opt.tol, ode::runge_kutta_fehlberg78<CVec>());

  std::size_t next = 0;
  while (next < outputs.size() && outputs[next] < t0) ++next;
  if (out)
    while (next < outputs.size() && outputs[next] == t0) out->push_back(y), ++next;

  double t = t0;
  double dt = opt.dt0;
  std::size_t steps = 0;
  auto rhs = [&](const CVec& x, CVec& dx, double tt) { f(x, dx, tt); };
  while (t < t1) {
    double target = t1;
    if (next < outputs.size()) target = std::min(target, outputs[next]);
    if (opt.dt_max > 0.0) dt = std::min(dt, opt.dt_max);
    bool clipped = false;
    double dt_try = dt;
    if (t + dt_try >= target) {
      dt_try = target - t;
      clipped = true;
    }
    const auto res = stepper.try_step(rhs, y, t, dt_try);
    if (res == ode::fail) {
      if (stats) ++stats->rejected;
      if (dt_try < opt.dt_min * std::max(1.0, std::fabs(t)))
        fail(ErrorKind::StepSizeUnderflow, "step size underflow at t=" + std::to_string(t));
      dt = dt_try;
      continue;
    }
    if (stats) ++stats->accepted;
    if (++steps > opt.max_steps) fail(ErrorKind::StepSizeUnderflow, "step budget exhausted at t=" + std::to_string(t));
    // try_step advanced t and proposed the next dt
    if (clipped) {
      t = target;  // exact landing
      dt = std::max(dt_try, dt);
    } else {
      dt = dt_try;
    }
    while (next < outputs.size() && outputs[next] <= t) {
      if (out) out->push_back(y);
      ++next;
    }
    if (obs && !obs(t, y)) return t;
  }
  return t;
}

/// Fixed number of 8th-order Fehlberg steps; the result is smooth in y0.
inline void integrate_fixed(const OdeField& f, CVec& y, double t0, double t1, int steps) {
  namespace ode = boost::numeric::odeint;
  require(steps > 0, ErrorKind::InvalidInput, "need at least one step");
  ode::runge_kutta_fehlberg78<CVec> rk;
  const double h = (t1 - t0) / steps;
  auto rhs = [&](const CVec& x, CVec& dx, double tt) { f(x, dx, tt); };
  for (int i = 0; i < steps; ++i) rk.do_step(rhs, y, t0 + i * h, h);
}

}  // namespace cascade
