#pragma once

// Quartic monomial tables on a finite mode set and the weak normal-form step:
// a generator removing the monomials with exactly one member outside Lambda,
// its time-1 flow, and the measured remainder vector field.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "cascade/error.hpp"
#include "cascade/lambda_set.hpp"
#include "cascade/lattice.hpp"
#include "cascade/ode.hpp"
#include "cascade/resonance.hpp"

namespace cascade {

struct MonomialEntry {
  std::array<std::uint32_t, 4> idx{};  // positions in the table's mode list
  cplx coeff{};
  int cls = 0;  // members outside Lambda
};

/// H(z) = sum_e coeff_e z_{n1} conj(z_{n2}) z_{n3} conj(z_{n4})
struct MonomialTable {
  std::vector<Mode> modes;  // lexicographic
  std::unordered_map<Mode, std::uint32_t, detail::ModeHash> index;
  std::vector<MonomialEntry> entries;

  Quad quad(const MonomialEntry& e) const { return {modes[e.idx[0]], modes[e.idx[1]], modes[e.idx[2]], modes[e.idx[3]]}; }
  std::size_t count(int cls) const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const auto& e) { return e.cls == cls; }));
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

namespace detail {

inline void index_modes(MonomialTable& t, std::vector<Mode> modes) {
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  t.modes = std::move(modes);
  for (std::uint32_t i = 0; i < t.modes.size(); ++i) t.index.emplace(t.modes[i], i);
}

}  // namespace detail

/// Lambda plus all completions n1 - n2 + n3 of triples from the current set,
/// iterated `depth` times, keeping |n| <= radius (radius < 0: no limit).
inline std::vector<Mode> completion_closure(const std::vector<Mode>& lambda, int depth, double radius,
                                            std::size_t max_modes = 400) {
  require(depth >= 0, ErrorKind::InvalidInput, "closure depth must be >= 0");
  std::vector<Mode> cur = lambda;
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
  for (int d = 0; d < depth; ++d) {
    std::unordered_set<Mode, detail::ModeHash> seen(cur.begin(), cur.end());
    std::vector<Mode> next = cur;
    for (const auto& a : cur)
      for (const auto& b : cur)
        for (const auto& c : cur) {
          const Mode n = a - b + c;
          if (radius >= 0.0 && n.norm() > radius) continue;
          if (seen.insert(n).second) {
            next.push_back(n);
            require(next.size() <= max_modes, ErrorKind::CapacityExceeded,
                    "closure exceeds " + std::to_string(max_modes) + " modes");
          }
        }
    std::sort(next.begin(), next.end());
    cur = std::move(next);
  }
  return cur;
}

/// All momentum-closed quadruples within the truncation: -1/2 on the diagonal
/// (n,n,n,n), +1/2 on ordered quadruples with n1 != n2, n1 != n4.
inline MonomialTable build_quartic(const std::vector<Mode>& lambda, const std::vector<Mode>& truncation,
                                   std::size_t max_modes = 400) {
  MonomialTable t;
  detail::index_modes(t, truncation);
  require(t.modes.size() <= max_modes, ErrorKind::CapacityExceeded,
          "truncation has " + std::to_string(t.modes.size()) + " modes (cap " + std::to_string(max_modes) + ")");
  const auto inside = mode_set(lambda);
  for (const auto& m : inside)
    require(t.index.count(m) != 0, ErrorKind::InvalidInput, "truncation does not contain Lambda mode " + m.str());
  std::vector<char> in(t.modes.size());
  for (std::size_t i = 0; i < t.modes.size(); ++i) in[i] = inside.count(t.modes[i]) ? 1 : 0;

  const auto M = static_cast<std::uint32_t>(t.modes.size());
  for (std::uint32_t a = 0; a < M; ++a) {
    t.entries.push_back({{a, a, a, a}, cplx{-0.5}, in[a] ? 0 : 4});
    for (std::uint32_t b = 0; b < M; ++b) {
      if (b == a) continue;
      for (std::uint32_t c = 0; c < M; ++c) {
        auto it = t.index.find(t.modes[a] - t.modes[b] + t.modes[c]);
        if (it == t.index.end() || it->second == a) continue;
        const std::uint32_t d = it->second;
        const int cls = 4 - in[a] - in[b] - in[c] - in[d];
        t.entries.push_back({{a, b, c, d}, cplx{0.5}, cls});
      }
    }
  }
  return t;
}

inline double table_energy(const MonomialTable& t, const CVec& z) {
  cplx h{};
  for (const auto& e : t.entries)
    h += e.coeff * z[e.idx[0]] * std::conj(z[e.idx[1]]) * z[e.idx[2]] * std::conj(z[e.idx[3]]);
  return h.real();
}

/// z_n' = i dH/d(conj z_n)
inline void table_field(const MonomialTable& t, const CVec& z, CVec& dz) {
  dz.assign(z.size(), cplx{});
  for (const auto& e : t.entries) {
    const cplx z1 = z[e.idx[0]], z3 = z[e.idx[2]];
    dz[e.idx[1]] += e.coeff * z1 * z3 * std::conj(z[e.idx[3]]);
    dz[e.idx[3]] += e.coeff * z1 * std::conj(z[e.idx[1]]) * z3;
  }
  const cplx I{0.0, 1.0};
  for (auto& x : dz) x *= I;
}

inline CVec table_field(const MonomialTable& t, const CVec& z) {
  CVec dz;
  table_field(t, z, dz);
  return dz;
}

inline MonomialTable filter_class(const MonomialTable& t, const std::vector<int>& classes) {
  MonomialTable r;
  r.modes = t.modes;
  r.index = t.index;
  for (const auto& e : t.entries)
    if (std::find(classes.begin(), classes.end(), e.cls) != classes.end()) r.entries.push_back(e);
  return r;
}

/// Lambda_n = |n|^2_w + V_n on the table modes.
inline std::vector<double> linear_frequencies(const MonomialTable& t, double omega, const PotentialSpec& V) {
  std::vector<double> lam;
  lam.reserve(t.modes.size());
  for (const auto& n : t.modes) lam.push_back(eigenvalue(n, omega) + potential_coeff(V, n));
  return lam;
}

struct Generator {
  MonomialTable table;      // class-1 entries with coeff / (i Omega)
  std::vector<double> divisors;  // Omega_{w,V} per entry
  double L = 0.0;
  double min_divisor = std::numeric_limits<double>::infinity();
};

inline Generator build_generator(const MonomialTable& t, const Frequency& f, const PotentialSpec& V, double L) {
  Generator g;
  g.L = L;
  g.table.modes = t.modes;
  g.table.index = t.index;
  const cplx I{0.0, 1.0};
  for (const auto& e : t.entries) {
    if (e.cls != 1) continue;
    const double om = omega_values(t.quad(e), f, V).total;
    if (std::fabs(om) < L) {
      const auto q = t.quad(e);
      fail(ErrorKind::SmallDivisor, "divisor " + std::to_string(om) + " < L = " + std::to_string(L) + " at " + q[0].str() +
                                        q[1].str() + q[2].str() + q[3].str());
    }
    g.min_divisor = std::min(g.min_divisor, std::fabs(om));
    auto ge = e;
    ge.coeff = e.coeff / (I * om);
    g.table.entries.push_back(ge);
    g.divisors.push_back(om);
  }
  return g;
}

/// max over generator entries of |c + {H2, F}_c| / |c|, where {H2, m} = -i Omega m
/// for a monomial m; zero up to rounding when the homological equation holds.
inline double first_order_residual(const MonomialTable& t, const Generator& g) {
  std::unordered_map<std::uint64_t, cplx> orig;
  auto key = [](const std::array<std::uint32_t, 4>& i) {
    return (static_cast<std::uint64_t>(i[0]) << 48) ^ (static_cast<std::uint64_t>(i[1]) << 32) ^
           (static_cast<std::uint64_t>(i[2]) << 16) ^ i[3];
  };
  for (const auto& e : t.entries)
    if (e.cls == 1) orig[key(e.idx)] += e.coeff;
  const cplx I{0.0, 1.0};
  double worst = 0.0;
  std::unordered_map<std::uint64_t, cplx> bracket;
  for (std::size_t k = 0; k < g.table.entries.size(); ++k) {
    const auto& e = g.table.entries[k];
    bracket[key(e.idx)] += -I * g.divisors[k] * e.coeff;
  }
  for (const auto& [k, c] : orig) {
    const cplx b = bracket.count(k) ? bracket[k] : cplx{};
    worst = std::max(worst, std::abs(c + b) / std::abs(c));
  }
  return worst;
}

struct TransformOptions {
  double eta0 = 0.125;
  int steps = 8;  // fixed 8th-order steps over unit time
};

/// Time-(direction) flow of the generator. Throws RadiusExceeded if the input
/// is outside B(eta0) or the flow leaves B(2 |w|).
inline CVec transform(const CVec& w, const Generator& g, int direction, const TransformOptions& opt = {}) {
  require(direction == 1 || direction == -1, ErrorKind::InvalidInput, "direction must be +1 or -1");
  double l1 = 0.0;
  for (const auto& x : w) l1 += std::abs(x);
  require(l1 < opt.eta0, ErrorKind::RadiusExceeded,
          "input l1 norm " + std::to_string(l1) + " not below eta0 = " + std::to_string(opt.eta0));
  if (g.table.entries.empty()) return w;
  CVec y = w;
  const double h = static_cast<double>(direction) / opt.steps;
  OdeField f = [&](const CVec& x, CVec& dx, double) { table_field(g.table, x, dx); };
  for (int k = 0; k < opt.steps; ++k) {
    integrate_fixed(f, y, k * h, (k + 1) * h, 1);
    double n = 0.0;
    for (const auto& x : y) n += std::abs(x);
    if (n > 2.0 * l1) fail(ErrorKind::RadiusExceeded, "generator flow left B(2 eta)");
  }
  return y;
}

inline FourierState transform(const FourierState& w, const Generator& g, int direction, const TransformOptions& opt = {}) {
  return g.table.to_state(transform(g.table.to_vec(w), g, direction, opt));
}

/// Flow of the generator for time s (any sign), without radius checks.
inline CVec generator_flow(const CVec& w, const Generator& g, double s, int steps) {
  if (g.table.entries.empty() || s == 0.0) return w;
  CVec y = w;
  OdeField f = [&](const CVec& x, CVec& dx, double) { table_field(g.table, x, dx); };
  integrate_fixed(f, y, 0.0, s, steps);
  return y;
}

namespace detail {

// (Phi_s^* X)(w) = D Phi_{-s}(Phi_s w) X(Phi_s w), central differences along X
inline CVec pullback(const MonomialTable& field, const Generator& g, const CVec& w, double s, int steps, double fd_scale) {
  const CVec z = generator_flow(w, g, s, steps);
  const CVec v = table_field(field, z);
  double vn = 0.0;
  for (const auto& x : v) vn += std::norm(x);
  vn = std::sqrt(vn);
  if (vn == 0.0) return v;
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * fd_scale;
  CVec zp = z, zm = z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zp[i] += h * v[i] / vn;
    zm[i] -= h * v[i] / vn;
  }
  const CVec a = generator_flow(zp, g, -s, steps), b = generator_flow(zm, g, -s, steps);
  CVec r(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) r[i] = (a[i] - b[i]) * (vn / (2.0 * h));
  return r;
}

}  // namespace detail

/// Vector field of the remainder R in H o Gamma = H2 + H^(4,0) + H^(4,>=2) + R.
/// Uses {H2, F} = -H^(4,1) to remove the quadratic part analytically:
///   X_R = (Gamma^* X_H4 - X_H4) - int_0^1 (Phi_s^* X_H41 - X_H41) ds,
/// the s-integral by 4-point Gauss-Legendre.
inline CVec remainder_field(const CVec& w, const MonomialTable& quartic, const Generator& g, const TransformOptions& opt = {}) {
  double l1 = 0.0;
  for (const auto& x : w) l1 += std::abs(x);
  require(l1 < opt.eta0, ErrorKind::RadiusExceeded, "input outside B(eta0)");
  CVec r(w.size());
  if (g.table.entries.empty()) return r;
  const double fd = std::max(l1, 1.0);
  const auto h41 = filter_class(quartic, {1});
  const CVec xh4 = table_field(quartic, w);
  const CVec xh41 = table_field(h41, w);
  const CVec pb = detail::pullback(quartic, g, w, 1.0, opt.steps, fd);
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = pb[i] - xh4[i];
  static constexpr std::array<double, 4> nodes{0.0694318442029737, 0.3300094782075719, 0.6699905217924281, 0.9305681557970263};
  static constexpr std::array<double, 4> weights{0.1739274225687269, 0.3260725774312731, 0.3260725774312731, 0.1739274225687269};
  for (std::size_t k = 0; k < 4; ++k) {
    const int st = std::max(1, static_cast<int>(std::ceil(opt.steps * nodes[k])));
    const CVec p = detail::pullback(h41, g, w, nodes[k], st, fd);
    for (std::size_t i = 0; i < w.size(); ++i) r[i] -= weights[k] * (p[i] - xh41[i]);
  }
  return r;
}

/// Direct finite-difference form (D Gamma^{-1})(Gamma w) X_H(Gamma w) - X_H2 - X_H40 - X_H4>=2,
/// affected by cancellation of the quadratic part; used as a cross-check on small instances.
inline CVec remainder_field_direct(const CVec& w, const MonomialTable& quartic, const std::vector<double>& lam,
                                   const Generator& g, const TransformOptions& opt = {}) {
  MonomialTable full = quartic;
  auto Xh = [&](const CVec& z) {
    CVec d = table_field(full, z);
    for (std::size_t i = 0; i < z.size(); ++i) d[i] += cplx{0.0, 1.0} * lam[i] * z[i];
    return d;
  };
  const CVec z = generator_flow(w, g, 1.0, opt.steps);
  const CVec v = Xh(z);
  double vn = 0.0;
  for (const auto& x : v) vn += std::norm(x);
  vn = std::sqrt(vn);
  double l1 = 0.0;
  for (const auto& x : w) l1 += std::abs(x);
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(l1, 1.0);
  CVec zp = z, zm = z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zp[i] += h * v[i] / vn;
    zm[i] -= h * v[i] / vn;
  }
  const CVec a = generator_flow(zp, g, -1.0, opt.steps), b = generator_flow(zm, g, -1.0, opt.steps);
  const auto nf = filter_class(quartic, {0, 2, 3, 4});
  CVec xn = table_field(nf, w);
  CVec r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    r[i] = (a[i] - b[i]) * (vn / (2.0 * h)) - xn[i] - cplx{0.0, 1.0} * lam[i] * w[i];
  return r;
}

// ---------------------------------------------------------------------------
// eta sweeps

struct SweepPoint {
  double eta = 0.0;
  double gamma_dev = 0.0;    // |Gamma(w) - w|_1
  double inverse_dev = 0.0;  // |Gamma^{-1}(w) - w|_1
  double remainder = 0.0;    // |X_R(w)|_1
};

struct SweepReport {
  std::vector<SweepPoint> points;
  double gamma_slope = 0.0;
  double remainder_slope = 0.0;
  double gamma_prefactor = 0.0;      // fitted C in C eta^3
  double remainder_prefactor = 0.0;  // fitted C in C eta^5
  double L = 0.0;
  double min_divisor = 0.0;
  std::size_t generator_terms = 0;
  double first_order_residual = 0.0;
};

inline double l1_norm(const CVec& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::abs(x);
  return s;
}

/// Least-squares slope and intercept of y against x.
inline std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

/// w = eta u for a fixed seeded direction u with |u|_1 = 1 on all table modes.
inline SweepReport eta_sweep(const MonomialTable& quartic, const Generator& g, const std::vector<double>& etas,
                             std::uint64_t seed, const TransformOptions& opt = {}) {
  SweepReport rep;
  rep.L = g.L;
  rep.min_divisor = g.min_divisor;
  rep.generator_terms = g.table.entries.size();
  rep.first_order_residual = first_order_residual(quartic, g);
  const CVec u = quartic.to_vec(random_state(quartic.modes, 1.0, seed));
  std::vector<double> lx, lg, lr;
  for (double eta : etas) {
    CVec w = u;
    for (auto& x : w) x *= eta;
    SweepPoint p;
    p.eta = eta;
    const CVec f = transform(w, g, 1, opt), b = transform(w, g, -1, opt);
    CVec d(w.size()), e(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      d[i] = f[i] - w[i];
      e[i] = b[i] - w[i];
    }
    p.gamma_dev = l1_norm(d);
    p.inverse_dev = l1_norm(e);
    p.remainder = l1_norm(remainder_field(w, quartic, g, opt));
    rep.points.push_back(p);
    lx.push_back(std::log(eta));
    lg.push_back(std::log(p.gamma_dev));
    lr.push_back(std::log(p.remainder));
  }
  if (etas.size() >= 2 && g.table.entries.size() > 0) {
    const auto [sg, ig] = fit_line(lx, lg);
    const auto [sr, ir] = fit_line(lx, lr);
    rep.gamma_slope = sg;
    rep.remainder_slope = sr;
    // prefactors at the nominal exponents
    double cg = 0, cr = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      cg += lg[i] - 3.0 * lx[i];
      cr += lr[i] - 5.0 * lx[i];
    }
    rep.gamma_prefactor = std::exp(cg / static_cast<double>(lx.size()));
    rep.remainder_prefactor = std::exp(cr / static_cast<double>(lx.size()));
    (void)ig;
    (void)ir;
  }
  return rep;
}

inline nlohmann::ordered_json to_json(const SweepReport& r) {
  nlohmann::ordered_json j;
  j["stage"] = "normal_form";
  j["L"] = r.L;
  j["min_divisor"] = r.min_divisor;
  j["generator_terms"] = r.generator_terms;
  j["first_order_residual"] = r.first_order_residual;
  j["gamma_slope"] = r.gamma_slope;
  j["remainder_slope"] = r.remainder_slope;
  j["gamma_prefactor"] = r.gamma_prefactor;
  j["remainder_prefactor"] = r.remainder_prefactor;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : r.points)
    pts.push_back({{"eta", p.eta}, {"gamma_dev", p.gamma_dev}, {"inverse_dev", p.inverse_dev}, {"remainder", p.remainder}});
  j["points"] = pts;
  return j;
}

}  // namespace cascade
