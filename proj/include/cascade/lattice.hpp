#pragma once

// Fourier lattice Z^2: modes, anisotropic eigenvalues, the convolution
// potential, sparse states and their norms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cascade/error.hpp"
#include "cascade/exact.hpp"
#include "cascade/random.hpp"

namespace cascade {

using cplx = std::complex<double>;

struct Mode {
  std::int64_t j = 0;
  std::int64_t k = 0;

  friend auto operator<=>(const Mode&, const Mode&) = default;
  friend Mode operator+(Mode a, Mode b) { return {a.j + b.j, a.k + b.k}; }
  friend Mode operator-(Mode a, Mode b) { return {a.j - b.j, a.k - b.k}; }
  friend Mode operator-(Mode a) { return {-a.j, -a.k}; }
  friend Mode operator*(std::int64_t s, Mode a) { return {s * a.j, s * a.k}; }

  double norm() const { return std::hypot(static_cast<double>(j), static_cast<double>(k)); }
  std::int64_t norm2() const { return j * j + k * k; }
  std::string str() const { return "(" + std::to_string(j) + "," + std::to_string(k) + ")"; }
};

/// <n> = max{1, |n|}
inline double bracket(const Mode& n) { return std::max(1.0, n.norm()); }

/// |n|^2_w = j^2 + w^2 k^2
inline double eigenvalue(const Mode& n, double omega) {
  const auto j = static_cast<double>(n.j);
  const auto k = static_cast<double>(n.k);
  return j * j + omega * omega * k * k;
}

inline Rational eigenvalue(const Mode& n, const Rational& omega) {
  return Rational(checked_mul(n.j, n.j)) + omega * omega * Rational(checked_mul(n.k, n.k));
}

/// <a, b>_w = a_j b_j + w^2 a_k b_k
inline double dot_omega(const Mode& a, const Mode& b, double omega) {
  return static_cast<double>(a.j) * static_cast<double>(b.j) +
         omega * omega * static_cast<double>(a.k) * static_cast<double>(b.k);
}

inline Rational dot_omega(const Mode& a, const Mode& b, const Rational& omega) {
  return Rational(checked_mul(a.j, b.j)) + omega * omega * Rational(checked_mul(a.k, b.k));
}

// ---------------------------------------------------------------------------
// convolution potential

struct PotentialSpec {
  enum class Kind { Zero, Table, Decay };

  Kind kind = Kind::Zero;
  double s0 = 2.0;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  std::map<Mode, double> table;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec decay(double A, double s0, std::uint64_t seed) {
    PotentialSpec v;
    v.kind = Kind::Decay;
    v.amplitude = A;
    v.s0 = s0;
    v.seed = seed;
    return v;
  }
};

/// Deterministic sign from a splitmix hash of (seed, j, k).
inline double potential_sign(std::uint64_t seed, const Mode& n) {
  std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(n.j));
  h = hash_combine(h, static_cast<std::uint64_t>(n.k));
  return (splitmix64(h) >> 63) ? -1.0 : 1.0;
}

inline double potential_coeff(const PotentialSpec& v, const Mode& n) {
  switch (v.kind) {
    case PotentialSpec::Kind::Zero:
      return 0.0;
    case PotentialSpec::Kind::Table: {
      auto it = v.table.find(n);
      return it == v.table.end() ? 0.0 : it->second;
    }
    case PotentialSpec::Kind::Decay:
      return v.amplitude * std::pow(bracket(n), -v.s0) * potential_sign(v.seed, n);
  }
  return 0.0;
}

/// sup_n |V_n|
inline double potential_sup(const PotentialSpec& v) {
  switch (v.kind) {
    case PotentialSpec::Kind::Zero:
      return 0.0;
    case PotentialSpec::Kind::Table: {
      double m = 0.0;
      for (const auto& [n, x] : v.table) m = std::max(m, std::fabs(x));
      return m;
    }
    case PotentialSpec::Kind::Decay:
      return v.amplitude;
  }
  return 0.0;
}

inline void validate(const PotentialSpec& v) {
  require(v.amplitude >= 0.0 && std::isfinite(v.amplitude), ErrorKind::ConfigError, "potential amplitude must be >= 0");
  require(v.s0 > 0.0, ErrorKind::ConfigError, "potential s0 must be > 0");
  for (const auto& [m, x] : v.table) require(std::isfinite(x), ErrorKind::ConfigError, "non-finite potential entry");
}

// ---------------------------------------------------------------------------
// sparse states

class FourierState {
 public:
  using Map = std::map<Mode, cplx>;

  FourierState() = default;
  explicit FourierState(Map m) : amp_(std::move(m)) {}

  cplx operator[](const Mode& n) const {
    auto it = amp_.find(n);
    return it == amp_.end() ? cplx{} : it->second;
  }
  void set(const Mode& n, cplx z) { amp_[n] = z; }
  void add(const Mode& n, cplx z) { amp_[n] += z; }
  bool contains(const Mode& n) const { return amp_.count(n) != 0; }
  std::size_t size() const { return amp_.size(); }
  bool empty() const { return amp_.empty(); }

  const Map& map() const { return amp_; }
  auto begin() const { return amp_.begin(); }
  auto end() const { return amp_.end(); }

  std::vector<Mode> support() const {
    std::vector<Mode> s;
    s.reserve(amp_.size());
    for (const auto& [m, z] : amp_) s.push_back(m);
    return s;
  }

  // drops exact zeros
  FourierState pruned() const {
    Map m;
    for (const auto& [n, z] : amp_)
      if (z != cplx{}) m.emplace(n, z);
    return FourierState(std::move(m));
  }

  friend FourierState operator+(const FourierState& a, const FourierState& b) {
    FourierState r = a;
    for (const auto& [n, z] : b) r.add(n, z);
    return r;
  }
  friend FourierState operator-(const FourierState& a, const FourierState& b) {
    FourierState r = a;
    for (const auto& [n, z] : b) r.add(n, -z);
    return r;
  }
  friend FourierState operator*(cplx s, const FourierState& a) {
    FourierState r = a;
    for (auto& [n, z] : r.amp_) z *= s;
    return r;
  }

 private:
  Map amp_;
};

struct Norms {
  double h_s = 0.0;
  double l1 = 0.0;
  double mass = 0.0;
  std::array<double, 2> momentum{0.0, 0.0};
};

// fixed summation order: lexicographic over the support
inline Norms norms(const FourierState& z, double s) {
  Norms r;
  double hs2 = 0.0;
  for (const auto& [n, a] : z) {
    const double m2 = std::norm(a);
    hs2 += m2 * std::pow(bracket(n), 2.0 * s);
    r.l1 += std::abs(a);
    r.mass += m2;
    r.momentum[0] += static_cast<double>(n.j) * m2;
    r.momentum[1] += static_cast<double>(n.k) * m2;
  }
  r.h_s = std::sqrt(hs2);
  return r;
}

inline double hs_norm2(const FourierState& z, double s) {
  double hs2 = 0.0;
  for (const auto& [n, a] : z) hs2 += std::norm(a) * std::pow(bracket(n), 2.0 * s);
  return hs2;
}

inline double l1_norm(const FourierState& z) {
  double r = 0.0;
  for (const auto& [n, a] : z) r += std::abs(a);
  return r;
}

inline double mass(const FourierState& z) {
  double r = 0.0;
  for (const auto& [n, a] : z) r += std::norm(a);
  return r;
}

/// u = e^{2i M t} z (direction +1) and its inverse.
inline FourierState gauge(const FourierState& z, double t, int direction) {
  require(direction == 1 || direction == -1, ErrorKind::InvalidInput, "gauge direction must be +1 or -1");
  const cplx f = std::polar(1.0, 2.0 * direction * mass(z) * t);
  return f * z;
}

/// (z * w)_n = sum_{a+b=n} z_a w_b
inline FourierState convolve(const FourierState& z, const FourierState& w) {
  FourierState r;
  for (const auto& [a, za] : z)
    for (const auto& [b, wb] : w) r.add(a + b, za * wb);
  return r;
}

/// Seeded random state supported on the given modes, amplitudes uniform in a
/// box then rescaled so the l1 norm equals `l1`.
inline FourierState random_state(const std::vector<Mode>& modes, double l1, std::uint64_t seed) {
  SplitMix64 rng(seed);
  FourierState z;
  double tot = 0.0;
  for (const auto& m : modes) {
    const cplx a{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    z.set(m, a);
    tot += std::abs(a);
  }
  if (tot > 0.0) z = cplx{l1 / tot} * z;
  return z;
}

// ---------------------------------------------------------------------------
// JSON lines I/O: {"j":int,"k":int,"re":float,"im":float}, lexicographic order

inline void write_state(std::ostream& os, const FourierState& z) {
  for (const auto& [n, a] : z) {
    nlohmann::ordered_json row;
    row["j"] = n.j;
    row["k"] = n.k;
    row["re"] = a.real();
    row["im"] = a.imag();
    os << row.dump() << '\n';
  }
}

inline FourierState read_state(std::istream& is) {
  FourierState z;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto row = nlohmann::json::parse(line);
      const Mode n{row.at("j").get<std::int64_t>(), row.at("k").get<std::int64_t>()};
      require(!z.contains(n), ErrorKind::InvalidInput, "duplicate mode " + n.str());
      z.set(n, {row.at("re").get<double>(), row.at("im").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::InvalidInput, "state line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return z;
}

inline nlohmann::json to_json(const Mode& n) { return nlohmann::json::array({n.j, n.k}); }
inline Mode mode_from_json(const nlohmann::json& j) { return {j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()}; }

}  // namespace cascade
