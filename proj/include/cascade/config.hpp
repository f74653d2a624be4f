#pragma once

// TOML run configuration. Sections [frequency], [potential], [lambda_set],
// [toy] and [experiment] are all required; every key has a default.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "toml.hpp"

#include "cascade/diophantine.hpp"
#include "cascade/error.hpp"
#include "cascade/lattice.hpp"

namespace cascade {

struct FrequencyConfig {
  std::string omega = "golden";
  ApproxFunction psi = ApproxFunction::log_kind();
  double L_min = 1.0;
  double c_universal = 0.125;
  bool enforce_assumption = true;
};

struct LambdaConfig {
  int N = 5;
  std::uint64_t seed = 1;
  std::int64_t box = 200;
  int retries = 64;
  std::int64_t hypotenuse = 5;
  double R = 1.0;
  std::optional<Convergent> convergent;  // if absent, select_scaling picks one
};

struct ToyConfig {
  double delta = 0.1;
  double tol = 1e-10;
  double budget = 200.0;
  std::size_t samples = 400;
};

struct ExperimentConfig {
  double lambda = 64.0;
  std::vector<double> lambdas{8.0, 16.0, 32.0, 64.0};
  double epsilon = 0.1;
  double s = 1.5;
  double perturbation = 0.5;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::size_t samples = 200;
  int closure_depth = 0;
  double radius = -1.0;
  bool class0_only = false;
  double t_end = 0.0;  // nls-run horizon; 0 means lambda^2 T0
  // normal-form check instance (a separate small placement scaled by the same convergent)
  int nf_N = 2;
  std::int64_t nf_box = 6;
  std::vector<double> etas{1 / 64.0, 1 / 32.0, 1 / 16.0, 0.125 - 1e-9};
  // strong-regime planner
  double tau = 4.0;
  double s0 = 4.0;
  double plan_epsilon = 0.01;
  double mu = 0.1;
  double C = 1.0;
};

struct Config {
  FrequencyConfig frequency;
  PotentialSpec potential;
  LambdaConfig lambda_set;
  ToyConfig toy;
  ExperimentConfig experiment;
  std::string canonical;  // normalized TOML text, the input of the config hash
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

/// zero | decay:A:s0:seed
inline PotentialSpec parse_potential(const std::string& text) {
  if (text.empty() || text == "zero") return PotentialSpec::zero();
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() == 4 && parts[0] == "decay") {
    try {
      return PotentialSpec::decay(std::stod(parts[1]), std::stod(parts[2]), std::stoull(parts[3]));
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::InvalidInput, "potential '" + text + "' (expected zero or decay:A:s0:seed)");
}

namespace detail {

inline const toml::table& section(const toml::table& root, const char* name) {
  const auto* t = root[name].as_table();
  if (!t) fail(ErrorKind::ConfigError, std::string("missing [") + name + "] section");
  return *t;
}

template <class T>
T get(const toml::table& t, const char* sec, const char* key, T def) {
  const auto node = t[key];
  if (!node) return def;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node.value<double>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node.value<bool>()) return *v;
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node.value<std::string>()) return *v;
  } else {
    if (auto v = node.value<std::int64_t>()) return static_cast<T>(*v);
  }
  fail(ErrorKind::ConfigError, std::string("[") + sec + "] " + key + " has the wrong type");
}

inline std::vector<double> get_list(const toml::table& t, const char* sec, const char* key, std::vector<double> def) {
  const auto node = t[key];
  if (!node) return def;
  const auto* arr = node.as_array();
  if (!arr) fail(ErrorKind::ConfigError, std::string("[") + sec + "] " + key + " must be an array");
  std::vector<double> out;
  for (const auto& x : *arr) {
    auto v = x.value<double>();
    if (!v) fail(ErrorKind::ConfigError, std::string("[") + sec + "] " + key + " must hold numbers");
    out.push_back(*v);
  }
  return out;
}

}  // namespace detail

inline Config parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("TOML: ") + std::string(e.description()));
  }
  using detail::get;
  Config c;
  {
    const auto& t = detail::section(root, "frequency");
    c.frequency.omega = get<std::string>(t, "frequency", "omega", c.frequency.omega);
    const auto kind = get<std::string>(t, "frequency", "psi", "log");
    if (kind == "power")
      c.frequency.psi = ApproxFunction::power(get<double>(t, "frequency", "c", 1.0), get<double>(t, "frequency", "tau", 2.0));
    else if (kind != "log")
      fail(ErrorKind::ConfigError, "[frequency] psi must be log or power");
    c.frequency.L_min = get<double>(t, "frequency", "L_min", c.frequency.L_min);
    c.frequency.c_universal = get<double>(t, "frequency", "c_universal", c.frequency.c_universal);
    c.frequency.enforce_assumption = get<bool>(t, "frequency", "enforce_assumption", c.frequency.enforce_assumption);
  }
  {
    const auto& t = detail::section(root, "potential");
    const auto kind = get<std::string>(t, "potential", "kind", "zero");
    if (kind == "decay")
      c.potential = PotentialSpec::decay(get<double>(t, "potential", "amplitude", 0.0), get<double>(t, "potential", "s0", 2.0),
                                         get<std::uint64_t>(t, "potential", "seed", 0));
    else if (kind != "zero")
      fail(ErrorKind::ConfigError, "[potential] kind must be zero or decay");
  }
  {
    const auto& t = detail::section(root, "lambda_set");
    auto& l = c.lambda_set;
    l.N = get<int>(t, "lambda_set", "N", l.N);
    l.seed = get<std::uint64_t>(t, "lambda_set", "seed", l.seed);
    l.box = get<std::int64_t>(t, "lambda_set", "box", l.box);
    l.retries = get<int>(t, "lambda_set", "retries", l.retries);
    l.hypotenuse = get<std::int64_t>(t, "lambda_set", "hypotenuse", l.hypotenuse);
    l.R = get<double>(t, "lambda_set", "R", l.R);
    if (t["p"] || t["q"]) {
      const auto p = get<std::int64_t>(t, "lambda_set", "p", 0), q = get<std::int64_t>(t, "lambda_set", "q", 0);
      if (p <= 0 || q <= 0) fail(ErrorKind::ConfigError, "[lambda_set] p and q must both be positive");
      l.convergent = Convergent{p, q};
    }
  }
  {
    const auto& t = detail::section(root, "toy");
    c.toy.delta = get<double>(t, "toy", "delta", c.toy.delta);
    c.toy.tol = get<double>(t, "toy", "tol", c.toy.tol);
    c.toy.budget = get<double>(t, "toy", "budget", c.toy.budget);
    c.toy.samples = get<std::size_t>(t, "toy", "samples", c.toy.samples);
  }
  {
    const auto& t = detail::section(root, "experiment");
    auto& e = c.experiment;
    const char* s = "experiment";
    e.lambda = get<double>(t, s, "lambda", e.lambda);
    e.lambdas = detail::get_list(t, s, "lambdas", e.lambdas);
    e.epsilon = get<double>(t, s, "epsilon", e.epsilon);
    e.s = get<double>(t, s, "s", e.s);
    e.perturbation = get<double>(t, s, "perturbation", e.perturbation);
    e.seed = get<std::uint64_t>(t, s, "seed", e.seed);
    e.tol = get<double>(t, s, "tol", e.tol);
    e.samples = get<std::size_t>(t, s, "samples", e.samples);
    e.closure_depth = get<int>(t, s, "closure_depth", e.closure_depth);
    e.radius = get<double>(t, s, "radius", e.radius);
    e.class0_only = get<bool>(t, s, "class0_only", e.class0_only);
    e.t_end = get<double>(t, s, "t_end", e.t_end);
    e.nf_N = get<int>(t, s, "nf_N", e.nf_N);
    e.nf_box = get<std::int64_t>(t, s, "nf_box", e.nf_box);
    e.etas = detail::get_list(t, s, "etas", e.etas);
    e.tau = get<double>(t, s, "tau", e.tau);
    e.s0 = get<double>(t, s, "s0", e.s0);
    e.plan_epsilon = get<double>(t, s, "plan_epsilon", e.plan_epsilon);
    e.mu = get<double>(t, s, "mu", e.mu);
    e.C = get<double>(t, s, "C", e.C);
  }
  std::ostringstream os;
  os << root;
  c.canonical = os.str();
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string config_hash(const Config& c) { return hex64(fnv1a(c.canonical)); }

}  // namespace cascade
