#pragma once

// End-to-end run: frequency -> Lambda -> resonance report -> normal-form check
// -> cascade -> shadowing -> Sobolev ratio -> strong-regime plan.
// Every stage writes one JSON (or CSV) artifact; the manifest lists them with
// content hashes. Wall-clock timings go to a separate file so that manifests
// of identical configs are byte-identical.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cascade/config.hpp"
#include "cascade/diophantine.hpp"
#include "cascade/lambda_set.hpp"
#include "cascade/nls_sim.hpp"
#include "cascade/normal_form.hpp"
#include "cascade/resonance.hpp"
#include "cascade/toy_model.hpp"

namespace cascade {

inline constexpr const char* kVersion = "1.0.0";

using ojson = nlohmann::ordered_json;

struct Instance {
  ContinuedFraction cf;
  Frequency f;
  ScalingChoice scaling;
  PlacedSet base;  // before scaling
  PlacedSet ps;
};

inline ojson convergent_json(const ContinuedFraction& cf, const Convergent& c, const ApproxFunction& psi) {
  ojson j;
  j["p"] = static_cast<double>(c.p);
  j["q"] = static_cast<double>(c.q);
  j["p_exact"] = to_string(c.p);
  j["q_exact"] = to_string(c.q);
  j["error_bound"] = approximation_error(cf, c).hi().to_double(MPFR_RNDU);
  j["certified"] = certify(cf, c, psi);
  return j;
}

inline ScalingChoice choose_scaling(const Config& cfg, const ContinuedFraction& cf) {
  const double supV = potential_sup(cfg.potential);
  if (cfg.lambda_set.convergent) {
    ScalingChoice ch;
    ch.conv = *cfg.lambda_set.convergent;
    ch.certified = certify(cf, ch.conv, cfg.frequency.psi);
    ch.L = scaling_L(omega_value(cf), ch.conv.q, supV);
    ch.assumption_lhs = assumption_lhs(cfg.lambda_set.N, cfg.lambda_set.R, cfg.frequency.psi, ch.conv.q);
    ch.assumption_rhs = cfg.frequency.c_universal;
    return ch;
  }
  ScalingRequest req;
  req.L_min = cfg.frequency.L_min;
  req.N = cfg.lambda_set.N;
  req.R = cfg.lambda_set.R;
  req.sup_V = supV;
  req.c_universal = cfg.frequency.c_universal;
  req.enforce_assumption = cfg.frequency.enforce_assumption;
  return select_scaling(cf, cfg.frequency.psi, req);
}

inline PlacedSet place_from(const LambdaConfig& l, int N, std::int64_t box) {
  PlaceOptions po;
  po.box = box;
  po.retries = l.retries;
  po.hypotenuse = l.hypotenuse;
  return place(build_genealogy(N), l.seed, po);
}

inline Instance make_instance(const Config& cfg) {
  Instance in;
  in.cf = parse_omega(cfg.frequency.omega);
  in.f = make_frequency(in.cf);
  in.scaling = choose_scaling(cfg, in.cf);
  in.base = place_from(cfg.lambda_set, cfg.lambda_set.N, cfg.lambda_set.box);
  in.ps = scale(in.base, in.scaling.conv);
  return in;
}

// ---------------------------------------------------------------------------
// stages

inline ojson stage_frequency(const Config& cfg, const Instance& in) {
  ojson j;
  j["stage"] = "frequency";
  j["omega"] = cfg.frequency.omega;
  j["omega_value"] = in.f.value;
  j["psi"] = cfg.frequency.psi.str();
  auto cs = ojson::array();
  for (const auto& c : available_convergents(in.cf, 12)) cs.push_back(convergent_json(in.cf, c, cfg.frequency.psi));
  j["convergents"] = cs;
  ojson s;
  s["p"] = static_cast<double>(in.scaling.conv.p);
  s["q"] = static_cast<double>(in.scaling.conv.q);
  s["certified"] = in.scaling.certified;
  s["L"] = in.scaling.L;
  s["assumption_lhs"] = in.scaling.assumption_lhs;
  s["assumption_rhs"] = in.scaling.assumption_rhs;
  s["assumption_holds"] = in.scaling.assumption_lhs <= in.scaling.assumption_rhs;
  s["from_config"] = cfg.lambda_set.convergent.has_value();
  j["scaling"] = s;
  return j;
}

inline ojson stage_lambda(const Instance& in, double s, bool& ok) {
  const auto rep = verify_properties(in.ps);
  ok = rep.passed();
  ojson j;
  j["stage"] = "lambda_set";
  j["N"] = in.ps.N();
  j["modes"] = in.ps.all_modes().size();
  j["families"] = in.ps.family_quads().size();
  j["verified"] = ok;
  auto v = ojson::array();
  for (const auto& x : rep.violations) v.push_back(x.property + ": " + x.detail);
  j["violations"] = v;
  const auto st = stats(in.ps, s, in.f.value);
  j["s"] = s;
  j["S"] = st.S;
  j["S_bracket"] = st.S_bracket;
  j["R_empirical"] = st.R_empirical;
  j["C_empirical"] = st.C_empirical;
  j["set"] = to_json(in.ps);
  return j;
}

inline ResonanceReport resonance_report(const PlacedSet& ps, const Frequency& f, const PotentialSpec& V, const ApproxFunction& psi,
                                        double q, std::size_t halo_cap = 16) {
  ResonanceReport r;
  const auto modes = ps.all_modes();
  r.L1 = estimate_L1(modes, f, V, std::numeric_limits<double>::infinity());
  r.U0 = compute_U0(ps, f, V);
  r.L = scaling_L(f.value, static_cast<i128>(q), potential_sup(V));
  const auto st = stats(ps, 1.0, f.value);
  r.R_empirical = st.R_empirical;
  r.C_empirical = st.C_empirical;
  r.theta = theta(ps.N(), r.R_empirical, f.value, q, psi, V.s0);
  if (halo_cap > 0) r.classes = class_extrema(modes, a1_halo(modes, halo_cap), f, V);
  return r;
}

inline ojson stage_resonance(const Config& cfg, const Instance& in) {
  const auto r = resonance_report(in.ps, in.f, cfg.potential, cfg.frequency.psi, static_cast<double>(in.scaling.conv.q));
  ojson j;
  j["stage"] = "resonance";
  const ojson body = to_json(r);
  for (const auto& [k, v] : body.items()) j[k] = v;
  j["L1_at_least_L"] = r.L1.value >= r.L;
  return j;
}

inline SweepReport nf_sweep(const Config& cfg, const Instance& in) {
  const auto& e = cfg.experiment;
  const auto ps = scale(place_from(cfg.lambda_set, e.nf_N, e.nf_box), in.scaling.conv);
  const auto t = build_quartic(ps.all_modes(), completion_closure(ps.all_modes(), 1, -1));
  const auto g = build_generator(t, in.f, cfg.potential, in.scaling.L);
  return eta_sweep(t, g, e.etas, e.seed);
}

inline bool nf_ok(const SweepReport& r) {
  return std::fabs(r.gamma_slope - 3.0) <= 0.1 && r.remainder_slope >= 4.7 && r.first_order_residual <= 1e-12;
}

inline CascadeOrbit cascade_orbit(const Config& cfg) {
  CascadeOptions co;
  co.tol = cfg.toy.tol;
  co.budget = cfg.toy.budget;
  co.samples = cfg.toy.samples;
  return find_cascade(cfg.lambda_set.N, cfg.toy.delta, co);
}

inline Truncation experiment_truncation(const Config& cfg, const Instance& in) {
  return build_truncation(in.ps.all_modes(), cfg.experiment.closure_depth, cfg.experiment.radius, in.f, cfg.potential);
}

inline ShadowOptions shadow_options(const Config& cfg, const Instance& in) {
  const auto& e = cfg.experiment;
  ShadowOptions o;
  o.epsilon = e.epsilon;
  o.perturbation = e.perturbation;
  o.L = std::max(in.scaling.L, 1e-300);
  o.seed = e.seed;
  o.tol = e.tol;
  o.samples = e.samples;
  o.mask = e.class0_only ? kClassZero : kAllClasses;
  return o;
}

inline RatioOptions ratio_options(const Config& cfg) {
  RatioOptions o;
  o.s = cfg.experiment.s;
  o.tol = cfg.experiment.tol;
  o.mask = cfg.experiment.class0_only ? kClassZero : kAllClasses;
  return o;
}

inline ojson stage_strong(const Config& cfg, const Instance& in, double theta_value) {
  const auto& e = cfg.experiment;
  ojson j;
  j["stage"] = "plan_strong";
  StrongPlanInput pi;
  pi.s = e.s;
  pi.tau = e.tau;
  pi.s0 = e.s0;
  pi.epsilon = e.plan_epsilon;
  pi.N = cfg.lambda_set.N;
  pi.omega = in.f.value;
  pi.R = cfg.lambda_set.R;
  pi.C = e.C;
  pi.mu = e.mu;
  try {
    j["plan"] = to_json(plan_strong_regime(pi));
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::InfeasibleRegime) throw;
    j["plan"] = {{"stage", "plan_strong"}, {"feasible", false}, {"binding", err.what()}};
  }
  GronwallInput gi;
  gi.N = cfg.lambda_set.N;
  gi.log_lambda = std::log(e.lambda);
  gi.L = std::max(in.scaling.L, 1e-300);
  gi.theta = theta_value;
  gi.epsilon = e.epsilon;
  j["gronwall"] = to_json(gronwall_conditions(gi));
  return j;
}

// ---------------------------------------------------------------------------
// manifest

struct OutputFile {
  std::string name;
  std::string hash;
};

struct RunManifest {
  std::string config_hash;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<OutputFile> outputs;
  std::vector<std::pair<std::string, double>> seconds;  // wall clock per stage (not part of the manifest file)
  std::vector<std::pair<std::string, bool>> verdicts;
  bool pass = true;
};

inline ojson to_json(const RunManifest& m) {
  ojson j;
  j["config_hash"] = m.config_hash;
  ojson seeds;
  for (const auto& [k, v] : m.seeds) seeds[k] = v;
  j["seeds"] = seeds;
  ojson ver;
  for (const char* mod : {"diophantine", "lattice", "lambda_set", "resonance", "normal_form", "toy_model", "nls_sim", "cli"})
    ver[mod] = kVersion;
  j["module_versions"] = ver;
  auto outs = ojson::array();
  for (const auto& o : m.outputs) outs.push_back({{"file", o.name}, {"fnv1a", o.hash}});
  j["outputs"] = outs;
  ojson v;
  for (const auto& [k, b] : m.verdicts) v[k] = b ? "pass" : "fail";
  j["verdicts"] = v;
  j["verdict"] = m.pass ? "pass" : "fail";
  return j;
}

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidInput, "cannot write " + p.string());
  out << text;
}

inline std::string strip_kind(const Error& e) {
  const std::string w = e.what();
  const auto prefix = std::string(to_string(e.kind())) + ": ";
  return w.rfind(prefix, 0) == 0 ? w.substr(prefix.size()) : w;
}

}  // namespace detail

/// Runs every stage and writes the artifacts plus manifest.json and
/// timings.json into `outdir`. A failing stage raises its error with the
/// stage name attached.
inline RunManifest pipeline(const Config& cfg, const std::string& outdir,
                            const std::function<void(const std::string&)>& log = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.seeds = {{"lambda_set", cfg.lambda_set.seed}, {"potential", cfg.potential.seed}, {"experiment", cfg.experiment.seed}};

  auto emit = [&](const std::string& name, const std::string& text) {
    detail::write_text(fs::path(outdir) / name, text);
    m.outputs.push_back({name, hex64(fnv1a(text))});
  };
  auto run = [&](const std::string& name, const auto& body) {
    if (log) log("stage " + name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      throw Error(e.kind(), "stage " + name + ": " + detail::strip_kind(e));
    }
    m.seconds.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  auto verdict = [&](const std::string& name, bool ok) {
    m.verdicts.emplace_back(name, ok);
    m.pass = m.pass && ok;
  };

  Instance in;
  run("frequency", [&] {
    in.cf = parse_omega(cfg.frequency.omega);
    in.f = make_frequency(in.cf);
    in.scaling = choose_scaling(cfg, in.cf);
    emit("frequency.json", stage_frequency(cfg, in).dump(2));
  });
  run("lambda_set", [&] {
    in.base = place_from(cfg.lambda_set, cfg.lambda_set.N, cfg.lambda_set.box);
    in.ps = scale(in.base, in.scaling.conv);
    bool ok = false;
    emit("lambda.json", stage_lambda(in, cfg.experiment.s, ok).dump(2));
    verdict("lambda_set", ok);
  });
  double theta_value = 0.0;
  run("resonance", [&] {
    const auto j = stage_resonance(cfg, in);
    theta_value = j["theta"].get<double>();
    emit("resonance.json", j.dump(2));
  });
  run("normal_form", [&] {
    const auto r = nf_sweep(cfg, in);
    emit("normal_form.json", to_json(r).dump(2));
    verdict("normal_form", nf_ok(r));
  });
  CascadeOrbit orbit;
  run("cascade", [&] {
    orbit = cascade_orbit(cfg);
    emit("orbit.json", to_json(orbit).dump(2));
    std::ostringstream csv;
    write_trajectory_csv(csv, orbit.trajectory);
    emit("orbit.csv", csv.str());
  });
  Truncation tr;
  run("shadow", [&] {
    tr = experiment_truncation(cfg, in);
    const auto sw = shadow_sweep(in.ps, orbit, cfg.experiment.lambdas, tr, shadow_options(cfg, in));
    emit("shadow.json", to_json(sw).dump(2));
    verdict("shadow", sw.slope <= -1.0);
  });
  run("ratio", [&] {
    const auto r = sobolev_ratio_experiment(in.ps, orbit, cfg.experiment.lambda, tr, in.f, cfg.potential, ratio_options(cfg));
    emit("ratio.json", to_json(r).dump(2));
    verdict("ratio", r.pass);
  });
  run("plan_strong", [&] { emit("plan_strong.json", stage_strong(cfg, in, theta_value).dump(2)); });

  detail::write_text(fs::path(outdir) / "manifest.json", to_json(m).dump(2) + "\n");
  ojson t;
  for (const auto& [k, s] : m.seconds) t[k] = s;
  detail::write_text(fs::path(outdir) / "timings.json", t.dump(2) + "\n");
  return m;
}

}  // namespace cascade
