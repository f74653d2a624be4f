// cascade_lab: command-line front end for every stage of the laboratory.
// Exit codes: 0 pass, 1 verdict fail, 2 error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cascade/config.hpp"
#include "cascade/pipeline.hpp"

using namespace cascade;
using ojson = nlohmann::ordered_json;

namespace {

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidInput, "cannot write " + path);
  out << text;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::InvalidInput, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

ApproxFunction psi_from(const std::string& kind, double c, double tau) {
  if (kind == "log") return ApproxFunction::log_kind();
  if (kind == "power") return ApproxFunction::power(c, tau);
  fail(ErrorKind::InvalidInput, "psi must be log or power");
}

// lo:hi:steps, geometric
std::vector<double> parse_sweep(const std::string& s) {
  double lo = 0, hi = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 || !(lo > 0) || !(hi > lo))
    fail(ErrorKind::InvalidInput, "eta sweep must be lo:hi:steps with 0 < lo < hi and steps >= 2");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidInput, "bad number '" + tok + "' in list");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascade_lab: energy-cascade laboratory on irrational tori"};
  app.require_subcommand(1);
  int code = 0;

  // convergents
  std::string omega = "golden", psi_kind = "log", out;
  std::size_t count = 10;
  double psi_c = 1.0, psi_tau = 2.0;
  auto* conv = app.add_subcommand("convergents", "list convergents with rigorous error bounds and certification");
  conv->add_option("--omega", omega, "digits a0;a1,a2,..., a preset (golden, sqrt2, sqrt3, silver) or p/q")->required();
  conv->add_option("--count", count, "number of convergents");
  conv->add_option("--psi", psi_kind, "approximation function: log or power");
  conv->add_option("--c", psi_c, "power-kind constant");
  conv->add_option("--tau", psi_tau, "power-kind exponent");
  conv->add_option("--out", out, "output file (default stdout)");
  conv->callback([&] {
    const auto cf = parse_omega(omega);
    const auto psi = psi_from(psi_kind, psi_c, psi_tau);
    auto arr = ojson::array();
    for (const auto& c : available_convergents(cf, count)) arr.push_back(convergent_json(cf, c, psi));
    write_out(out, arr.dump(2) + "\n");
  });

  // synthesize
  std::uint64_t seed = 1;
  std::size_t depth = 5;
  auto* syn = app.add_subcommand("synthesize", "build a frequency with power-kind psi-convergents at every level");
  syn->add_option("--tau", psi_tau, "exponent tau")->required();
  syn->add_option("--c", psi_c, "constant c")->required();
  syn->add_option("--seed", seed, "seed");
  syn->add_option("--depth", depth, "number of digits after a0");
  syn->add_option("--out", out, "output file");
  syn->callback([&] {
    const auto psi = ApproxFunction::power(psi_c, psi_tau);
    const auto cf = synthesize(psi, seed, depth);
    ojson j;
    auto digits = ojson::array();
    for (auto d : cf.digits) digits.push_back(to_string(d));
    j["digits"] = digits;
    j["omega_value"] = omega_value(cf);
    auto arr = ojson::array();
    bool all = true;
    for (const auto& c : available_convergents(cf, depth + 1)) {
      arr.push_back(convergent_json(cf, c, psi));
      all = all && arr.back()["certified"].get<bool>();
    }
    j["convergents"] = arr;
    j["all_certified"] = all;
    write_out(out, j.dump(2) + "\n");
    code = all ? 0 : 1;
  });

  // select-scaling
  std::string config;
  auto* sel = app.add_subcommand("select-scaling", "pick the scaling convergent for a config");
  sel->add_option("--config", config, "TOML config")->required();
  sel->add_option("--out", out, "output file");
  sel->callback([&] {
    const auto cfg = load_config(config);
    Instance in;
    in.cf = parse_omega(cfg.frequency.omega);
    in.f = make_frequency(in.cf);
    in.scaling = choose_scaling(cfg, in.cf);
    write_out(out, stage_frequency(cfg, in).dump(2) + "\n");
  });

  // build-lambda
  int N = 3, retries = 64;
  std::int64_t box = 50, p = 1, q = 1, hyp = 5;
  auto* bl = app.add_subcommand("build-lambda", "place a generation set and scale it by a convergent");
  bl->add_option("--N", N, "number of generations")->required();
  bl->add_option("--seed", seed, "seed");
  bl->add_option("--box", box, "first-generation box");
  bl->add_option("--retries", retries, "placement retries");
  bl->add_option("--hypotenuse", hyp, "rotation hypotenuse (1: squares only)");
  bl->add_option("--p", p, "convergent numerator");
  bl->add_option("--q", q, "convergent denominator");
  bl->add_option("--out", out, "output file");
  bl->callback([&] {
    LambdaConfig l;
    l.seed = seed;
    l.retries = retries;
    l.hypotenuse = hyp;
    const auto ps = scale(place_from(l, N, box), {p, q});
    write_out(out, to_json(ps).dump(2) + "\n");
  });

  // verify-lambda
  std::string lambda_file;
  auto* vl = app.add_subcommand("verify-lambda", "exhaustive property scan of a generation set");
  vl->add_option("lambda", lambda_file, "set JSON")->required();
  vl->add_option("--out", out, "output file");
  vl->callback([&] {
    const auto ps = placed_set_from_json(read_json(lambda_file));
    const auto rep = verify_properties(ps);
    ojson j;
    j["points"] = rep.points;
    j["triples_scanned"] = rep.triples_scanned;
    j["verdict"] = rep.passed() ? "pass" : "fail";
    auto v = ojson::array();
    for (const auto& x : rep.violations) {
      auto w = ojson::array();
      for (const auto& m : x.witness) w.push_back({m.j, m.k});
      v.push_back({{"property", x.property}, {"detail", x.detail}, {"witness", w}});
    }
    j["violations"] = v;
    write_out(out, j.dump(2) + "\n");
    code = rep.passed() ? 0 : 1;
  });

  // resonance-report
  std::string potential = "zero";
  double qbox = INFINITY;
  std::size_t halo = 16;
  auto* rr = app.add_subcommand("resonance-report", "L1, U0, theta and per-class extrema for a set");
  rr->add_option("--lambda", lambda_file, "set JSON")->required();
  rr->add_option("--omega", omega, "frequency")->required();
  rr->add_option("--potential", potential, "zero or decay:A:s0:seed");
  rr->add_option("--box", qbox, "completion box for the L1 search (default: unbounded)");
  rr->add_option("--halo", halo, "halo size for class extrema (0: skip)");
  rr->add_option("--psi", psi_kind, "log or power");
  rr->add_option("--c", psi_c, "power-kind constant");
  rr->add_option("--tau", psi_tau, "power-kind exponent");
  rr->add_option("--out", out, "output file");
  rr->callback([&] {
    const auto ps = placed_set_from_json(read_json(lambda_file));
    const auto f = make_frequency(parse_omega(omega));
    const auto V = parse_potential(potential);
    auto r = resonance_report(ps, f, V, psi_from(psi_kind, psi_c, psi_tau), static_cast<double>(ps.q), halo);
    if (std::isfinite(qbox)) r.L1 = estimate_L1(ps.all_modes(), f, V, qbox);
    ojson j;
    j["stage"] = "resonance";
    const ojson body = to_json(r);
    for (const auto& [k, v] : body.items()) j[k] = v;
    write_out(out, j.dump(2) + "\n");
  });

  // nf-check
  double radius = -1.0;
  std::string sweep = "0.015625:0.124:4";
  auto* nf = app.add_subcommand("nf-check", "weak normal form: generator, Gamma and remainder eta-sweeps");
  nf->add_option("--lambda", lambda_file, "set JSON")->required();
  nf->add_option("--truncation-radius", radius, "keep completions with |n| <= radius (default: all)");
  nf->add_option("--omega", omega, "frequency")->required();
  nf->add_option("--potential", potential, "zero or decay:A:s0:seed");
  nf->add_option("--eta-sweep", sweep, "lo:hi:steps (geometric)");
  nf->add_option("--seed", seed, "direction seed");
  nf->add_option("--out", out, "output file");
  nf->callback([&] {
    const auto ps = placed_set_from_json(read_json(lambda_file));
    const auto f = make_frequency(parse_omega(omega));
    const auto V = parse_potential(potential);
    const auto lam = ps.all_modes();
    const auto t = build_quartic(lam, completion_closure(lam, 1, radius));
    const auto g = build_generator(t, f, V, scaling_L(f.value, ps.q, potential_sup(V)));
    const auto r = eta_sweep(t, g, parse_sweep(sweep), seed);
    auto j = to_json(r);
    j["verdict"] = nf_ok(r) ? "pass" : "fail";
    write_out(out, j.dump(2) + "\n");
    code = nf_ok(r) ? 0 : 1;
  });

  // toy-run
  std::string initial = "slider";
  double t_end = 10.0, tol = 1e-10;
  std::size_t samples = 200;
  auto* tr = app.add_subcommand("toy-run", "integrate the toy model and write a trajectory CSV");
  tr->add_option("--N", N, "number of modes")->required();
  tr->add_option("--initial", initial, "JSON state file, or preset: slider, mode3, cascade");
  tr->add_option("--t-end", t_end, "final time");
  tr->add_option("--tol", tol, "integrator tolerance");
  tr->add_option("--samples", samples, "uniform output samples");
  tr->add_option("--out", out, "CSV file (t, re_1, im_1, ...)");
  tr->callback([&] {
    require(N >= 2, ErrorKind::InvalidInput, "toy model needs N >= 2");
    ToyState b0(static_cast<std::size_t>(N));
    if (initial == "slider") {
      const auto s = slider(0.0);
      b0[0] = s[0];
      b0[1] = s[1];
    } else if (initial == "mode3") {
      require(N >= 3, ErrorKind::InvalidInput, "mode3 needs N >= 3");
      b0[2] = 1.0;
    } else if (initial == "cascade") {
      b0 = find_cascade(N, 0.1).initial;
    } else {
      b0 = toy_state_from_json(read_json(initial));
      require(b0.size() == static_cast<std::size_t>(N), ErrorKind::InvalidInput, "initial state has the wrong length");
    }
    std::ostringstream os;
    write_trajectory_csv(os, integrate_toy(b0, t_end, tol, samples));
    write_out(out, os.str());
  });

  // cascade-find
  double delta = 0.1, budget = 200.0;
  auto* cf = app.add_subcommand("cascade-find", "search a toy orbit moving mass from mode 3 to mode N-1");
  cf->add_option("--N", N, "number of modes (5..9)")->required();
  cf->add_option("--delta", delta, "concentration defect");
  cf->add_option("--budget", budget, "bisection budget per junction");
  cf->add_option("--tol", tol, "integrator tolerance");
  cf->add_option("--out", out, "orbit JSON");
  cf->callback([&] {
    CascadeOptions co;
    co.tol = tol;
    co.budget = budget;
    write_out(out, to_json(find_cascade(N, delta, co)).dump(2) + "\n");
  });

  // nls-run
  auto* nr = app.add_subcommand("nls-run", "integrate the truncated NLS from the embedded cascade datum");
  nr->add_option("--config", config, "TOML config")->required();
  nr->add_option("--out", out, "CSV file (t, mass, energy, then re/im per mode in the lab frame)");
  nr->callback([&] {
    const auto cfg = load_config(config);
    const auto in = make_instance(cfg);
    const auto orbit = cascade_orbit(cfg);
    const auto trunc = experiment_truncation(cfg, in);
    const double lam = cfg.experiment.lambda;
    const double T = cfg.experiment.t_end > 0 ? cfg.experiment.t_end : lam * lam * orbit.T0;
    FlowOptions fo;
    fo.tol = cfg.experiment.tol;
    fo.mask = cfg.experiment.class0_only ? kClassZero : kAllClasses;
    fo.frame = Frame::Rotating;
    const auto s = integrate_nls(trunc, trunc.to_vec(embed(orbit.initial, in.ps, lam)), uniform_times(T, cfg.experiment.samples), fo);
    std::ostringstream os;
    os.precision(17);
    os << "t,mass,energy";
    for (const auto& m : trunc.modes) os << ",re" << m.str() << ",im" << m.str();
    os << "\n";
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      const CVec z = rotate(trunc, s.z[k], s.t[k], 1);
      os << s.t[k] << ',' << mass(z) << ',' << energy_H(trunc, z, fo.mask);
      for (const auto& x : z) os << ',' << x.real() << ',' << x.imag();
      os << "\n";
    }
    write_out(out, os.str());
  });

  // shadow
  std::string lambdas;
  auto* sh = app.add_subcommand("shadow", "sup-distance of the NLS trajectory to the scaled toy orbit over a lambda sweep");
  sh->add_option("--config", config, "TOML config")->required();
  sh->add_option("--lambdas", lambdas, "comma-separated lambdas (default: from config)");
  sh->add_option("--out", out, "output JSON");
  sh->callback([&] {
    const auto cfg = load_config(config);
    const auto in = make_instance(cfg);
    const auto orbit = cascade_orbit(cfg);
    const auto trunc = experiment_truncation(cfg, in);
    const auto ls = lambdas.empty() ? cfg.experiment.lambdas : parse_list(lambdas);
    const auto sw = shadow_sweep(in.ps, orbit, ls, trunc, shadow_options(cfg, in));
    auto j = to_json(sw);
    const bool ok = ls.size() >= 2 && sw.slope <= -1.0;
    j["verdict"] = ok ? "pass" : "fail";
    write_out(out, j.dump(2) + "\n");
    code = ok ? 0 : 1;
  });

  // ratio
  auto* ra = app.add_subcommand("ratio", "Sobolev-norm ratio over the cascade time");
  ra->add_option("--config", config, "TOML config")->required();
  ra->add_option("--out", out, "output JSON");
  ra->callback([&] {
    const auto cfg = load_config(config);
    const auto in = make_instance(cfg);
    const auto orbit = cascade_orbit(cfg);
    const auto r = sobolev_ratio_experiment(in.ps, orbit, cfg.experiment.lambda, experiment_truncation(cfg, in), in.f,
                                            cfg.potential, ratio_options(cfg));
    write_out(out, to_json(r).dump(2) + "\n");
    code = r.pass ? 0 : 1;
  });

  // plan-strong
  auto* ps = app.add_subcommand("plan-strong", "strong-regime feasibility, (q, lambda) window and bootstrap conditions");
  ps->add_option("--config", config, "TOML config")->required();
  ps->add_option("--out", out, "output JSON");
  ps->callback([&] {
    const auto cfg = load_config(config);
    Instance in;
    in.cf = parse_omega(cfg.frequency.omega);
    in.f = make_frequency(in.cf);
    in.scaling = choose_scaling(cfg, in.cf);
    const auto j = stage_strong(cfg, in, 0.0);
    write_out(out, j.dump(2) + "\n");
    code = j["plan"]["feasible"].get<bool>() ? 0 : 1;
  });

  // pipeline
  std::string outdir = "run";
  bool quiet = false;
  auto* pl = app.add_subcommand("pipeline", "run every stage and write artifacts plus manifest.json");
  pl->add_option("--config", config, "TOML config")->required();
  pl->add_option("--out", outdir, "output directory");
  pl->add_flag("--quiet", quiet, "no progress on stderr");
  pl->callback([&] {
    const auto cfg = load_config(config);
    const auto m = pipeline(cfg, outdir, [&](const std::string& s) {
      if (!quiet) std::cerr << s << "\n";
    });
    std::cout << to_json(m).dump(2) << "\n";
    code = m.pass ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}
