// Command-line front end. Every subcommand writes one CSV table (stdout or
// --output) and, when writing to a file, a manifest next to it.

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "modeinv/amplitudes.hpp"
#include "modeinv/config.hpp"
#include "modeinv/errors.hpp"
#include "modeinv/kernels.hpp"
#include "modeinv/observables.hpp"
#include "modeinv/oracle.hpp"
#include "modeinv/sweep.hpp"
#include "modeinv/version.hpp"

using namespace modeinv;

namespace {

// Used when neither --config nor --preset is given.
constexpr const char* kDefaultConfig =
    "cavity.length = 1\n"
    "field.mode = 2\n"
    "field.photons = 0\n";

struct Globals {
  std::string config;
  std::string preset;
  std::string output;
  std::vector<std::string> overrides;
  int threads = 1;
  bool quiet = false;
  bool timing = false;
};

class Run {
 public:
  explicit Run(const Globals& g) : g_(g), start_(std::chrono::steady_clock::now()) {
    if (!g.config.empty() && !g.preset.empty()) {
      throw ConfigError("--config and --preset are mutually exclusive");
    }
    if (!g.config.empty()) {
      cfg_ = parse_config(g.config, g.overrides);
    } else if (!g.preset.empty()) {
      cfg_ = parse_config(preset_directory() / (g.preset + ".cfg"), g.overrides);
    } else {
      cfg_ = parse_config_text(kDefaultConfig, "<built-in defaults>", g.overrides);
    }
  }

  const ResolvedConfig& config() const { return cfg_; }
  ProbeSetup setup() {
    ProbeSetup s = build_setup(cfg_.setup);
    for (const auto& w : s.warnings()) warn(w);
    return s;
  }

  void warn(const std::string& w) {
    for (const auto& existing : warnings_) {
      if (existing == w) return;
    }
    warnings_.push_back(w);
    if (!g_.quiet) std::cerr << "warning: " << w << "\n";
  }
  void warn_all(const std::vector<std::string>& ws) {
    for (const auto& w : ws) warn(w);
  }
  void info(const std::string& line) const {
    if (!g_.quiet) std::cerr << line << "\n";
  }

  void emit(const std::string& command, const Table& table,
            nlohmann::ordered_json details = nlohmann::ordered_json::object()) {
    const std::string csv = to_csv(table);
    if (g_.output.empty()) {
      std::cout << csv;
      return;
    }
    RunManifest m;
    m.command = command;
    m.config = &cfg_;
    m.details = std::move(details);
    m.warnings = warnings_;
    if (g_.timing) {
      m.wall_clock_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    write_text(g_.output, csv);
    write_text(manifest_path(g_.output), render_manifest(m, g_.output));
  }

 private:
  const Globals& g_;
  ResolvedConfig cfg_;
  std::vector<std::string> warnings_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<Sign> signs_from(const std::string& text) {
  if (text == "both") return {Sign::plus, Sign::minus};
  return {parse_sign(text)};
}

std::string fmt(double x) { return format_number(x); }

void run_amplitudes(Run& run, std::vector<int> modes, const std::string& sign, bool check) {
  const ProbeSetup s = run.setup();
  if (modes.empty()) modes = {run.config().field.mode};
  Table t;
  t.header = {"beta", "sign", "re_closed", "im_closed", "re_quad", "im_quad", "abs_err"};
  for (int beta : modes) {
    for (Sign sg : signs_from(sign)) {
      const auto x = x_closed(s, beta, sg, run.config().truncation.resonance_guard);
      std::vector<std::string> row{std::to_string(beta), std::string(1, sign_symbol(sg)),
                                   fmt(x.real()), fmt(x.imag())};
      if (check) {
        const auto q = x_quadrature(s, beta, sg, run.config().quad_tol);
        row.insert(row.end(), {fmt(q.value.real()), fmt(q.value.imag()), fmt(std::abs(x - q.value))});
      } else {
        row.insert(row.end(), {"nan", "nan", "nan"});
      }
      t.rows.push_back(row);
    }
  }
  run.emit("amplitudes", t);
}

void run_kernels(Run& run, std::vector<int> modes, const std::string& sign, bool check,
                 bool mode_sum) {
  const ProbeSetup s = run.setup();
  const auto& cfg = run.config();
  Table t;
  if (mode_sum) {
    const ModeSum sum = mode_sum_offres(s, cfg.field, cfg.truncation);
    run.warn_all(sum.warnings);
    t.header = {"re_mode_sum", "im_mode_sum", "modes_used", "last_mode", "tail_estimate",
                "converged"};
    t.rows.push_back({fmt(sum.value.real()), fmt(sum.value.imag()),
                      std::to_string(sum.report.modes_used), std::to_string(sum.report.last_mode),
                      fmt(sum.report.tail_estimate), sum.report.converged ? "true" : "false"});
    run.emit("kernels", t);
    return;
  }
  if (modes.empty()) modes = {cfg.field.mode};
  t.header = {"beta", "sign", "re_closed", "im_closed", "re_quad", "im_quad"};
  for (int beta : modes) {
    for (Sign sg : signs_from(sign)) {
      const auto c = c_closed(s, beta, sg, cfg.truncation.resonance_guard);
      std::vector<std::string> row{std::to_string(beta), std::string(1, sign_symbol(sg)),
                                   fmt(c.real()), fmt(c.imag())};
      if (check) {
        const auto q = c_quadrature(s, beta, sg, cfg.quad_tol);
        row.insert(row.end(), {fmt(q.value.real()), fmt(q.value.imag())});
      } else {
        row.insert(row.end(), {"nan", "nan"});
      }
      t.rows.push_back(row);
    }
  }
  run.emit("kernels", t);
}

void run_transition(Run& run) {
  const ProbeSetup s = run.setup();
  const auto p = transition_probability(s, run.config().field, run.config().truncation);
  run.warn_all(p.warnings);
  Table t;
  t.header = {"p_excite", "rotating", "counter_rotating", "vacuum", "modes_used", "tail_estimate"};
  t.rows.push_back({fmt(p.total), fmt(p.rotating), fmt(p.counter_rotating), fmt(p.vacuum),
                    std::to_string(p.truncation.modes_used), fmt(p.truncation.tail_estimate)});
  nlohmann::ordered_json d;
  d["truncation"] = describe(p.truncation);
  run.emit("transition", t, d);
}

void run_phase(Run& run) {
  const ProbeSetup s = run.setup();
  const ProbeOutcome o = probe_outcome(s, run.config().field, run.config().truncation);
  run.warn_all(o.warnings);
  if (o.validity.level == ValidityClass::invalid) {
    std::ostringstream msg;
    msg << "validity estimator " << o.validity.value << " >= 1; perturbative phase not trusted";
    throw ValidityError(msg.str());
  }
  Table t;
  t.header = {"p_excite", "gamma", "visibility", "validity"};
  t.rows.push_back({fmt(o.p_excite), fmt(o.gamma), fmt(o.visibility), fmt(o.validity.value)});
  nlohmann::ordered_json d;
  d["eta"] = {fmt(o.eta.real()), fmt(o.eta.imag())};
  d["truncation"] = {{"probability", describe(o.probability.truncation)},
                     {"eta", describe(o.eta_truncation)}};
  run.emit("phase", t, d);
}

void run_resolution(Run& run, std::vector<int> ms, std::optional<int> n_from,
                    std::optional<int> n_to, std::optional<double> floor) {
  const ProbeSetup s = run.setup();
  const auto& cfg = run.config();
  if (ms.empty()) ms = cfg.sweep.m_list;
  const int first = n_from.value_or(cfg.field.photons);
  const int last = n_to.value_or(first + 10);
  const double res_floor = floor.value_or(cfg.sweep.resolution_floor);
  const ResolutionCurve curve =
      resolution_curve(s, cfg.field.mode, ms, first, last, cfg.truncation, res_floor);
  Table t;
  t.header = {"n", "m", "delta_gamma"};
  for (const auto& r : curve.rows) {
    t.rows.push_back({std::to_string(r.n), std::to_string(r.m), fmt(r.delta_gamma)});
    if (r.status != "ok") run.warn("n=" + std::to_string(r.n) + " m=" + std::to_string(r.m) + ": " + r.status);
  }
  nlohmann::ordered_json d;
  d["resolution_floor"] = res_floor;
  if (curve.threshold_n) {
    d["threshold_n"] = *curve.threshold_n;
    run.info("threshold: largest n with delta_1 gamma >= " + fmt(res_floor) + " is " +
             std::to_string(*curve.threshold_n));
  } else {
    d["threshold_n"] = nullptr;
    run.info("threshold: no n in range reaches delta_1 gamma >= " + fmt(res_floor));
  }
  run.emit("resolution", t, d);
}

void run_fringe(Run& run, std::optional<int> known, int unknown, std::vector<double> phis,
                int phi_steps) {
  const ProbeSetup s = run.setup();
  const auto& cfg = run.config();
  const FieldPreparation a{cfg.field.mode, known.value_or(cfg.field.photons)};
  const FieldPreparation b{cfg.field.mode, unknown};
  if (phi_steps > 0) {
    phis.clear();
    for (int k = 0; k < phi_steps; ++k) phis.push_back(2.0 * std::numbers::pi * k / phi_steps);
  }
  if (phis.empty()) phis = {0.0};
  Table t;
  t.header = {"phi", "p_plus", "p_minus"};
  nlohmann::ordered_json d;
  for (double phi : phis) {
    const FringeResult f = fringe(s, a, b, phi, cfg.truncation);
    t.rows.push_back({fmt(phi), fmt(f.p_plus), fmt(f.p_minus)});
    d["delta_gamma"] = f.delta_gamma;
    d["visibility"] = f.visibility;
  }
  run.emit("fringe", t, d);
}

HilbertTruncation oracle_truncation(const ResolvedConfig& cfg, std::optional<int> modes,
                                    std::optional<int> headroom) {
  const int extra = modes ? *modes - cfg.field.mode : cfg.oracle.extra_modes;
  if (extra < 0) throw ConfigError("--modes must include the probed mode");
  return default_truncation(cfg.field, headroom.value_or(cfg.oracle.headroom), extra,
                            cfg.oracle.others);
}

void run_verify(Run& run, std::optional<int> modes, std::optional<int> headroom,
                std::optional<double> tol, const std::string& scan, int scan_steps, int threads) {
  const auto& cfg = run.config();
  run.setup();
  const HilbertTruncation trunc = oracle_truncation(cfg, modes, headroom);
  OracleOptions opts;
  opts.integ_tol = tol.value_or(cfg.oracle.integ_tol);

  if (!scan.empty()) {
    const ScanTable table = convergence_scan(build_setup(cfg.setup), cfg.field, trunc, opts,
                                             parse_axis(scan), scan_steps, threads);
    Table t;
    t.header = {std::string(axis_name(table.axis)), "gamma", "im_eta", "p_excite", "norm_drift",
                "gamma_change", "p_change", "converged"};
    for (const auto& r : table.rows) {
      t.rows.push_back({fmt(r.parameter), fmt(r.result.eta_numeric.real()),
                        fmt(r.result.eta_numeric.imag()), fmt(r.result.p_excite_numeric),
                        fmt(r.result.norm_drift), fmt(r.gamma_change), fmt(r.p_change),
                        r.converged ? "true" : "false"});
    }
    std::cerr << "scan " << axis_name(table.axis) << ": "
              << (table.converged ? "converged" : "NOT converged") << " (threshold "
              << table.threshold << " relative)\n";
    run.emit("verify", t);
    return;
  }

  const HalvingStudy study = halving_study(cfg.setup, cfg.field, trunc, opts, 2, threads);
  Table t;
  t.header = {"observable", "coupling_ratio", "perturbative", "oracle", "abs_dev", "rel_dev"};
  auto add = [&t](const std::string& name, double ratio, double pert, double oracle) {
    const double dev = std::abs(oracle - pert);
    const double scale = std::max(std::abs(oracle), std::abs(pert));
    t.rows.push_back({name, fmt(ratio), fmt(pert), fmt(oracle), fmt(dev),
                      fmt(scale > 0.0 ? dev / scale : 0.0)});
  };
  bool unitary = true;
  bool survival = true;
  double drift = 0.0;
  for (const auto& c : study.levels) {
    add("p_excite", c.coupling_ratio, c.p_perturbative, c.oracle.p_excite_numeric);
    add("gamma", c.coupling_ratio, c.gamma_perturbative, c.oracle.eta_numeric.real());
    add("im_eta", c.coupling_ratio, c.im_eta_perturbative, c.oracle.eta_numeric.imag());
    drift = std::max(drift, c.oracle.norm_drift);
    unitary = unitary && c.oracle.norm_drift <= 10.0 * opts.integ_tol;
    survival = survival && survival_margin(c.oracle) >= 0.0;
  }
  auto fourth_order = [](double ratio) { return ratio >= 16.0 * 0.7 && ratio <= 16.0 * 1.3; };
  const double gr = study.gamma_ratios.front();
  const double pr = study.p_ratios.front();
  const bool pass = unitary && survival && fourth_order(gr) && fourth_order(pr);
  std::cerr << "verify: " << (pass ? "PASS" : "FAIL") << " norm_drift=" << drift << " ("
            << (unitary ? "ok" : "too large") << ") survival=" << (survival ? "ok" : "violated")
            << " gamma_error_ratio=" << gr << (fourth_order(gr) ? " (ok)" : " (not x16)")
            << " p_error_ratio=" << pr << (fourth_order(pr) ? " (ok)" : " (not x16)") << "\n";
  nlohmann::ordered_json d;
  d["dimension"] = study.levels.front().oracle.step_report.dimension;
  d["steps"] = study.levels.front().oracle.step_report.steps;
  d["gamma_error_ratio"] = gr;
  d["p_error_ratio"] = pr;
  d["pass"] = pass;
  run.emit("verify", t, d);
}

void run_sweep_command(Run& run, const Globals& g) {
  if (g.output.empty()) throw ConfigError("sweep needs --output");
  run.setup();
  const SweepSpec spec = make_sweep_spec(run.config(), g.output);
  const SweepResult r = run_sweep(spec, g.threads, g.timing);
  if (!g.quiet) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  }
  run.info("wrote " + std::to_string(r.table.rows.size()) + " rows to " + g.output);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-invisibility probe toolkit: amplitudes, kernels, phases and oracle checks"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", g.config, "Configuration file (key = value lines)");
  app.add_option("--preset", g.preset, "Shipped preset: fig3, fig4 or fig5");
  app.add_option("--output", g.output, "CSV destination; a manifest is written next to it");
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set field.photons=3");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress warnings and progress notes");
  app.add_flag("--timing", g.timing, "Record wall-clock duration in the manifest");

  std::vector<int> modes;
  std::string sign = "both";
  bool check = false;
  bool mode_sum = false;
  auto* amp = app.add_subcommand("amplitudes", "First-order amplitudes X(+/-, beta)");
  amp->add_option("--mode", modes, "Mode index beta (repeatable)");
  amp->add_option("--sign", sign, "+, - or both");
  amp->add_flag("--quadrature-check", check, "Also integrate numerically");

  auto* ker = app.add_subcommand("kernels", "Second-order kernels C(+/-, beta)");
  ker->add_option("--mode", modes, "Mode index beta (repeatable)");
  ker->add_option("--sign", sign, "+, - or both");
  ker->add_flag("--quadrature-check", check, "Also integrate numerically");
  ker->add_flag("--mode-sum", mode_sum, "Emit the off-resonant mode sum instead");

  auto* tra = app.add_subcommand("transition", "Transition probability and its three terms");
  auto* pha = app.add_subcommand("phase", "Phase, visibility and validity for one preparation");

  std::vector<int> ms;
  std::optional<int> n_from;
  std::optional<int> n_to;
  std::optional<double> res_floor;
  auto* res = app.add_subcommand("resolution", "Phase differences between n+m and n photons");
  res->add_option("--m", ms, "Photon differences (repeatable)");
  res->add_option("--n-from", n_from, "First n (default field.photons)");
  res->add_option("--n-to", n_to, "Last n (default n-from + 10)");
  res->add_option("--floor", res_floor, "Resolution floor for the threshold report");

  std::optional<int> known;
  int unknown = 0;
  std::vector<double> phis;
  int phi_steps = 0;
  auto* fri = app.add_subcommand("fringe", "Interferometer output ports");
  fri->add_option("--known", known, "Photons in the reference arm (default field.photons)");
  fri->add_option("--unknown", unknown, "Photons in the probed arm")->required();
  fri->add_option("--phi", phis, "Reference phase (repeatable)");
  fri->add_option("--phi-steps", phi_steps, "Evenly spaced reference phases over [0, 2pi)");

  std::optional<int> o_modes;
  std::optional<int> o_headroom;
  std::optional<double> o_tol;
  std::string scan;
  int scan_steps = 3;
  auto* ver = app.add_subcommand("verify", "Compare against the truncated Fock-space evolution");
  ver->add_option("--modes", o_modes, "Oracle keeps modes 1..N");
  ver->add_option("--headroom", o_headroom, "Photons above n kept in the probed mode");
  ver->add_option("--tol", o_tol, "Integrator tolerance");
  ver->add_option("--scan", scan, "Convergence scan axis: modes, headroom or integ_tol");
  ver->add_option("--scan-steps", scan_steps, "Points in the convergence scan");

  auto* swp = app.add_subcommand("sweep", "Parameter sweep to CSV plus manifest");
  std::vector<std::string> sweep_sets;
  auto sweep_opt = [&](const char* flag, const char* key, const char* help) {
    swp->add_option_function<std::string>(
        flag, [&sweep_sets, key](const std::string& v) { sweep_sets.push_back(std::string(key) + "=" + v); },
        help);
  };
  sweep_opt("--var", "sweep.variable", "n, m, delta, speed or coupling_ratio");
  sweep_opt("--report", "sweep.report", "phase, resolution or transition");
  sweep_opt("--from", "sweep.from", "First value");
  sweep_opt("--to", "sweep.to", "Last value");
  sweep_opt("--step", "sweep.step", "Step");
  sweep_opt("--values", "sweep.values", "Comma-separated values");
  sweep_opt("--m", "sweep.m", "Comma-separated photon differences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    g.overrides.insert(g.overrides.end(), sweep_sets.begin(), sweep_sets.end());
    Run run(g);
    if (*amp) run_amplitudes(run, modes, sign, check);
    if (*ker) run_kernels(run, modes, sign, check, mode_sum);
    if (*tra) run_transition(run);
    if (*pha) run_phase(run);
    if (*res) run_resolution(run, ms, n_from, n_to, res_floor);
    if (*fri) run_fringe(run, known, unknown, phis, phi_steps);
    if (*ver) run_verify(run, o_modes, o_headroom, o_tol, scan, scan_steps, g.threads);
    if (*swp) run_sweep_command(run, g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ValidityError& e) {
    std::cerr << "validity guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
