#include "modeinv/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "modeinv/detail/parallel.hpp"
#include "modeinv/errors.hpp"
#include "modeinv/observables.hpp"
#include "modeinv/version.hpp"

namespace modeinv {

std::string_view variable_name(SweepVariable v) noexcept {
  switch (v) {
    case SweepVariable::n: return "n";
    case SweepVariable::m: return "m";
    case SweepVariable::delta: return "delta";
    case SweepVariable::speed: return "speed";
    case SweepVariable::coupling_ratio: return "coupling_ratio";
  }
  return "n";
}

SweepVariable parse_variable(std::string_view text) {
  for (auto v : {SweepVariable::n, SweepVariable::m, SweepVariable::delta, SweepVariable::speed,
                 SweepVariable::coupling_ratio}) {
    if (text == variable_name(v)) return v;
  }
  throw ConfigError("sweep variable must be one of n, m, delta, speed, coupling_ratio; got '" +
                    std::string(text) + "'");
}

std::string_view report_name(SweepReport r) noexcept {
  switch (r) {
    case SweepReport::phase: return "phase";
    case SweepReport::resolution: return "resolution";
    case SweepReport::transition: return "transition";
  }
  return "phase";
}

SweepReport parse_report(std::string_view text) {
  for (auto r : {SweepReport::phase, SweepReport::resolution, SweepReport::transition}) {
    if (text == report_name(r)) return r;
  }
  throw ConfigError("sweep report must be phase, resolution or transition; got '" +
                    std::string(text) + "'");
}

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // no "-0" in tables
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

SweepSpec make_sweep_spec(const ResolvedConfig& config, const std::filesystem::path& output) {
  const SweepSettings& s = config.sweep;
  if (s.variable.empty()) throw ConfigError("sweep.variable is not set");
  SweepSpec spec;
  spec.base = config;
  spec.variable = parse_variable(s.variable);
  spec.report = parse_report(s.report);
  spec.m_list = s.m_list;
  spec.output = output;

  const bool has_range = s.from || s.to || s.step;
  if (has_range && !s.values.empty()) {
    throw ConfigError("give either sweep.values or sweep.from/to/step, not both");
  }
  if (has_range) {
    if (!s.from || !s.to || !s.step) throw ConfigError("sweep range needs from, to and step");
    if (!(*s.step != 0.0) || !std::isfinite(*s.step)) throw ConfigError("sweep.step must be nonzero");
    const double span = (*s.to - *s.from) / *s.step;
    if (span < 0.0 || !std::isfinite(span)) throw ConfigError("sweep range is empty");
    const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
    if (count > 10000000) throw ConfigError("sweep range has too many points");
    for (long long i = 0; i < count; ++i) spec.values.push_back(*s.from + i * *s.step);
  } else {
    spec.values = s.values;
  }
  if (spec.values.empty()) throw ConfigError("sweep range is empty");
  if (std::set<double>(spec.values.begin(), spec.values.end()).size() < 2) {
    throw ConfigError("swept variable does not vary");
  }

  const bool integral = spec.variable == SweepVariable::n || spec.variable == SweepVariable::m;
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    if (integral && v != std::round(v)) throw ConfigError("photon-number sweeps need integer values");
    if (spec.variable == SweepVariable::n && v < 0) throw ConfigError("photon numbers must be >= 0");
  }
  if (spec.variable == SweepVariable::m && spec.report != SweepReport::resolution) {
    throw ConfigError("sweeping m only makes sense for the resolution report");
  }
  if (spec.report == SweepReport::resolution && spec.variable != SweepVariable::m &&
      spec.m_list.empty()) {
    throw ConfigError("resolution report needs sweep.m");
  }
  if (spec.variable == SweepVariable::delta && !config.setup.gap.resonant_mode) {
    throw ConfigError("detuning sweeps need atom.resonant_with_mode");
  }
  return spec;
}

namespace {

struct RowOutput {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> warnings;
  nlohmann::ordered_json truncation = nlohmann::ordered_json::object();
};

std::string status_of(const std::exception& e) {
  if (dynamic_cast<const BranchError*>(&e)) return "branch_error";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical_error";
  if (dynamic_cast<const ValidityError*>(&e)) return "validity_error";
  if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
  return "error";
}

std::string integer_text(double v) { return std::to_string(static_cast<long long>(v)); }

RowOutput compute_row(const SweepSpec& spec, double value) {
  RowOutput out;
  SetupParameters params = spec.base.setup;
  FieldPreparation prep = spec.base.field;
  const TruncationPolicy& policy = spec.base.truncation;
  const bool integral = spec.variable == SweepVariable::n || spec.variable == SweepVariable::m;
  const std::string key = integral ? integer_text(value) : format_number(value);
  switch (spec.variable) {
    case SweepVariable::n: prep.photons = static_cast<int>(value); break;
    case SweepVariable::m: break;
    case SweepVariable::delta: params.gap.detuning = value; break;
    case SweepVariable::speed: params.atom_speed = value; break;
    case SweepVariable::coupling_ratio: params.coupling_ratio = value; break;
  }
  out.truncation["value"] = key;

  auto failed_cells = [](std::size_t count) { return std::vector<std::string>(count, "nan"); };

  if (spec.report == SweepReport::resolution) {
    std::vector<int> ms = spec.m_list;
    if (spec.variable == SweepVariable::m) ms = {static_cast<int>(value)};
    try {
      const ProbeSetup setup = build_setup(params);
      out.warnings = setup.warnings();
      const EtaPhase base = eta_phase(setup, prep, policy);
      out.truncation["eta"] = describe(base.truncation);
      out.warnings.insert(out.warnings.end(), base.warnings.begin(), base.warnings.end());
      for (int m : ms) {
        std::string status = "ok";
        std::string dg = "nan";
        try {
          dg = format_number(delta_gamma_exact(setup, prep.mode, prep.photons, m, policy));
        } catch (const Error& e) {
          status = status_of(e);
          out.warnings.push_back(key + ": " + e.what());
        }
        out.rows.push_back({std::to_string(prep.photons), std::to_string(m), dg, status});
      }
    } catch (const Error& e) {
      out.warnings.push_back(key + ": " + e.what());
      for (int m : ms) {
        out.rows.push_back({std::to_string(prep.photons), std::to_string(m), "nan", status_of(e)});
      }
    }
    return out;
  }

  std::vector<std::string> cells{key};
  std::string status = "ok";
  try {
    const ProbeSetup setup = build_setup(params);
    if (spec.report == SweepReport::phase) {
      const ProbeOutcome o = probe_outcome(setup, prep, policy);
      out.warnings = o.warnings;
      out.truncation["probability"] = describe(o.probability.truncation);
      out.truncation["eta"] = describe(o.eta_truncation);
      cells.insert(cells.end(), {format_number(o.gamma), format_number(o.visibility),
                                 format_number(o.validity.value), format_number(o.p_excite)});
      if (o.validity.level == ValidityClass::invalid) status = "validity_invalid";
    } else {
      const TransitionProbability p = transition_probability(setup, prep, policy);
      out.warnings = setup.warnings();
      out.warnings.insert(out.warnings.end(), p.warnings.begin(), p.warnings.end());
      out.truncation["probability"] = describe(p.truncation);
      cells.insert(cells.end(), {format_number(p.total), format_number(p.rotating),
                                 format_number(p.counter_rotating), format_number(p.vacuum)});
    }
  } catch (const Error& e) {
    status = status_of(e);
    out.warnings.push_back(key + ": " + e.what());
    const auto pad = failed_cells(4);
    cells.insert(cells.end(), pad.begin(), pad.end());
  }
  cells.push_back(status);
  out.rows.push_back(std::move(cells));
  return out;
}

std::vector<std::string> header_for(const SweepSpec& spec) {
  const std::string var(variable_name(spec.variable));
  switch (spec.report) {
    case SweepReport::phase: return {var, "gamma", "visibility", "validity", "p_excite", "status"};
    case SweepReport::transition:
      return {var, "p_excite", "rotating", "counter_rotating", "vacuum", "status"};
    case SweepReport::resolution: return {"n", "m", "delta_gamma", "status"};
  }
  return {};
}

}  // namespace

SweepResult compute_sweep(const SweepSpec& spec, int threads) {
  std::vector<RowOutput> rows(spec.values.size());
  detail::parallel_for(spec.values.size(), threads,
                       [&](std::size_t i) { rows[i] = compute_row(spec, spec.values[i]); });
  SweepResult result;
  result.table.header = header_for(spec);
  std::set<std::string> seen;
  for (auto& r : rows) {
    for (auto& cells : r.rows) result.table.rows.push_back(std::move(cells));
    for (auto& w : r.warnings) {
      if (seen.insert(w).second) result.warnings.push_back(w);
    }
    result.truncation_reports.push_back(std::move(r.truncation));
  }
  return result;
}

std::filesystem::path manifest_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".manifest.json");
}

std::string render_manifest(const RunManifest& manifest, const std::filesystem::path& csv) {
  nlohmann::ordered_json j;
  j["toolkit"] = {{"name", kToolkitName}, {"version", kToolkitVersion}};
  j["command"] = manifest.command;
  j["csv"] = csv.filename().string();
  if (manifest.config) {
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.config->values) cfg[k] = v;
    j["config"] = cfg;
    j["defaults_applied"] = manifest.config->defaulted;
  }
  j["details"] = manifest.details;
  j["warnings"] = manifest.warnings;
  if (manifest.wall_clock_seconds) j["wall_clock_seconds"] = *manifest.wall_clock_seconds;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

SweepResult run_sweep(const SweepSpec& spec, int threads, bool record_timing) {
  if (spec.output.empty()) throw ConfigError("a sweep needs an output path");
  const auto parent = std::filesystem::absolute(spec.output).parent_path();
  if (!std::filesystem::is_directory(parent)) {
    throw ConfigError("output directory '" + parent.string() + "' does not exist");
  }
  const auto start = std::chrono::steady_clock::now();
  SweepResult result = compute_sweep(spec, threads);
  const auto stop = std::chrono::steady_clock::now();

  RunManifest m;
  m.command = "sweep";
  m.config = &spec.base;
  nlohmann::ordered_json sw;
  sw["variable"] = variable_name(spec.variable);
  sw["report"] = report_name(spec.report);
  sw["points"] = spec.values.size();
  sw["rows"] = result.table.rows.size();
  if (spec.report == SweepReport::resolution) sw["m"] = spec.m_list;
  m.details["sweep"] = sw;
  m.details["truncation_reports"] = result.truncation_reports;
  m.warnings = result.warnings;
  if (record_timing) m.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();

  write_text(spec.output, to_csv(result.table));
  write_text(manifest_path(spec.output), render_manifest(m, spec.output));
  return result;
}

}  // namespace modeinv
