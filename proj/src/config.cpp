#include "modeinv/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "modeinv/errors.hpp"

namespace modeinv {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Keys with a default, in the order they are reported. Keys whose default
// depends on others (cavity.c, atom.speed, atom.resonant_with_mode) are
// resolved separately.
const std::vector<std::pair<std::string, std::string>>& plain_defaults() {
  static const std::vector<std::pair<std::string, std::string>> d = {
      {"units", "natural"},
      {"atom.coupling_ratio", "1e-4"},
      {"field.detuning", "0"},
      {"truncation.max_mode", "10000"},
      {"truncation.tail_tol", "1e-10"},
      {"truncation.resonance_guard", "1e-6"},
      {"truncation.fixed_cutoff", "false"},
      {"quadrature.tol", "1e-10"},
      {"oracle.extra_modes", "1"},
      {"oracle.headroom", "4"},
      {"oracle.others", "2"},
      {"oracle.tol", "1e-12"},
      {"sweep.report", "phase"},
      {"sweep.m", "1"},
      {"resolution.floor", "1e-4"},
  };
  return d;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "units",
      "cavity.length",
      "cavity.c",
      "atom.gap",
      "atom.resonant_with_mode",
      "atom.coupling_ratio",
      "atom.speed",
      "field.mode",
      "field.photons",
      "field.detuning",
      "truncation.max_mode",
      "truncation.tail_tol",
      "truncation.resonance_guard",
      "truncation.fixed_cutoff",
      "quadrature.tol",
      "oracle.extra_modes",
      "oracle.headroom",
      "oracle.others",
      "oracle.tol",
      "sweep.variable",
      "sweep.report",
      "sweep.from",
      "sweep.to",
      "sweep.step",
      "sweep.values",
      "sweep.m",
      "resolution.floor",
  };
  return keys;
}

ResolvedConfig parse_config_text(const std::string& text, const std::string& source,
                                 const std::vector<std::string>& overrides) {
  const auto& known = known_config_keys();
  std::map<std::string, std::string> given;

  auto accept = [&](const std::string& raw, const std::string& where, bool allow_repeat) {
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
    if (!allow_repeat && given.count(key)) {
      throw ConfigError(where + ": key '" + key + "' given twice");
    }
    given[key] = value;
  };

  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    accept(line, source + ":" + std::to_string(number), false);
  }
  for (const auto& o : overrides) accept(o, "override '" + o + "'", true);

  ResolvedConfig cfg;
  std::vector<std::string>& defaulted = cfg.defaulted;
  auto value_of = [&](const std::string& key, const std::string& fallback) {
    if (auto it = given.find(key); it != given.end()) return it->second;
    defaulted.push_back(key);
    given[key] = fallback;
    return fallback;
  };
  auto require = [&](const std::string& key) {
    if (!given.count(key)) throw ConfigError(source + ": missing mandatory key '" + key + "'");
    return given.at(key);
  };

  for (const auto& [key, fallback] : plain_defaults()) value_of(key, fallback);

  cfg.setup.units = parse_units(given.at("units"));
  const bool si = cfg.setup.units == UnitSystem::si;
  cfg.setup.cavity_length = to_double("cavity.length", require("cavity.length"));
  if (si) {
    cfg.setup.light_speed = to_double("cavity.c", require("cavity.c"));
    cfg.setup.atom_speed = to_double("atom.speed", require("atom.speed"));
  } else {
    cfg.setup.light_speed = to_double("cavity.c", value_of("cavity.c", "1"));
    if (cfg.setup.light_speed != 1.0) {
      throw ConfigError(source + ": natural units fix cavity.c = 1; use units = si otherwise");
    }
    cfg.setup.atom_speed = to_double("atom.speed", value_of("atom.speed", "1e-3"));
  }
  cfg.setup.coupling_ratio = to_double("atom.coupling_ratio", given.at("atom.coupling_ratio"));

  cfg.field.mode = to_int("field.mode", require("field.mode"));
  cfg.field.photons = to_int("field.photons", require("field.photons"));
  validate(cfg.field);

  const bool has_gap = given.count("atom.gap") > 0;
  const bool has_mode = given.count("atom.resonant_with_mode") > 0;
  if (has_gap && has_mode) {
    throw ConfigError(source + ": atom.gap and atom.resonant_with_mode are mutually exclusive");
  }
  const double detuning = to_double("field.detuning", given.at("field.detuning"));
  if (has_gap) {
    if (detuning != 0.0) {
      throw ConfigError(source + ": field.detuning needs atom.resonant_with_mode, not atom.gap");
    }
    cfg.setup.gap = GapSpec{to_double("atom.gap", given.at("atom.gap")), std::nullopt, 0.0};
  } else {
    const int mode = to_int("atom.resonant_with_mode",
                            value_of("atom.resonant_with_mode", std::to_string(cfg.field.mode)));
    cfg.setup.gap = GapSpec{std::nullopt, mode, detuning};
  }

  cfg.truncation.max_mode = to_int("truncation.max_mode", given.at("truncation.max_mode"));
  cfg.truncation.tail_tol = to_double("truncation.tail_tol", given.at("truncation.tail_tol"));
  cfg.truncation.resonance_guard =
      to_double("truncation.resonance_guard", given.at("truncation.resonance_guard"));
  cfg.truncation.fixed_cutoff = to_bool("truncation.fixed_cutoff", given.at("truncation.fixed_cutoff"));
  validate(cfg.truncation, cfg.field.mode);

  cfg.quad_tol = to_double("quadrature.tol", given.at("quadrature.tol"));
  if (!(cfg.quad_tol > 0.0)) throw ConfigError(source + ": quadrature.tol must be positive");

  cfg.oracle.extra_modes = to_int("oracle.extra_modes", given.at("oracle.extra_modes"));
  cfg.oracle.headroom = to_int("oracle.headroom", given.at("oracle.headroom"));
  cfg.oracle.others = to_int("oracle.others", given.at("oracle.others"));
  cfg.oracle.integ_tol = to_double("oracle.tol", given.at("oracle.tol"));

  auto& sw = cfg.sweep;
  if (given.count("sweep.variable")) sw.variable = given.at("sweep.variable");
  sw.report = given.at("sweep.report");
  if (given.count("sweep.from")) sw.from = to_double("sweep.from", given.at("sweep.from"));
  if (given.count("sweep.to")) sw.to = to_double("sweep.to", given.at("sweep.to"));
  if (given.count("sweep.step")) sw.step = to_double("sweep.step", given.at("sweep.step"));
  if (given.count("sweep.values")) {
    for (const auto& item : split_list(given.at("sweep.values"))) {
      sw.values.push_back(to_double("sweep.values", item));
    }
  }
  sw.m_list.clear();
  for (const auto& item : split_list(given.at("sweep.m"))) sw.m_list.push_back(to_int("sweep.m", item));
  sw.resolution_floor = to_double("resolution.floor", given.at("resolution.floor"));

  // Parameter-level checks (v < c, positive length, ...) happen here so a
  // config error surfaces at load time.
  build_setup(cfg.setup);

  cfg.values = given;
  std::sort(defaulted.begin(), defaulted.end());
  return cfg;
}

ResolvedConfig parse_config(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string(), overrides);
}

std::filesystem::path preset_directory() { return MODEINV_PRESET_DIR; }

}  // namespace modeinv
