#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modeinv/model.hpp"

namespace modeinv {

/// Oracle settings that can come from a config file.
struct OracleSettings {
  int extra_modes = 1;  // modes 1..α+extra_modes
  int headroom = 4;
  int others = 2;
  double integ_tol = 1e-12;
};

/// Sweep axis and range as written in a config file; validated by the sweep module.
struct SweepSettings {
  std::string variable;  // n | m | delta | speed | coupling_ratio
  std::string report = "phase";
  std::optional<double> from;
  std::optional<double> to;
  std::optional<double> step;
  std::vector<double> values;  // explicit list, alternative to from/to/step
  std::vector<int> m_list{1};
  double resolution_floor = 1e-4;
};

struct ResolvedConfig {
  SetupParameters setup;
  FieldPreparation field;
  TruncationPolicy truncation;
  double quad_tol = 1e-10;
  OracleSettings oracle;
  SweepSettings sweep;
  /// Every known key with the value in effect; `defaulted` names those not
  /// given explicitly.
  std::map<std::string, std::string> values;
  std::vector<std::string> defaulted;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, repeated
/// keys and malformed values are ConfigErrors. `overrides` are applied after
/// the text, as if appended to it.
ResolvedConfig parse_config_text(const std::string& text, const std::string& source = "<config>",
                                 const std::vector<std::string>& overrides = {});

ResolvedConfig parse_config(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});

/// Directory of the shipped presets (fig3.cfg, fig4.cfg, fig5.cfg).
std::filesystem::path preset_directory();

/// Keys accepted in config files, in a fixed order.
const std::vector<std::string>& known_config_keys();

}  // namespace modeinv
