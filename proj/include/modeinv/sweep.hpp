#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modeinv/config.hpp"

namespace modeinv {

enum class SweepVariable { n, m, delta, speed, coupling_ratio };
enum class SweepReport { phase, resolution, transition };

std::string_view variable_name(SweepVariable v) noexcept;
SweepVariable parse_variable(std::string_view text);
std::string_view report_name(SweepReport r) noexcept;
SweepReport parse_report(std::string_view text);

struct SweepSpec {
  ResolvedConfig base;
  SweepVariable variable = SweepVariable::n;
  SweepReport report = SweepReport::phase;
  std::vector<double> values;  // in row order
  std::vector<int> m_list{1};
  std::filesystem::path output;
};

/// Checks the sweep section of a resolved config and expands the range.
/// Throws ConfigError for a missing or empty range, a variable that does not
/// vary, or a variable that makes no sense for the report.
SweepSpec make_sweep_spec(const ResolvedConfig& config, const std::filesystem::path& output);

/// A finished table: header plus already formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& table);

/// Shortest round-trip-safe text for a double ("%.17g").
std::string format_number(double x);

struct SweepResult {
  Table table;
  std::vector<std::string> warnings;  // first-occurrence order, verbatim
  nlohmann::ordered_json truncation_reports = nlohmann::ordered_json::array();
};

/// Computes every row; failures are recorded in the row's status column.
SweepResult compute_sweep(const SweepSpec& spec, int threads = 1);

/// Everything written next to a CSV.
struct RunManifest {
  std::string command;
  const ResolvedConfig* config = nullptr;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
  std::optional<double> wall_clock_seconds;  // left out unless requested
};

std::filesystem::path manifest_path(const std::filesystem::path& csv);
std::string render_manifest(const RunManifest& manifest, const std::filesystem::path& csv);

/// Writes `text` to `path`, replacing it; ConfigError if the path is not writable.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Runs the sweep and writes the CSV plus its manifest.
SweepResult run_sweep(const SweepSpec& spec, int threads = 1, bool record_timing = false);

}  // namespace modeinv
