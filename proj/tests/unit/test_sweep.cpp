#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "modeinv/errors.hpp"
#include "modeinv/sweep.hpp"

using namespace modeinv;
namespace fs = std::filesystem;

namespace {

const char* kBase =
    "cavity.length = 1\n"
    "field.mode = 2\n"
    "field.photons = 0\n";

ResolvedConfig with(const std::vector<std::string>& overrides) {
  return parse_config_text(kBase, "<t>", overrides);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "modeinv_sweep_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  fs::remove(manifest_path(p));
  return p;
}

}  // namespace

TEST(Sweep, RangeExpansion) {
  const SweepSpec s = make_sweep_spec(
      with({"sweep.variable=n", "sweep.from=0", "sweep.to=4", "sweep.step=2"}), "x.csv");
  EXPECT_EQ(s.values, (std::vector<double>{0, 2, 4}));
  const SweepSpec v = make_sweep_spec(with({"sweep.variable=speed", "sweep.values=1e-3,2e-3"}), "x.csv");
  EXPECT_EQ(v.values.size(), 2u);
}

TEST(Sweep, RejectsBadRanges) {
  EXPECT_THROW(make_sweep_spec(with({}), "x.csv"), ConfigError);
  EXPECT_THROW(make_sweep_spec(with({"sweep.variable=n", "sweep.from=5", "sweep.to=1", "sweep.step=1"}),
                               "x.csv"),
               ConfigError);
  EXPECT_THROW(make_sweep_spec(with({"sweep.variable=n", "sweep.from=1", "sweep.to=1", "sweep.step=1"}),
                               "x.csv"),
               ConfigError);
  EXPECT_THROW(make_sweep_spec(with({"sweep.variable=n", "sweep.from=1", "sweep.to=3"}), "x.csv"),
               ConfigError);
  EXPECT_THROW(make_sweep_spec(with({"sweep.variable=n", "sweep.values=1.5,2"}), "x.csv"), ConfigError);
  EXPECT_THROW(make_sweep_spec(with({"sweep.variable=m", "sweep.values=1,2"}), "x.csv"), ConfigError);
  EXPECT_THROW(make_sweep_spec(with({"sweep.variable=photons", "sweep.values=1,2"}), "x.csv"),
               ConfigError);
  EXPECT_THROW(make_sweep_spec(with({"sweep.variable=n", "sweep.values=1,2", "sweep.report=plot"}),
                               "x.csv"),
               ConfigError);
}

TEST(Sweep, EmptyRangeWritesNothing) {
  const fs::path out = scratch("empty.csv");
  EXPECT_THROW(
      {
        const SweepSpec s = make_sweep_spec(
            with({"sweep.variable=n", "sweep.from=3", "sweep.to=0", "sweep.step=1"}), out);
        run_sweep(s);
      },
      ConfigError);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(manifest_path(out)));
}

TEST(Sweep, MissingDirectoryIsConfigError) {
  const SweepSpec s = make_sweep_spec(with({"sweep.variable=n", "sweep.values=0,1"}),
                                      "/nonexistent/dir/out.csv");
  EXPECT_THROW(run_sweep(s), ConfigError);
}

TEST(Sweep, PhaseTableLayout) {
  const SweepSpec s = make_sweep_spec(with({"sweep.variable=n", "sweep.values=0,1,2,10"}), "x.csv");
  const SweepResult r = compute_sweep(s);
  EXPECT_EQ(r.table.header,
            (std::vector<std::string>{"n", "gamma", "visibility", "validity", "p_excite", "status"}));
  ASSERT_EQ(r.table.rows.size(), 4u);
  EXPECT_EQ(r.table.rows[0][0], "0");
  EXPECT_EQ(r.table.rows[0][5], "ok");
  // (λ/Ω)·n·T = 1e-4·10·1e3 = 1
  EXPECT_EQ(r.table.rows[3][5], "validity_invalid");
  EXPECT_EQ(r.truncation_reports.size(), 4u);
}

TEST(Sweep, ResolutionAndTransitionTables) {
  const SweepSpec res = make_sweep_spec(
      with({"sweep.variable=n", "sweep.values=0,1", "sweep.report=resolution", "sweep.m=1,2"}), "x.csv");
  const SweepResult r = compute_sweep(res);
  EXPECT_EQ(r.table.header, (std::vector<std::string>{"n", "m", "delta_gamma", "status"}));
  ASSERT_EQ(r.table.rows.size(), 4u);
  EXPECT_EQ(r.table.rows[1][1], "2");

  const SweepSpec m = make_sweep_spec(
      with({"sweep.variable=m", "sweep.values=1,2,3", "sweep.report=resolution"}), "x.csv");
  EXPECT_EQ(compute_sweep(m).table.rows.size(), 3u);

  const SweepSpec tr = make_sweep_spec(
      with({"sweep.variable=speed", "sweep.values=1e-3,2e-3", "sweep.report=transition"}), "x.csv");
  const SweepResult t = compute_sweep(tr);
  EXPECT_EQ(t.table.header[0], "speed");
  EXPECT_EQ(t.table.rows[0][3], "0");
}

TEST(Sweep, DetuningNeedsResonantGap) {
  EXPECT_NO_THROW(make_sweep_spec(with({"sweep.variable=delta", "sweep.values=0,1e-3"}), "x.csv"));
  EXPECT_THROW(make_sweep_spec(with({"atom.gap=6", "sweep.variable=delta", "sweep.values=0,1e-3"}),
                               "x.csv"),
               ConfigError);
}

TEST(Sweep, DeterministicAcrossThreadsAndRuns) {
  const fs::path a = scratch("det_a.csv");
  const fs::path b = scratch("det_b.csv");
  const auto cfg = with({"sweep.variable=n", "sweep.from=0", "sweep.to=40", "sweep.step=5"});
  run_sweep(make_sweep_spec(cfg, a), 1);
  run_sweep(make_sweep_spec(cfg, b), 4);
  EXPECT_EQ(slurp(a), slurp(b));
  const std::string ma = slurp(manifest_path(a));
  const std::string mb = slurp(manifest_path(b));
  EXPECT_EQ(ma.substr(ma.find("\"config\"")), mb.substr(mb.find("\"config\"")));
  const std::string first = slurp(a);
  run_sweep(make_sweep_spec(cfg, a), 3);
  EXPECT_EQ(slurp(a), first);
  EXPECT_EQ(slurp(manifest_path(a)), ma);
}

TEST(Sweep, ManifestContents) {
  const fs::path out = scratch("manifest.csv");
  run_sweep(make_sweep_spec(with({"sweep.variable=n", "sweep.values=0,1"}), out));
  const auto j = nlohmann::json::parse(slurp(manifest_path(out)));
  EXPECT_EQ(j["toolkit"]["name"], "modeinv");
  EXPECT_EQ(j["command"], "sweep");
  EXPECT_EQ(j["csv"], "manifest.csv");
  EXPECT_EQ(j["config"]["field.mode"], "2");
  EXPECT_TRUE(j["defaults_applied"].is_array());
  EXPECT_EQ(j["details"]["truncation_reports"].size(), 2u);
  EXPECT_FALSE(j.contains("wall_clock_seconds"));
  run_sweep(make_sweep_spec(with({"sweep.variable=n", "sweep.values=0,1"}), out), 1, true);
  EXPECT_TRUE(nlohmann::json::parse(slurp(manifest_path(out))).contains("wall_clock_seconds"));
}

TEST(Sweep, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  Table t{{"a", "b"}, {{"1", "2"}}};
  EXPECT_EQ(to_csv(t), "a,b\n1,2\n");
}
