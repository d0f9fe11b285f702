#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qqcm/config.hpp"
#include "qqcm/csv.hpp"
#include "qqcm/errors.hpp"
#include "qqcm/experiments.hpp"
#include "qqcm/plot.hpp"

using namespace qqcm;
namespace fs = std::filesystem;

namespace {

const std::string kCombined = R"(
  "idle_channel": {"kind": "dephasing", "gamma": 0.05},
  "waiting_channel": {"kind": "dephasing", "gamma": 0.05},
  "interaction_channel": {"kind": "xxz", "g": "pi/12", "g_delta": 0.1, "gamma": 0.05})";

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qqcm_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& json) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << json;
  return p;
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli(const std::string& args) {
  const fs::path log = scratch() / "cli_stdout.txt";
  const std::string cmd = std::string(QQCM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

CsvTable table(const fs::path& p) { return read_csv(p.string()); }

}  // namespace

TEST_CASE("simulate: schema and reproducibility") {
  const auto cfg = write_config("idle.json", R"({"queue": {"kind": "MD1", "r": 0.5},
      "idle_channel": {"kind": "dephasing", "gamma": 0.05, "convention": "closed_form"},
      "interaction_channel": {"kind": "partial_swap", "g": "pi/12"}, "n_ancillas": 10000})");
  const fs::path a = scratch() / "sim_a.csv", b = scratch() / "sim_b.csv";
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + a.string()).code == 0);
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + b.string() + " --threads 4").code == 0);
  CHECK(slurp(a) == slurp(b));
  const auto t = table(a);
  CHECK(t.rows.size() == 10000);
  const int c = t.column("C");
  REQUIRE(c >= 0);
  for (const auto& row : t.rows) {
    REQUIRE(row[c] >= 0.0);
    REQUIRE(row[c] <= 0.5);
  }
  CHECK(slurp(a).find('\r') == std::string::npos);
  const fs::path other = scratch() / "sim_c.csv";
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + other.string() + " --seed 2").code == 0);
  CHECK(slurp(other) != slurp(a));
}

TEST_CASE("simulate: overloaded combined model loses coherence") {
  const auto cfg = write_config("over.json", R"({"queue": {"kind": "MD1", "r": 1.5},)" + kCombined +
                                                 R"(, "n_ancillas": 20000, "fixed_point": {"mode": "mixed_ancilla"}})");
  const fs::path out = scratch() / "over.csv";
  REQUIRE(cli("simulate --config " + cfg.string() + " --out " + out.string()).code == 0);
  const auto t = table(out);
  const int c = t.column("C");
  for (std::size_t k = t.rows.size() * 9 / 10; k < t.rows.size(); ++k) REQUIRE(t.rows[k][c] <= 0.01);
  // The mixed-ancilla fixed point carries no coherence.
  const auto fp = run_fixed_point(load_config(cfg.string()));
  CHECK(fp.coherence <= 1e-12);
}

TEST_CASE("sweep: interior maximum and thread independence") {
  auto c = parse_config(R"({"queue": {"kind": "MD1", "r": 0.5},)" + kCombined + R"(,
      "n_ancillas": 20000, "n_runs": 4, "sweep": {"axis": "r", "values": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]}})");
  const auto rows = run_sweep(c, 1);
  REQUIRE(rows.size() == 9);
  const auto best = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.mean_c < b.mean_c; });
  CHECK(best != rows.begin());
  CHECK(best != rows.end() - 1);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.mean_c));
    CHECK(r.stderr_runs.has_value());
    CHECK(r.stderr_naive == doctest::Approx(std::sqrt(r.var_c / (4 * 16000.0))));
  }
  std::ostringstream one, many;
  write_sweep_csv(one, rows);
  write_sweep_csv(many, run_sweep(c, 3));
  CHECK(one.str() == many.str());
  CHECK(one.str().rfind("param,mean_C,var_C,stderr_naive,stderr_runs\n0.1,", 0) == 0);

  c.n_ancillas = 999;
  CHECK_THROWS_AS(run_sweep(c, 1), ArgumentError);
}

TEST_CASE("sweep CLI is byte-identical across thread counts") {
  const auto cfg = write_config("sw.json", R"({"queue": {"kind": "MM1", "r": 0.6},)" + kCombined + R"(,
      "n_ancillas": 2000, "n_runs": 3, "sweep": {"axis": "g_delta", "values": [0.1, 1, 2]}})");
  const fs::path a = scratch() / "sw_a.csv", b = scratch() / "sw_b.csv";
  REQUIRE(cli("sweep --config " + cfg.string() + " --out " + a.string() + " --threads 1").code == 0);
  REQUIRE(cli("sweep --config " + cfg.string() + " --out " + b.string() + " --threads 4").code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(table(a).rows.size() == 3);
}

TEST_CASE("sweep: M/M/1 saturates at large g Delta") {
  const auto c = parse_config(R"({"queue": {"kind": "MM1", "r": 0.5},)" + kCombined + R"(,
      "n_ancillas": 20000, "n_runs": 4, "sweep": {"axis": "g_delta", "values": [4, 5, 6, 8]}})");
  const auto rows = run_sweep(c, 1);
  double lo = 1, hi = 0, se = 0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.mean_c);
    hi = std::max(hi, r.mean_c);
    se = std::max(se, *r.stderr_runs);
  }
  CHECK(hi - lo <= 3.0 * std::sqrt(2.0) * se);
}

TEST_CASE("lindley command") {
  const auto mm1 = write_config("l_mm1.json", R"({"queue": {"kind": "MM1", "r": 0.5}})");
  const fs::path out = scratch() / "l_mm1.csv";
  const auto res = cli("lindley --config " + mm1.string() + " --out " + out.string());
  REQUIRE(res.code == 0);
  const auto pos = res.out.find("sup_norm=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(res.out.substr(pos + 9)) <= 0.02);
  const auto t = table(out);
  CHECK(t.columns == std::vector<std::string>{"x", "F_numeric", "F_empirical", "abs_diff"});

  const auto report = run_lindley(parse_config(R"({"queue": {"kind": "MD1", "r": 0.5}})"));
  CHECK(std::abs(report.numeric.atom_at_zero() - 0.5) <= 0.01);
  CHECK(std::abs(report.empirical.atom_at_zero() - 0.5) <= 0.01);

  const auto over = write_config("l_over.json", R"({"queue": {"kind": "MD1", "r": 1.2}})");
  const fs::path none = scratch() / "l_over.csv";
  const auto err = cli("lindley --config " + over.string() + " --out " + none.string());
  CHECK(err.code == 1);
  CHECK(err.out.find("no stationary distribution") != std::string::npos);
  CHECK_FALSE(fs::exists(none));

  // Transient mode accepts r > 1.
  auto tc = parse_config(R"({"queue": {"kind": "MD1", "r": 1.2},
      "lindley": {"mode": "transient", "customer": 5, "n_samples": 20000, "x_max": 15}})");
  CHECK(run_lindley(tc).sup_norm <= 0.02);
}

TEST_CASE("fixed-point command") {
  const auto mixed = write_config("fp_mixed.json", R"({"queue": {"kind": "MD1", "r": 0.5},)" + kCombined +
                                                       R"(, "fixed_point": {"mode": "mixed_ancilla"}})");
  auto res = cli("fixed-point --config " + mixed.string());
  REQUIRE(res.code == 0);
  CHECK(res.out.find("C=0\n") != std::string::npos);
  CHECK(res.out.find("rho_00=0.5,0\n") != std::string::npos);

  const auto swap = write_config("fp_swap.json", R"({"queue": {"kind": "MD1", "r": 0.5},
      "interaction_channel": {"kind": "partial_swap", "g": "pi/2"}, "fixed_point": {"mode": "deterministic_limit"}})");
  const fs::path csv = scratch() / "fp.csv";
  res = cli("fixed-point --config " + swap.string() + " --out " + csv.string());
  REQUIRE(res.code == 0);
  const auto pos = res.out.find("C=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(res.out.substr(pos + 2)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fs::exists(csv));

  // Nothing acts on the system: numerical failure, exit code 2.
  const auto flat = write_config("fp_flat.json", R"({"queue": {"kind": "MD1", "r": 0.5},
      "fixed_point": {"mode": "deterministic_limit"}})");
  CHECK(cli("fixed-point --config " + flat.string()).code == 2);
}

TEST_CASE("validation errors exit with 1") {
  const auto bad = write_config("bad.json", R"({"queue": {"kind": "MD1", "r": 0.5}, "sweep": {"axis": "r", "values": []}})");
  CHECK(cli("sweep --config " + bad.string() + " --out x.csv").code == 1);
  CHECK(cli("simulate --config /nonexistent.json --out x.csv").code == 1);
  CHECK(cli("frobnicate").code == 1);
  const auto noout = write_config("noout.json", R"({"queue": {"kind": "MD1", "r": 0.5}, "n_ancillas": 10})");
  CHECK(cli("simulate --config " + noout.string()).code == 1);
}

TEST_CASE("plot") {
  const fs::path sweep_csv = scratch() / "p_sweep.csv";
  std::ofstream(sweep_csv, std::ios::binary) << "param,mean_C,var_C,stderr_naive\n0.1,0.07,1e-4,1e-5\n0.5,0.14,1e-4,1e-5\n0.9,0.12,1e-3,1e-5\n";
  const fs::path svg1 = scratch() / "p1.svg", svg2 = scratch() / "p2.svg";
  REQUIRE(cli("plot " + sweep_csv.string() + " --out " + svg1.string()).code == 0);
  REQUIRE(cli("plot " + sweep_csv.string() + " --kind sweep --out " + svg2.string()).code == 0);
  const std::string s = slurp(svg1);
  CHECK(s.rfind("<?xml version=\"1.0\"", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("E(C)") != std::string::npos);
  CHECK(s == slurp(svg2));

  const fs::path empty_csv = scratch() / "p_empty.csv";
  std::ofstream(empty_csv, std::ios::binary) << "param,mean_C,var_C,stderr_naive\n";
  const fs::path svg3 = scratch() / "p3.svg";
  CHECK(cli("plot " + empty_csv.string() + " --out " + svg3.string()).code == 1);
  CHECK_FALSE(fs::exists(svg3));

  const fs::path junk = scratch() / "p_junk.csv";
  std::ofstream(junk, std::ios::binary) << "a,b\n1,x\n";
  CHECK(cli("plot " + junk.string() + " --out " + svg3.string()).code == 1);

  CsvTable cdf{{"x", "F"}, {{0, 0.5}, {1, 1}}};
  CHECK(detect_plot_kind(cdf) == PlotKind::Cdf);
  CHECK_THROWS_AS(render_svg(cdf, PlotKind::Sweep), ArgumentError);
}
