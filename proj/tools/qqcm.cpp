// Command-line front end: simulate | sweep | lindley | fixed-point | plot.
// Exit codes: 0 success, 1 invalid input or I/O, 2 numerical failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qqcm/config.hpp"
#include "qqcm/errors.hpp"
#include "qqcm/experiments.hpp"
#include "qqcm/plot.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "base seed, overrides the config");
  sub->add_option("--out", c.out, "output path, overrides the config 'output'");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"queued quantum collision models"};
  app.require_subcommand(1);

  Common common;
  auto* simulate = app.add_subcommand("simulate", "one trajectory, written as CSV");
  auto* sweep = app.add_subcommand("sweep", "long-run coherence statistics over a parameter grid");
  auto* lindley = app.add_subcommand("lindley", "numerical waiting or idle CDF against Monte Carlo");
  auto* fixed = app.add_subcommand("fixed-point", "fixed point of an averaged collision map");
  for (auto* sub : {simulate, sweep, lindley, fixed}) add_common(sub, common);

  auto* plot = app.add_subcommand("plot", "render a CSV from the other commands as SVG");
  std::string csv_path;
  std::string kind = "auto";
  std::string svg_path;
  plot->add_option("csv", csv_path, "input CSV")->required();
  plot->add_option("--kind", kind, "auto|sweep|trajectory|lindley|cdf|queue");
  plot->add_option("--out", svg_path, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (plot->parsed()) {
      qqcm::cmd_plot(csv_path, qqcm::plot_kind_from_string(kind), svg_path);
      return 0;
    }
    qqcm::ExperimentConfig config = qqcm::load_config(common.config);
    if (common.seed) config.seed = *common.seed;
    qqcm::RunOptions options;
    if (!common.out.empty()) options.out = common.out;
    options.threads = common.threads;

    if (simulate->parsed()) qqcm::cmd_simulate(config, options, std::cout);
    if (sweep->parsed()) qqcm::cmd_sweep(config, options, std::cout);
    if (lindley->parsed()) qqcm::cmd_lindley(config, options, std::cout);
    if (fixed->parsed()) qqcm::cmd_fixed_point(config, options, std::cout);
    return 0;
  } catch (const qqcm::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qqcm::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
