#include "qqcm/experiments.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qqcm/csv.hpp"
#include "qqcm/errors.hpp"
#include "qqcm/parallel.hpp"

namespace qqcm {

namespace {

std::string output_path(const ExperimentConfig& config, const RunOptions& options) {
  if (options.out && !options.out->empty()) return *options.out;
  if (!config.output.empty()) return config.output;
  throw ArgumentError("no output path: pass --out or set 'output' in the config");
}

constexpr std::size_t kMinStatisticsAncillas = 1000;

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw ArgumentError("failed writing '" + path + "'");
}

SimulatedRun simulate_run(const CompiledModel& model, std::size_t n_ancillas, std::uint64_t seed,
                          std::uint64_t stream_index) {
  RngStream stream(seed, stream_index);
  SimulatedRun run;
  run.trace = simulate_queue(model.spec().arrival, model.spec().service, n_ancillas, stream);
  run.record = run_trajectory(model, run.trace);
  return run;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, unsigned threads) {
  if (!config.sweep) throw ArgumentError("sweep command needs a 'sweep' section");
  if (config.n_ancillas < kMinStatisticsAncillas) {
    throw ArgumentError("n_ancillas must be >= 1000 for a sweep");
  }
  const auto& values = config.sweep->values;
  std::vector<CompiledModel> models;
  models.reserve(values.size());
  for (double v : values) models.emplace_back(config.model_at(config.sweep->axis, v));

  const std::size_t runs = config.n_runs;
  std::vector<LongRunStats> stats(values.size() * runs);
  parallel_for(stats.size(), threads, [&](std::size_t task) {
    const std::size_t point = task / runs;
    const SimulatedRun run = simulate_run(models[point], config.n_ancillas, config.seed, task);
    stats[task] = long_run_stats(run.record, config.burn_in_fraction);
  });

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) {
    SweepRow row;
    row.param = values[p];
    std::size_t samples = 0;
    for (std::size_t k = 0; k < runs; ++k) {
      const auto& s = stats[p * runs + k];
      row.mean_c += s.mean;
      row.var_c += s.variance;
      samples += s.samples;
    }
    row.mean_c /= static_cast<double>(runs);
    row.var_c /= static_cast<double>(runs);
    row.stderr_naive = std::sqrt(row.var_c / static_cast<double>(samples));
    if (runs >= 2) {
      double ss = 0.0;
      for (std::size_t k = 0; k < runs; ++k) {
        const double d = stats[p * runs + k].mean - row.mean_c;
        ss += d * d;
      }
      row.stderr_runs = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const bool with_runs = !rows.empty() && rows.front().stderr_runs.has_value();
  CsvWriter csv(os);
  if (with_runs) {
    csv.header({"param", "mean_C", "var_C", "stderr_naive", "stderr_runs"});
  } else {
    csv.header({"param", "mean_C", "var_C", "stderr_naive"});
  }
  for (const auto& r : rows) {
    if (with_runs) {
      csv.row(r.param, r.mean_c, r.var_c, r.stderr_naive, *r.stderr_runs);
    } else {
      csv.row(r.param, r.mean_c, r.var_c, r.stderr_naive);
    }
  }
}

std::string LindleyReport::summary() const {
  return "sup_norm=" + format_number(sup_norm) + " F0_numeric=" +
         format_number(numeric.atom_at_zero()) + " F0_empirical=" +
         format_number(empirical.atom_at_zero()) + " iterations=" + std::to_string(iterations) +
         " residual=" + format_number(residual);
}

LindleyReport run_lindley(const ExperimentConfig& config) {
  const LindleyConfig& lc = config.lindley;
  const QueueLaws q = config.queue.laws();
  require_difference_pair(q.service, q.arrival);
  GridSpec grid = default_grid(q.arrival, q.service, lc.grid_points);
  if (lc.x_max) grid.x_max = *lc.x_max;
  const bool idle = lc.quantity == LindleyQuantity::Idle;

  LindleyReport report;
  std::vector<double> samples;
  samples.reserve(lc.n_samples);
  if (lc.mode == LindleyMode::FixedPoint) {
    const LindleySolution sol =
        lindley_fixed_point(q.arrival, q.service, grid, lc.tol, lc.max_iterations);
    report.iterations = sol.iterations;
    report.residual = sol.residual;
    report.numeric = idle ? idle_cdf(sol.cdf, q.arrival, q.service) : sol.cdf;

    RngStream stream(config.seed, 0);
    const std::size_t n = lc.burn_in_customers + lc.n_samples * lc.stride;
    const QueueTrace trace = simulate_queue(q.arrival, q.service, n, stream);
    for (std::size_t j = 0; j < lc.n_samples; ++j) {
      const std::size_t k = lc.burn_in_customers + j * lc.stride;
      samples.push_back(idle ? trace.idle[k] : trace.waiting[k]);
    }
  } else {
    // Customer 1 never waits; customer k's waiting law is k - 1 iterations
    // away, and its idle time depends on customer k - 1.
    CdfGrid f = unit_cdf(grid);
    CdfGrid previous = f;
    for (std::size_t k = 1; k < lc.customer; ++k) {
      previous = f;
      f = lindley_iterate(f, q.arrival, q.service);
    }
    report.iterations = lc.customer - 1;
    if (!idle) {
      report.numeric = f;
    } else if (lc.customer == 1) {
      report.numeric = unit_cdf(grid);
    } else {
      report.numeric = idle_cdf(previous, q.arrival, q.service);
    }
    for (std::size_t j = 0; j < lc.n_samples; ++j) {
      RngStream stream(config.seed, j);
      const QueueTrace trace = simulate_queue(q.arrival, q.service, lc.customer, stream);
      samples.push_back(idle ? trace.idle.back() : trace.waiting.back());
    }
  }
  report.empirical = empirical_cdf(samples, report.numeric.x);
  report.sup_norm = sup_distance(report.numeric, report.empirical);
  return report;
}

std::string FixedPointReport::summary() const {
  std::ostringstream s;
  s << "mode=" << to_string(mode) << '\n';
  for (int r = 0; r < state.dim(); ++r) {
    for (int c = 0; c < state.dim(); ++c) {
      s << "rho_" << r << c << '=' << format_number(state(r, c).real()) << ','
        << format_number(state(r, c).imag()) << '\n';
    }
  }
  s << "C=" << format_number(coherence) << '\n';
  return s.str();
}

FixedPointReport run_fixed_point(const ExperimentConfig& config) {
  const DensityMatrix rho =
      averaged_map_fixed_point(config.model(), config.fixed_point_mode, config.quadrature_nodes);
  return FixedPointReport{config.fixed_point_mode, rho, coherence(rho)};
}

void cmd_simulate(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  const std::string path = output_path(config, options);
  const CompiledModel model(config.model());
  const SimulatedRun run = simulate_run(model, config.n_ancillas, config.seed, 0);
  std::ostringstream csv;
  write_trajectory_csv(csv, run.record);
  write_text_file(path, csv.str());
  if (config.queue_trace_output) {
    std::ostringstream q;
    write_queue_csv(q, run.trace);
    write_text_file(*config.queue_trace_output, q.str());
  }
  log << "wrote " << run.record.size() << " collisions to " << path << '\n';
}

void cmd_sweep(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  const std::string path = output_path(config, options);
  const auto rows = run_sweep(config, options.threads);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_text_file(path, csv.str());
  log << "wrote " << rows.size() << " sweep points to " << path << '\n';
}

void cmd_lindley(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  const std::string path = output_path(config, options);
  const LindleyReport report = run_lindley(config);
  std::ostringstream csv;
  write_cdf_comparison_csv(csv, report.numeric, report.empirical);
  write_text_file(path, csv.str());
  log << report.summary() << '\n';
}

void cmd_fixed_point(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  const FixedPointReport report = run_fixed_point(config);
  std::string path;
  if (options.out && !options.out->empty()) {
    path = *options.out;
  } else {
    path = config.output;
  }
  if (!path.empty()) {
    std::ostringstream csv;
    write_density_csv(csv, report.state);
    write_text_file(path, csv.str());
  }
  log << report.summary();
}

}  // namespace qqcm
