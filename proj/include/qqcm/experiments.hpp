#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qqcm/collision.hpp"
#include "qqcm/config.hpp"
#include "qqcm/lindley.hpp"

namespace qqcm {

/// Per-invocation settings that are not part of the experiment itself.
struct RunOptions {
  std::optional<std::string> out;  // overrides config.output
  unsigned threads = 1;
};

/// One simulated run: stream (config.seed, stream_index).
struct SimulatedRun {
  QueueTrace trace;
  TrajectoryRecord record;
};
SimulatedRun simulate_run(const CompiledModel& model, std::size_t n_ancillas, std::uint64_t seed,
                          std::uint64_t stream_index);

struct SweepRow {
  double param = 0.0;
  double mean_c = 0.0;
  double var_c = 0.0;         // within-run variance of C, averaged over runs
  double stderr_naive = 0.0;  // sqrt(var_c / total kept samples), ignores autocorrelation
  std::optional<double> stderr_runs;  // spread of run means / sqrt(n_runs), for n_runs >= 2
};

/// Point p, run k uses stream p * n_runs + k. Rows come back in sweep order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, unsigned threads = 1);

/// Header param,mean_C,var_C,stderr_naive and, when present, stderr_runs.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct LindleyReport {
  CdfGrid numeric;
  CdfGrid empirical;
  double sup_norm = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;

  /// One-line summary printed by the lindley command.
  std::string summary() const;
};

/// Numerical CDF (waiting or idle, stationary or at a given customer) next to its
/// Monte Carlo estimate. Throws NoStationaryDistribution in fixed-point mode for r >= 1.
LindleyReport run_lindley(const ExperimentConfig& config);

struct FixedPointReport {
  FixedPointMode mode;
  DensityMatrix state;
  double coherence = 0.0;

  std::string summary() const;
};
FixedPointReport run_fixed_point(const ExperimentConfig& config);

// Command entry points. Each writes its artifact to options.out or config.output;
// `log` receives the human-readable summary lines.
void cmd_simulate(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
void cmd_sweep(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
void cmd_lindley(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
/// Output file is optional here; without one only the summary is printed.
void cmd_fixed_point(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

/// Writes content to path, replacing the file. Throws ArgumentError on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qqcm
