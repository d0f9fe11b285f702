#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qqcm/distributions.hpp"
#include "qqcm/quantum.hpp"
#include "qqcm/queue.hpp"

namespace qqcm {

/// Full definition of a queued collision model.
struct ModelSpec {
  DistributionSpec arrival;
  DistributionSpec service;
  ChannelSpec idle_channel;         // on the system, for the idle time I_n
  ChannelSpec waiting_channel;      // on the ancilla, for the queueing time Wq_n
  ChannelSpec interaction_channel;  // on system + ancilla, for the service time S_n
  DensityMatrix ancilla_state;
  DensityMatrix initial_system_state;

  /// Throws ArgumentError on dimension mismatches or invalid channel parameters.
  void validate() const;
};

/// ModelSpec with its channels prepared once for repeated collisions.
/// For a deterministic service law the interaction propagator is precomputed.
class CompiledModel {
 public:
  explicit CompiledModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const CompiledChannel& idle() const { return idle_; }
  const CompiledChannel& waiting() const { return waiting_; }
  const CompiledChannel& interaction() const { return interaction_; }

 private:
  ModelSpec spec_;
  CompiledChannel idle_;
  CompiledChannel waiting_;
  CompiledChannel interaction_;
};

/// rho_S^n = Tr_A{ E_SA(s)[ E_S(i)[rho_S] kron E_A(w)[rho_A] ] }.
DensityMatrix collision_step(const DensityMatrix& rho_s, const CompiledModel& model, double w,
                             double i, double s);
DensityMatrix collision_step(const DensityMatrix& rho_s, const ModelSpec& model, double w,
                             double i, double s);

/// Deterministic collision model: Tr_A{ E_SA(tau)[rho_S kron rho_A] }.
DensityMatrix deterministic_limit_step(const DensityMatrix& rho_s, const CompiledModel& model,
                                       double tau);

struct TrajectoryRecord {
  std::vector<double> departure;
  std::vector<DensityMatrix> states;
  std::vector<double> coherence;

  std::size_t size() const { return coherence.size(); }
};

TrajectoryRecord run_trajectory(const CompiledModel& model, const QueueTrace& trace);
TrajectoryRecord run_trajectory(const ModelSpec& model, const QueueTrace& trace);

/// CSV with header n,t_depart,C,rho_re_00,rho_re_01,rho_im_01,rho_re_11.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

struct LongRunStats {
  double mean = 0.0;
  double variance = 0.0;      // E(C^2) - E(C)^2 over the window
  std::size_t samples = 0;
  double stderr_naive = 0.0;  // sqrt(variance / samples), ignores autocorrelation
};

/// Index of the first sample kept after discarding burn_in_fraction of n samples.
std::size_t burn_in_start(std::size_t n, double burn_in_fraction);

/// Mean and variance of C[n] for n > burn_in_fraction * N within one run.
LongRunStats long_run_stats(const TrajectoryRecord& record, double burn_in_fraction);
LongRunStats long_run_stats(std::span<const double> values, double burn_in_fraction);

/// Standard error of the mean of a correlated series by non-overlapping batch means.
double batch_means_stderr(std::span<const double> values, std::size_t n_batches);

enum class FixedPointMode { DeterministicLimit, StochasticLimit, MixedAncilla };

std::string to_string(FixedPointMode m);
FixedPointMode fixed_point_mode_from_string(const std::string& s);

/// Channel averaged over a time law, sum_q w_q E(t_q). Exponential laws use
/// Gauss-Legendre on [0, Q(1 - 1e-8)] with the weights renormalized to unit mass.
Matrix averaged_propagator(const CompiledChannel& channel, int dim, const DistributionSpec& law,
                           int nodes = 200);

/// 4 x 4 matrix of the averaged one-collision map on column-stacked qubit states.
Matrix averaged_map(const ModelSpec& model, FixedPointMode mode, int nodes = 200);

/// Unit-trace fixed point of averaged_map, from the null space of (M - I).
/// Throws AmbiguousFixedPoint if that null space has dimension > 1.
DensityMatrix averaged_map_fixed_point(const ModelSpec& model, FixedPointMode mode,
                                       int nodes = 200);

struct EnsembleStats {
  std::vector<double> mean;      // per collision index, across runs
  std::vector<double> variance;  // unbiased, across runs
};

/// Runs n_runs independent queues (stream index = run index) and aggregates C[n].
EnsembleStats ensemble_average(const ModelSpec& model, std::size_t n_ancillas, std::size_t n_runs,
                               std::uint64_t base_seed, unsigned threads = 1);

// Model presets.
struct QueueLaws {
  DistributionSpec arrival;
  DistributionSpec service;
};
/// Exponential arrivals at rate r * mu, deterministic service 1 / mu.
QueueLaws md1(double r, double mu = 1.0);
/// Exponential arrivals at rate r * mu, exponential service at rate mu.
QueueLaws mm1(double r, double mu = 1.0);

/// Dephasing while idle and while waiting, XXZ + dephasing during service,
/// ancillas in |+>, system starting in |0>.
ModelSpec xxz_model(const QueueLaws& queue, double g, double delta, double gamma,
                    DephasingConvention convention = DephasingConvention::Generator);

/// Partial SWAP interaction with the given idle and waiting channels.
ModelSpec partial_swap_model(const QueueLaws& queue, double g, ChannelSpec idle,
                             ChannelSpec waiting);

}  // namespace qqcm
