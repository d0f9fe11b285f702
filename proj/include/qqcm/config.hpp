#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qqcm/collision.hpp"

namespace qqcm {

enum class QueueKind { MD1, MM1, Explicit };

/// Queue laws, either a named family parameterized by (mu, r) or explicit laws.
struct QueueConfig {
  QueueKind kind = QueueKind::MD1;
  double mu = 1.0;
  double r = 0.5;
  std::optional<DistributionSpec> arrival;  // Explicit only
  std::optional<DistributionSpec> service;  // Explicit only

  /// Laws at utilization r (ignored for Explicit).
  QueueLaws laws(double r_value) const;
  QueueLaws laws() const { return laws(r); }
};

enum class SweepAxis { R, GDelta };

/// gDelta sweeps keep g of the XXZ interaction fixed and set delta = value / g.
struct SweepConfig {
  SweepAxis axis = SweepAxis::R;
  std::vector<double> values;
};

enum class LindleyMode { FixedPoint, Transient };
enum class LindleyQuantity { Waiting, Idle };

struct LindleyConfig {
  LindleyMode mode = LindleyMode::FixedPoint;
  LindleyQuantity quantity = LindleyQuantity::Waiting;
  std::size_t grid_points = 2000;
  std::optional<double> x_max;
  double tol = 1e-8;
  std::size_t max_iterations = 10000;
  // Empirical reference: one long queue, keeping every `stride`-th customer
  // after `burn_in_customers` (fixed-point mode), or n_samples independent
  // queues stopped at `customer` (transient mode).
  std::size_t n_samples = 100000;
  std::size_t stride = 100;
  std::size_t burn_in_customers = 10000;
  std::size_t customer = 10;  // 1-based index of the customer in transient mode
};

struct ExperimentConfig {
  QueueConfig queue;
  ChannelSpec idle_channel = IdentityChannel{};
  ChannelSpec waiting_channel = IdentityChannel{};
  ChannelSpec interaction_channel = IdentityChannel{};
  DensityMatrix ancilla_state = DensityMatrix::ket_plus();
  DensityMatrix initial_system_state = DensityMatrix::ket0();

  std::size_t n_ancillas = 100000;
  double burn_in_fraction = 0.2;
  std::uint64_t seed = 1;
  std::size_t n_runs = 1;

  std::optional<SweepConfig> sweep;
  FixedPointMode fixed_point_mode = FixedPointMode::StochasticLimit;
  int quadrature_nodes = 200;
  LindleyConfig lindley;

  std::string output;
  std::optional<std::string> queue_trace_output;

  /// Model at the configured queue parameters.
  ModelSpec model() const;
  /// Model at one sweep point.
  ModelSpec model_at(SweepAxis axis, double value) const;

  /// Checks everything except command-specific requirements.
  void validate() const;
};

/// Parses a JSON document; throws ArgumentError on malformed or invalid input.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

std::string to_string(SweepAxis a);

}  // namespace qqcm
