#include "qqcm/collision.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "qqcm/csv.hpp"
#include "qqcm/errors.hpp"
#include "qqcm/parallel.hpp"

namespace qqcm {

namespace {

std::optional<double> deterministic_value(const DistributionSpec& d) {
  if (const auto* det = std::get_if<Deterministic>(&d.law())) return det->value;
  return std::nullopt;
}

void require_channel_dim(const ChannelSpec& c, int dim, const char* role) {
  const int cd = channel_dimension(c);
  if (cd != 0 && cd != dim) {
    throw ArgumentError(std::string(role) + " channel " + describe(c) + " acts on dimension " +
                        std::to_string(cd) + ", expected " + std::to_string(dim));
  }
}

// Shared by collision_step and deterministic_limit_step so the two agree bit for bit.
DensityMatrix interact(const CompiledModel& model, const Matrix& system, const Matrix& ancilla,
                       double s) {
  const Matrix joint = model.interaction().apply(s, kron(system, ancilla));
  return DensityMatrix::sanitized(partial_trace_ancilla(joint));
}

}  // namespace

void ModelSpec::validate() const {
  require_channel_dim(idle_channel, 2, "idle");
  require_channel_dim(waiting_channel, 2, "waiting");
  require_channel_dim(interaction_channel, 4, "interaction");
  qqcm::validate(idle_channel);
  qqcm::validate(waiting_channel);
  qqcm::validate(interaction_channel);
  if (ancilla_state.dim() != 2 || initial_system_state.dim() != 2) {
    throw ArgumentError("ancilla and initial system states must be qubit states");
  }
}

CompiledModel::CompiledModel(ModelSpec spec)
    : spec_((spec.validate(), std::move(spec))),
      idle_(spec_.idle_channel),
      waiting_(spec_.waiting_channel),
      interaction_(spec_.interaction_channel, deterministic_value(spec_.service)) {}

DensityMatrix collision_step(const DensityMatrix& rho_s, const CompiledModel& model, double w,
                             double i, double s) {
  if (!(w >= 0.0) || !(i >= 0.0) || !(s >= 0.0)) {
    throw ArgumentError("collision_step: times must be >= 0");
  }
  if (rho_s.dim() != 2) throw ArgumentError("collision_step: qubit system state expected");
  const Matrix system = model.idle().apply(i, rho_s.matrix());
  const Matrix ancilla = model.waiting().apply(w, model.spec().ancilla_state.matrix());
  return interact(model, system, ancilla, s);
}

DensityMatrix collision_step(const DensityMatrix& rho_s, const ModelSpec& model, double w,
                             double i, double s) {
  return collision_step(rho_s, CompiledModel(model), w, i, s);
}

DensityMatrix deterministic_limit_step(const DensityMatrix& rho_s, const CompiledModel& model,
                                       double tau) {
  if (!(tau >= 0.0)) throw ArgumentError("deterministic_limit_step: tau must be >= 0");
  return interact(model, rho_s.matrix(), model.spec().ancilla_state.matrix(), tau);
}

TrajectoryRecord run_trajectory(const CompiledModel& model, const QueueTrace& trace) {
  TrajectoryRecord rec;
  const std::size_t n = trace.size();
  rec.departure.reserve(n);
  rec.states.reserve(n);
  rec.coherence.reserve(n);
  DensityMatrix rho = model.spec().initial_system_state;
  for (std::size_t k = 0; k < n; ++k) {
    rho = collision_step(rho, model, trace.waiting[k], trace.idle[k], trace.service[k]);
    rec.departure.push_back(trace.departure[k]);
    rec.coherence.push_back(coherence(rho));
    rec.states.push_back(rho);
  }
  return rec;
}

TrajectoryRecord run_trajectory(const ModelSpec& model, const QueueTrace& trace) {
  return run_trajectory(CompiledModel(model), trace);
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  CsvWriter csv(os);
  csv.header({"n", "t_depart", "C", "rho_re_00", "rho_re_01", "rho_im_01", "rho_re_11"});
  for (std::size_t k = 0; k < record.size(); ++k) {
    const auto& rho = record.states[k];
    csv.row(k + 1, record.departure[k], record.coherence[k], rho(0, 0).real(), rho(0, 1).real(),
            rho(0, 1).imag(), rho(1, 1).real());
  }
}

std::size_t burn_in_start(std::size_t n, double burn_in_fraction) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw ArgumentError("burn_in_fraction must lie in [0, 1)");
  }
  return static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(n)));
}

LongRunStats long_run_stats(std::span<const double> values, double burn_in_fraction) {
  const std::size_t start = burn_in_start(values.size(), burn_in_fraction);
  if (start >= values.size()) {
    throw ArgumentError("long_run_stats: empty window after burn-in");
  }
  const auto window = values.subspan(start);
  LongRunStats st;
  st.samples = window.size();
  const double n = static_cast<double>(st.samples);
  st.mean = std::accumulate(window.begin(), window.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : window) ss += (v - st.mean) * (v - st.mean);
  st.variance = ss / n;
  st.stderr_naive = std::sqrt(st.variance / n);
  return st;
}

LongRunStats long_run_stats(const TrajectoryRecord& record, double burn_in_fraction) {
  return long_run_stats(std::span<const double>(record.coherence), burn_in_fraction);
}

double batch_means_stderr(std::span<const double> values, std::size_t n_batches) {
  if (n_batches < 2 || values.size() < n_batches) {
    throw ArgumentError("batch_means_stderr: need at least 2 batches and one value per batch");
  }
  const std::size_t len = values.size() / n_batches;
  std::vector<double> means(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    const auto batch = values.subspan(b * len, len);
    means[b] = std::accumulate(batch.begin(), batch.end(), 0.0) / static_cast<double>(len);
  }
  const double shift = means.front();
  double d = 0.0;
  for (double m : means) d += m - shift;
  d /= static_cast<double>(n_batches);
  double ss = 0.0;
  for (double m : means) ss += (m - shift - d) * (m - shift - d);
  return std::sqrt(ss / static_cast<double>(n_batches - 1) / static_cast<double>(n_batches));
}

std::string to_string(FixedPointMode m) {
  switch (m) {
    case FixedPointMode::DeterministicLimit:
      return "deterministic_limit";
    case FixedPointMode::StochasticLimit:
      return "stochastic_limit";
    case FixedPointMode::MixedAncilla:
      return "mixed_ancilla";
  }
  return "?";
}

FixedPointMode fixed_point_mode_from_string(const std::string& s) {
  if (s == "deterministic_limit") return FixedPointMode::DeterministicLimit;
  if (s == "stochastic_limit") return FixedPointMode::StochasticLimit;
  if (s == "mixed_ancilla") return FixedPointMode::MixedAncilla;
  throw ArgumentError("unknown fixed-point mode '" + s + "'");
}

Matrix averaged_propagator(const CompiledChannel& channel, int dim, const DistributionSpec& law,
                           int nodes) {
  if (channel.is_identity()) {
    return Matrix::Identity(dim * dim, dim * dim);
  }
  if (const auto t = deterministic_value(law)) {
    return channel.propagator(*t);
  }
  const auto* expo = std::get_if<Exponential>(&law.law());
  if (!expo) {
    throw UnsupportedDistributionPair("channel averaging needs a deterministic or exponential law, got " +
                                      law.describe());
  }
  const double upper = quantile(law, 1.0 - 1e-8);
  const auto rule = gauss_legendre(nodes);
  Matrix acc = Matrix::Zero(dim * dim, dim * dim);
  double mass = 0.0;
  for (int q = 0; q < nodes; ++q) {
    const double t = 0.5 * upper * (rule.nodes[q] + 1.0);
    const double w = 0.5 * upper * rule.weights[q] * expo->rate * std::exp(-expo->rate * t);
    acc += w * channel.propagator(t);
    mass += w;
  }
  return acc / mass;
}

Matrix averaged_map(const ModelSpec& model, FixedPointMode mode, int nodes) {
  const CompiledModel compiled(model);
  const Matrix interaction = averaged_propagator(compiled.interaction(), 4, model.service, nodes);
  Matrix idle = Matrix::Identity(4, 4);
  if (mode == FixedPointMode::StochasticLimit) {
    idle = averaged_propagator(compiled.idle(), 2, model.arrival, nodes);
  }
  const Matrix ancilla = mode == FixedPointMode::MixedAncilla
                             ? DensityMatrix::maximally_mixed(2).matrix()
                             : model.ancilla_state.matrix();
  Matrix m(4, 4);
  for (int k = 0; k < 4; ++k) {
    Matrix basis = Matrix::Zero(2, 2);
    basis(k % 2, k / 2) = 1.0;
    const Matrix system = unvec(idle * vec(basis));
    const Matrix joint = unvec(interaction * vec(kron(system, ancilla)));
    m.col(k) = vec(partial_trace_ancilla(joint));
  }
  return m;
}

DensityMatrix averaged_map_fixed_point(const ModelSpec& model, FixedPointMode mode, int nodes) {
  const Matrix m = averaged_map(model, mode, nodes);
  const Matrix a = m - Matrix::Identity(4, 4);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();  // descending
  constexpr double kNullTol = 1e-9;
  std::size_t null_dim = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= kNullTol) ++null_dim;
  }
  if (null_dim > 1) {
    throw AmbiguousFixedPoint(null_dim);
  }
  if (null_dim == 0) {
    throw NumericalError("averaged map has no eigenvalue 1 (smallest singular value of M - I is " +
                         std::to_string(sv(sv.size() - 1)) + ")");
  }
  const Vector v = svd.matrixV().col(3);
  Matrix rho = unvec(v);
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12) {
    throw NumericalError("fixed point has vanishing trace");
  }
  rho /= tr;
  auto state = DensityMatrix::sanitized(rho);
  const double residual = (unvec(m * vec(state.matrix())) - state.matrix()).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw NumericalError("fixed point residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return state;
}

EnsembleStats ensemble_average(const ModelSpec& model, std::size_t n_ancillas, std::size_t n_runs,
                               std::uint64_t base_seed, unsigned threads) {
  if (n_runs < 2) throw ArgumentError("ensemble_average: n_runs must be >= 2");
  const CompiledModel compiled(model);
  std::vector<std::vector<double>> runs(n_runs);
  parallel_for(n_runs, threads, [&](std::size_t r) {
    RngStream stream(base_seed, r);
    const auto trace = simulate_queue(model.arrival, model.service, n_ancillas, stream);
    runs[r] = run_trajectory(compiled, trace).coherence;
  });
  EnsembleStats out;
  out.mean.assign(n_ancillas, 0.0);
  out.variance.assign(n_ancillas, 0.0);
  const double nr = static_cast<double>(n_runs);
  for (std::size_t k = 0; k < n_ancillas; ++k) {
    // Shifted by the first run so identical runs give exactly zero variance.
    const double shift = runs.front()[k];
    double s = 0.0;
    for (const auto& run : runs) s += run[k] - shift;
    const double d = s / nr;
    double ss = 0.0;
    for (const auto& run : runs) ss += (run[k] - shift - d) * (run[k] - shift - d);
    out.mean[k] = shift + d;
    out.variance[k] = ss / (nr - 1.0);
  }
  return out;
}

QueueLaws md1(double r, double mu) {
  if (!(r > 0.0) || !(mu > 0.0)) throw ArgumentError("md1: r and mu must be > 0");
  return {DistributionSpec::exponential(r * mu), DistributionSpec::deterministic(1.0 / mu)};
}

QueueLaws mm1(double r, double mu) {
  if (!(r > 0.0) || !(mu > 0.0)) throw ArgumentError("mm1: r and mu must be > 0");
  return {DistributionSpec::exponential(r * mu), DistributionSpec::exponential(mu)};
}

ModelSpec xxz_model(const QueueLaws& queue, double g, double delta, double gamma,
                    DephasingConvention convention) {
  return ModelSpec{queue.arrival,
                   queue.service,
                   Dephasing{gamma, convention},
                   Dephasing{gamma, convention},
                   XxzDephasing{g, delta, gamma},
                   DensityMatrix::ket_plus(),
                   DensityMatrix::ket0()};
}

ModelSpec partial_swap_model(const QueueLaws& queue, double g, ChannelSpec idle,
                             ChannelSpec waiting) {
  return ModelSpec{queue.arrival,
                   queue.service,
                   std::move(idle),
                   std::move(waiting),
                   PartialSwapUnitary{g},
                   DensityMatrix::ket_plus(),
                   DensityMatrix::ket0()};
}

}  // namespace qqcm
