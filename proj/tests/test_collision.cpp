#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qqcm/collision.hpp"
#include "qqcm/errors.hpp"

using namespace qqcm;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double g12 = pi / 12;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

ModelSpec combined(double r, DistributionSpec service) {
  auto m = xxz_model(md1(r), g12, 0.1 / g12, 0.05);
  m.service = std::move(service);
  return m;
}

QueueTrace draw(const ModelSpec& m, std::size_t n, std::uint64_t seed, std::uint64_t idx = 0) {
  RngStream s(seed, idx);
  return simulate_queue(m.arrival, m.service, n, s);
}

// Reference reduced map written out from the definition, without CompiledModel.
Matrix reference_step(const Matrix& rho_s, const ModelSpec& m, double w, double i, double s) {
  const Matrix sys = apply_channel(m.idle_channel, i, rho_s);
  const Matrix anc = apply_channel(m.waiting_channel, w, m.ancilla_state.matrix());
  return partial_trace_ancilla(apply_channel(m.interaction_channel, s, kron(sys, anc)));
}

}  // namespace

TEST_CASE("model validation") {
  auto m = xxz_model(md1(0.5), g12, 1.0, 0.05);
  CHECK_NOTHROW(m.validate());
  m.interaction_channel = Dephasing{0.1};
  CHECK_THROWS_AS(m.validate(), ArgumentError);
  m = xxz_model(md1(0.5), g12, 1.0, 0.05);
  m.idle_channel = PartialSwapUnitary{1.0};
  CHECK_THROWS_AS(m.validate(), ArgumentError);
}

TEST_CASE("collision_step against the written-out map") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  const auto m = combined(0.5, DistributionSpec::exponential(1.0));
  const CompiledModel cm(m);
  DensityMatrix rho = DensityMatrix::ket0();
  for (int k = 0; k < 50; ++k) {
    const double w = k % 2 ? u(rng) : 0.0, i = k % 2 ? 0.0 : u(rng), s = u(rng);
    const Matrix want = reference_step(rho.matrix(), m, w, i, s);
    const auto got = collision_step(rho, cm, w, i, s);
    CHECK(max_abs(got.matrix() - want) <= 1e-12);
    CHECK(max_abs(collision_step(rho, m, w, i, s).matrix() - got.matrix()) == 0.0);
    rho = got;
  }
}

TEST_CASE("identity idle and waiting reduce to the deterministic map") {
  auto m = combined(0.7, DistributionSpec::deterministic(1.3));
  m.idle_channel = IdentityChannel{};
  m.waiting_channel = IdentityChannel{};
  const CompiledModel cm(m);
  const auto rho = DensityMatrix::ket1();
  const auto a = collision_step(rho, cm, 2.0, 0.0, 1.3);
  const auto b = deterministic_limit_step(rho, cm, 1.3);
  CHECK(a.matrix() == b.matrix());
}

TEST_CASE("maximally mixed states are stationary") {
  auto m = combined(0.5, DistributionSpec::exponential(1.0));
  m.ancilla_state = DensityMatrix::maximally_mixed(2);
  const CompiledModel cm(m);
  const auto half = DensityMatrix::maximally_mixed(2);
  for (auto [w, i, s] : {std::tuple{0.0, 3.0, 0.2}, {1.5, 0.0, 4.0}, {0.0, 0.0, 17.0}}) {
    CHECK(max_abs(collision_step(half, cm, w, i, s).matrix() - half.matrix()) <= 1e-12);
  }
}

TEST_CASE("full SWAP transfers the ancilla") {
  const auto q = md1(0.5, 1.0);
  auto m = partial_swap_model(q, pi / 2, IdentityChannel{}, IdentityChannel{});
  const auto out = collision_step(DensityMatrix::ket0(), m, 0.0, 0.0, 1.0);
  CHECK(max_abs(out.matrix() - DensityMatrix::ket_plus().matrix()) <= 1e-15);

  const auto rec = run_trajectory(m, trace_from_times({1.0}, {1.0}));
  REQUIRE(rec.size() == 1);
  CHECK(rec.coherence[0] == doctest::Approx(0.5));
}

TEST_CASE("trajectory invariants") {
  const auto m = combined(0.9, DistributionSpec::exponential(1.0));
  const auto trace = draw(m, 3000, 4);
  const auto rec = run_trajectory(m, trace);
  REQUIRE(rec.size() == trace.size());
  for (std::size_t k = 0; k < rec.size(); ++k) {
    REQUIRE(inspect_state(rec.states[k].matrix()).ok());
    REQUIRE(rec.coherence[k] >= 0.0);
    REQUIRE(rec.coherence[k] <= 0.5);
    REQUIRE(rec.departure[k] == trace.departure[k]);
  }
}

TEST_CASE("Markovian embedding") {
  const auto m = combined(0.9, DistributionSpec::exponential(1.0));
  const auto trace = draw(m, 400, 5);
  const auto rec = run_trajectory(m, trace);
  // Each state follows from the previous one and (Wq, I, S) alone.
  const CompiledModel cm(m);
  for (std::size_t n = 1; n < trace.size(); n += 37) {
    const auto next = collision_step(rec.states[n - 1], cm, trace.waiting[n], trace.idle[n], trace.service[n]);
    CHECK(next.matrix() == rec.states[n].matrix());
  }
  // Scrambling the timing fields that do not enter the map changes nothing.
  QueueTrace scrambled = trace;
  std::mt19937_64 rng(2);
  std::shuffle(scrambled.interarrival.begin(), scrambled.interarrival.end(), rng);
  std::shuffle(scrambled.arrival.begin(), scrambled.arrival.end(), rng);
  const auto rec2 = run_trajectory(m, scrambled);
  for (std::size_t k = 0; k < rec.size(); ++k) REQUIRE(rec2.states[k].matrix() == rec.states[k].matrix());
  // Swapping the (Wq, I, S) triples of two earlier collisions alters only the states between them.
  QueueTrace swapped = trace;
  std::swap(swapped.waiting[10], swapped.waiting[20]);
  std::swap(swapped.idle[10], swapped.idle[20]);
  std::swap(swapped.service[10], swapped.service[20]);
  const auto rec3 = run_trajectory(m, swapped);
  for (std::size_t k = 0; k < 10; ++k) REQUIRE(rec3.states[k].matrix() == rec.states[k].matrix());
}

TEST_CASE("long_run_stats") {
  std::vector<double> c(1000, 0.3);
  auto a = long_run_stats(c, 0.2);
  CHECK(a.mean == doctest::Approx(0.3));
  CHECK(a.variance == doctest::Approx(0.0));
  CHECK(a.samples == 800);
  std::vector<double> alt;
  for (int k = 0; k < 1000; ++k) alt.push_back(k % 2 ? 0.5 : 0.0);
  auto b = long_run_stats(alt, 0.0);
  CHECK(b.mean == doctest::Approx(0.25));
  CHECK(b.variance == doctest::Approx(0.0625));
  CHECK(b.stderr_naive == doctest::Approx(std::sqrt(0.0625 / 1000)));
  CHECK(burn_in_start(100000, 0.2) == 20000);
  CHECK_THROWS_AS(burn_in_start(10, 1.0), ArgumentError);
  // Batch means of a constant series.
  CHECK(batch_means_stderr(c, 10) == 0.0);
}

TEST_CASE("homogenization for r > 1 with idle dephasing only") {
  auto m = partial_swap_model(md1(1.5), g12, Dephasing{0.05, DephasingConvention::ClosedForm}, IdentityChannel{});
  const auto rec = run_trajectory(m, draw(m, 100000, 1));
  const std::span<const double> tail(rec.coherence.data() + 90000, 10000);
  const auto st = long_run_stats(tail, 0.0);
  CHECK(std::abs(st.mean - 0.5) <= 1e-3);
  CHECK(st.variance <= 1e-6);
}

TEST_CASE("full decoherence for r > 1 with waiting dephasing only") {
  auto m = partial_swap_model(md1(1.5), g12, IdentityChannel{}, Dephasing{0.05, DephasingConvention::ClosedForm});
  const auto rec = run_trajectory(m, draw(m, 100000, 1));
  const std::span<const double> tail(rec.coherence.data() + 90000, 10000);
  CHECK(long_run_stats(tail, 0.0).mean <= 1e-3);
  CHECK(max_abs(rec.states.back().matrix() - DensityMatrix::maximally_mixed(2).matrix()) <= 1e-3);
}

TEST_CASE("fluctuations vanish for r = 1.2") {
  const auto m = xxz_model(md1(1.2), g12, 0.1 / g12, 0.05);
  const auto rec = run_trajectory(m, draw(m, 100000, 1));
  CHECK(long_run_stats(rec, 0.2).variance <= 1e-4);
}

TEST_CASE("long-run statistics do not depend on the initial state") {
  auto m = xxz_model(md1(0.6), g12, 0.1 / g12, 0.05);
  const auto trace = draw(m, 50000, 3);
  const auto a = long_run_stats(run_trajectory(m, trace), 0.2);
  m.initial_system_state = DensityMatrix::ket1();
  const auto b = long_run_stats(run_trajectory(m, trace), 0.2);
  m.initial_system_state = DensityMatrix::maximally_mixed(2);
  const auto c = long_run_stats(run_trajectory(m, trace), 0.2);
  CHECK(std::abs(a.mean - b.mean) <= 1e-9);
  CHECK(std::abs(a.mean - c.mean) <= 1e-9);
  CHECK(std::abs(a.variance - b.variance) <= 1e-9);
  // With independent queues the means agree statistically.
  const auto d = long_run_stats(run_trajectory(m, draw(m, 50000, 3, 1)), 0.2);
  const std::span<const double> ca(run_trajectory(m, trace).coherence);
  const double se = batch_means_stderr(ca.subspan(10000), 20);
  CHECK(std::abs(a.mean - d.mean) <= 3.0 * std::sqrt(2.0) * se);
}

TEST_CASE("averaged maps are trace preserving and have valid fixed points") {
  const std::vector<ModelSpec> models = {
      xxz_model(md1(0.5), g12, 0.1 / g12, 0.05),
      xxz_model(mm1(0.5), g12, 2.0, 0.05),
      partial_swap_model(mm1(0.01), g12, Dephasing{0.005}, IdentityChannel{}),
  };
  for (const auto& m : models) {
    for (auto mode : {FixedPointMode::DeterministicLimit, FixedPointMode::StochasticLimit, FixedPointMode::MixedAncilla}) {
      if (mode == FixedPointMode::DeterministicLimit && !m.service.is_deterministic()) continue;
      const Matrix M = averaged_map(m, mode);
      // Trace functional (1, 0, 0, 1) is preserved.
      Eigen::RowVectorXcd tr = Eigen::RowVectorXcd::Zero(4);
      tr(0) = tr(3) = 1.0;
      CHECK(max_abs(tr * M - tr) <= 1e-12);
      const auto rho = averaged_map_fixed_point(m, mode);
      CHECK(inspect_state(rho.matrix()).ok());
      CHECK(max_abs(unvec(M * vec(rho.matrix())) - rho.matrix()) <= 1e-10);
    }
  }
}

TEST_CASE("fixed point examples") {
  const auto xxz = xxz_model(md1(0.5), g12, 0.1 / g12, 0.05);
  CHECK(max_abs(averaged_map_fixed_point(xxz, FixedPointMode::MixedAncilla).matrix() -
                DensityMatrix::maximally_mixed(2).matrix()) <= 1e-12);
  const auto swap = partial_swap_model(md1(0.5, 1.0), pi / 2, IdentityChannel{}, IdentityChannel{});
  CHECK(max_abs(averaged_map_fixed_point(swap, FixedPointMode::DeterministicLimit).matrix() -
                DensityMatrix::ket_plus().matrix()) <= 1e-12);
  // Nothing happens at all: every state is fixed.
  auto idle = swap;
  idle.interaction_channel = IdentityChannel{};
  CHECK_THROWS_AS(averaged_map_fixed_point(idle, FixedPointMode::DeterministicLimit), AmbiguousFixedPoint);
  CHECK(fixed_point_mode_from_string("stochastic_limit") == FixedPointMode::StochasticLimit);
  CHECK_THROWS_AS(fixed_point_mode_from_string("nope"), ArgumentError);
}

TEST_CASE("averaged propagator quadrature") {
  // Dephasing averaged over Exponential(l) multiplies coherences by l / (l + 2 gamma).
  const CompiledChannel c(Dephasing{0.3});
  const Matrix avg = averaged_propagator(c, 2, DistributionSpec::exponential(0.7));
  CHECK(std::abs(avg(2, 2) - 0.7 / (0.7 + 0.6)) <= 1e-7);
  CHECK(std::abs(avg(0, 0) - 1.0) <= 1e-12);
  const Matrix det = averaged_propagator(c, 2, DistributionSpec::deterministic(2.0));
  CHECK(max_abs(det - c.propagator(2.0)) == 0.0);
}

TEST_CASE("stochastic limit matches Monte Carlo when arrivals are rare") {
  // Idle and waiting channels are identities, so the embedded chain is driven by
  // iid service times only and its mean state converges to the averaged fixed point.
  ModelSpec m = xxz_model(mm1(0.01), g12, 0.8, 0.05);
  m.idle_channel = IdentityChannel{};
  m.waiting_channel = IdentityChannel{};
  const auto rho = averaged_map_fixed_point(m, FixedPointMode::StochasticLimit);
  const auto rec = run_trajectory(m, draw(m, 40000, 9));
  const std::size_t start = burn_in_start(rec.size(), 0.2);
  std::vector<double> re01, p00;
  for (std::size_t k = start; k < rec.size(); ++k) {
    re01.push_back(rec.states[k](0, 1).real());
    p00.push_back(rec.states[k](0, 0).real());
  }
  const auto s1 = long_run_stats(re01, 0.0), s2 = long_run_stats(p00, 0.0);
  CHECK(std::abs(s1.mean - rho(0, 1).real()) <= 3.0 * batch_means_stderr(re01, 20));
  CHECK(std::abs(s2.mean - rho(0, 0).real()) <= 3.0 * batch_means_stderr(p00, 20) + 1e-12);
}

TEST_CASE("ensemble averages") {
  // No randomness: every run is identical.
  auto det = xxz_model(QueueLaws{DistributionSpec::deterministic(1.5), DistributionSpec::deterministic(1.0)},
                       g12, 1.0, 0.05);
  const auto e = ensemble_average(det, 50, 3, 1);
  for (double v : e.variance) CHECK(v == 0.0);
  CHECK_THROWS_AS(ensemble_average(det, 50, 1, 1), ArgumentError);

  const auto m = xxz_model(mm1(0.5), g12, 0.1 / g12, 0.05);
  const auto small = ensemble_average(m, 100, 100, 11);
  const auto big = ensemble_average(m, 100, 1000, 12);
  for (std::size_t n : {0, 9, 49, 99}) {
    const double se = std::sqrt(small.variance[n] / 100 + big.variance[n] / 1000);
    CHECK(std::abs(small.mean[n] - big.mean[n]) <= 3.0 * se);
  }
  // Thread count does not change the result.
  const auto threaded = ensemble_average(m, 100, 100, 11, 4);
  CHECK(threaded.mean == small.mean);
  CHECK(threaded.variance == small.variance);
}

TEST_CASE("trajectory CSV") {
  const auto q = md1(0.5, 1.0);
  auto m = partial_swap_model(q, pi / 2, IdentityChannel{}, IdentityChannel{});
  std::ostringstream os;
  write_trajectory_csv(os, run_trajectory(m, trace_from_times({2.0}, {1.0})));
  // cos(pi/2) is 6.12e-17 in double, which leaves a tiny imaginary coherence.
  CHECK(os.str() ==
        "n,t_depart,C,rho_re_00,rho_re_01,rho_im_01,rho_re_11\n"
        "1,1,0.5,0.5,0.5,3.061616997868383e-17,0.5\n");
}
