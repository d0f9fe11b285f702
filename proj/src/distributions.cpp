#include "qqcm/distributions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qqcm/errors.hpp"

namespace qqcm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::seed_seq make_seed_seq(std::uint64_t base_seed, std::uint64_t stream_index) {
  return std::seed_seq{static_cast<std::uint32_t>(base_seed),
                       static_cast<std::uint32_t>(base_seed >> 32),
                       static_cast<std::uint32_t>(stream_index),
                       static_cast<std::uint32_t>(stream_index >> 32)};
}

}  // namespace

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
    : base_seed_(base_seed), stream_index_(stream_index) {
  auto seq = make_seed_seq(base_seed, stream_index);
  engine_.seed(seq);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

DistributionSpec DistributionSpec::deterministic(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ArgumentError("deterministic time must be finite and >= 0");
  }
  return DistributionSpec(Deterministic{value});
}

DistributionSpec DistributionSpec::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ArgumentError("exponential rate must be finite and > 0");
  }
  return DistributionSpec(Exponential{rate});
}

DistributionSpec DistributionSpec::custom(std::string name, double mean,
                                          std::function<double(RngStream&)> sampler) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ArgumentError("custom law mean must be finite and >= 0");
  }
  if (!sampler) {
    throw ArgumentError("custom law needs a sampler");
  }
  return DistributionSpec(CustomLaw{std::move(name), mean, std::move(sampler)});
}

std::string DistributionSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Deterministic& d) { os << "Deterministic(" << d.value << ")"; },
                 [&](const Exponential& e) { os << "Exponential(rate=" << e.rate << ")"; },
                 [&](const CustomLaw& c) { os << "Custom(" << c.name << ")"; },
             },
             law_);
  return os.str();
}

double sample(const DistributionSpec& dist, RngStream& stream) {
  return std::visit(overloaded{
                        [](const Deterministic& d) { return d.value; },
                        [&](const Exponential& e) { return -std::log1p(-stream.uniform()) / e.rate; },
                        [&](const CustomLaw& c) {
                          const double t = c.sampler(stream);
                          if (!(t >= 0.0)) {
                            throw ArgumentError("custom sampler '" + c.name + "' returned a negative time");
                          }
                          return t;
                        },
                    },
                    dist.law());
}

double mean(const DistributionSpec& dist) {
  return std::visit(overloaded{
                        [](const Deterministic& d) { return d.value; },
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const CustomLaw& c) { return c.mean; },
                    },
                    dist.law());
}

double rate(const DistributionSpec& dist) {
  const double m = mean(dist);
  return m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();
}

double quantile(const DistributionSpec& dist, double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ArgumentError("quantile level must lie in [0, 1)");
  }
  return std::visit(overloaded{
                        [](const Deterministic& d) { return d.value; },
                        [&](const Exponential& e) { return -std::log1p(-p) / e.rate; },
                        [](const CustomLaw& c) -> double {
                          throw UnsupportedDistributionPair("no quantile for custom law '" + c.name + "'");
                        },
                    },
                    dist.law());
}

void require_difference_pair(const DistributionSpec& service, const DistributionSpec& arrival) {
  if (arrival.is_exponential() && (service.is_deterministic() || service.is_exponential())) {
    return;
  }
  throw UnsupportedDistributionPair("no closed-form density for S - T with S = " + service.describe() +
                                    ", T = " + arrival.describe());
}

double pdf_difference(const DistributionSpec& service, const DistributionSpec& arrival, double u) {
  require_difference_pair(service, arrival);
  const double lam = std::get<Exponential>(arrival.law()).rate;
  if (const auto* d = std::get_if<Deterministic>(&service.law())) {
    return u <= d->value ? lam * std::exp(-lam * (d->value - u)) : 0.0;
  }
  const double mu = std::get<Exponential>(service.law()).rate;
  const double c = lam * mu / (lam + mu);
  return u >= 0.0 ? c * std::exp(-mu * u) : c * std::exp(lam * u);
}

double cdf_difference(const DistributionSpec& service, const DistributionSpec& arrival, double u) {
  require_difference_pair(service, arrival);
  const double lam = std::get<Exponential>(arrival.law()).rate;
  if (const auto* d = std::get_if<Deterministic>(&service.law())) {
    return u <= d->value ? std::exp(-lam * (d->value - u)) : 1.0;
  }
  const double mu = std::get<Exponential>(service.law()).rate;
  if (u < 0.0) {
    return mu / (lam + mu) * std::exp(lam * u);
  }
  return 1.0 - lam / (lam + mu) * std::exp(-mu * u);
}

}  // namespace qqcm
