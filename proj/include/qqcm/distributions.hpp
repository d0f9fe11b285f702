#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <variant>

namespace qqcm {

/// Reproducible random stream identified by (base_seed, stream_index).
///
/// Each stream owns a 64-bit Mersenne twister seeded through std::seed_seq with
/// both halves of the base seed and of the stream index. Engine and seed_seq are
/// fully specified by the standard, so a given pair yields the same sequence on
/// every conforming platform and independently of which thread drives it.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t stream_index);

  std::uint64_t base_seed() const { return base_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

struct Deterministic {
  double value;
};

struct Exponential {
  double rate;
};

/// Escape hatch for laws without a closed form. Usable for sampling and
/// queue simulation; rejected by the density-based routines.
struct CustomLaw {
  std::string name;
  double mean;
  std::function<double(RngStream&)> sampler;
};

class DistributionSpec {
 public:
  using Law = std::variant<Deterministic, Exponential, CustomLaw>;

  static DistributionSpec deterministic(double value);
  static DistributionSpec exponential(double rate);
  static DistributionSpec custom(std::string name, double mean,
                                 std::function<double(RngStream&)> sampler);

  const Law& law() const { return law_; }
  bool is_deterministic() const { return std::holds_alternative<Deterministic>(law_); }
  bool is_exponential() const { return std::holds_alternative<Exponential>(law_); }

  std::string describe() const;

 private:
  explicit DistributionSpec(Law law) : law_(std::move(law)) {}
  Law law_;
};

/// Draws one time. Deterministic laws do not consume randomness.
double sample(const DistributionSpec& dist, RngStream& stream);

double mean(const DistributionSpec& dist);

/// Rate 1/mean; infinite for a zero-valued deterministic law.
double rate(const DistributionSpec& dist);

/// Quantile; only defined for Deterministic and Exponential.
double quantile(const DistributionSpec& dist, double p);

/// Density of U = S - T for service S and interarrival T.
///
/// Closed forms exist for S ~ Deterministic(d), T ~ Exponential(l):
///   p(u) = l exp(-l (d - u))  for u <= d, else 0,
/// and for S ~ Exponential(m), T ~ Exponential(l):
///   p(u) = l m / (l + m) * exp(-m u)  (u >= 0),  l m / (l + m) * exp(l u)  (u < 0).
/// Any other pair throws UnsupportedDistributionPair.
double pdf_difference(const DistributionSpec& service, const DistributionSpec& arrival, double u);

/// P(S - T <= u), antiderivative of pdf_difference.
double cdf_difference(const DistributionSpec& service, const DistributionSpec& arrival, double u);

/// Throws UnsupportedDistributionPair unless the pair has a closed-form p_U.
void require_difference_pair(const DistributionSpec& service, const DistributionSpec& arrival);

}  // namespace qqcm
