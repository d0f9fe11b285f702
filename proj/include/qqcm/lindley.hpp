#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "qqcm/distributions.hpp"

namespace qqcm {

/// Uniform grid 0 = x_0 < ... < x_{n-1} = x_max.
struct GridSpec {
  double x_max = 0.0;
  std::size_t points = 2000;

  std::vector<double> abscissae() const;
  double step() const { return x_max / static_cast<double>(points - 1); }
};

/// Default grid: x_max = max(10 / (mu - lambda), 10 / lambda) and 2000 points.
/// The first term covers the waiting-time tail, the second the idle-time tail.
GridSpec default_grid(const DistributionSpec& arrival, const DistributionSpec& service,
                      std::size_t points = 2000);

/// A CDF sampled on a nonnegative grid. values[0] is the atom at zero.
struct CdfGrid {
  std::vector<double> x;
  std::vector<double> values;

  double atom_at_zero() const { return values.front(); }
  /// Throws ArgumentError unless x is strictly increasing from 0 and values are
  /// nondecreasing within [0, 1].
  void validate() const;
};

/// F == 1 on the grid (the first customer never waits).
CdfGrid unit_cdf(const GridSpec& grid);

/// One step of the Lindley integral equation, F'(x) = int_0^inf F(v) p_U(x - v) dv.
/// Trapezoid rule on the grid; beyond x_max F is taken as 1 and the tail
/// integral is added in closed form. Output is clipped to [0, 1] and made
/// nondecreasing.
CdfGrid lindley_iterate(const CdfGrid& f, const DistributionSpec& arrival,
                        const DistributionSpec& service);

struct LindleySolution {
  CdfGrid cdf;
  std::size_t iterations = 0;
  double residual = 0.0;  // sup-norm change of the last iteration
};

/// Iterates from F == 1 until the sup-norm change drops below tol.
/// Throws NoStationaryDistribution for r >= 1 and ConvergenceError after max_iterations.
LindleySolution lindley_fixed_point(const DistributionSpec& arrival, const DistributionSpec& service,
                                    const GridSpec& grid, double tol = 1e-8,
                                    std::size_t max_iterations = 10000);

/// Idle-time CDF of the next customer, G(x) = 1 - int_0^inf p_U(-x - v) F(v) dv.
CdfGrid idle_cdf(const CdfGrid& f, const DistributionSpec& arrival,
                 const DistributionSpec& service);

/// Right-continuous empirical CDF evaluated on the grid.
CdfGrid empirical_cdf(std::span<const double> samples, const GridSpec& grid);
CdfGrid empirical_cdf(std::span<const double> samples, const std::vector<double>& x);

/// max_k |a_k - b_k|; grids must match.
double sup_distance(const CdfGrid& a, const CdfGrid& b);

/// CSV x,F.
void write_cdf_csv(std::ostream& os, const CdfGrid& cdf);
/// CSV x,F_numeric,F_empirical,abs_diff.
void write_cdf_comparison_csv(std::ostream& os, const CdfGrid& numeric, const CdfGrid& empirical);

}  // namespace qqcm
