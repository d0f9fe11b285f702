#include "qqcm/lindley.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "qqcm/csv.hpp"
#include "qqcm/errors.hpp"
#include "qqcm/queue.hpp"

namespace qqcm {

namespace {

// Location of the jump of p_U and its one-sided limits. Only the
// deterministic-service pair has one: p_U drops from lambda to 0 at u = d.
struct Jump {
  double at;
  double left;
};

std::optional<Jump> density_jump(const DistributionSpec& service, const DistributionSpec& arrival) {
  if (const auto* d = std::get_if<Deterministic>(&service.law())) {
    return Jump{d->value, std::get<Exponential>(arrival.law()).rate};
  }
  return std::nullopt;
}

void finalize(std::vector<double>& values) {
  double running = 0.0;
  for (double& v : values) {
    v = std::clamp(v, 0.0, 1.0);
    running = std::max(running, v);
    v = running;
  }
}

void require_same_grid(const CdfGrid& a, const CdfGrid& b) {
  if (a.x.size() != b.x.size()) {
    throw ArgumentError("CDF grids differ in size");
  }
}

}  // namespace

std::vector<double> GridSpec::abscissae() const {
  if (points < 2 || !(x_max > 0.0)) {
    throw ArgumentError("grid needs x_max > 0 and at least 2 points");
  }
  std::vector<double> x(points);
  const double h = step();
  for (std::size_t k = 0; k < points; ++k) x[k] = h * static_cast<double>(k);
  x.back() = x_max;
  return x;
}

GridSpec default_grid(const DistributionSpec& arrival, const DistributionSpec& service,
                      std::size_t points) {
  const double lam = rate(arrival);
  const double mu = rate(service);
  double x_max = 10.0 / lam;
  if (mu > lam) {
    x_max = std::max(x_max, 10.0 / (mu - lam));
  } else {
    // No stationary law; only meaningful for a few transient iterations.
    x_max += 10.0 / mu;
  }
  return GridSpec{x_max, points};
}

void CdfGrid::validate() const {
  if (x.empty() || x.size() != values.size()) {
    throw ArgumentError("CdfGrid: grid and values must be nonempty and of equal size");
  }
  if (x.front() != 0.0) throw ArgumentError("CdfGrid: grid must start at 0");
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (!(x[k] > x[k - 1])) throw ArgumentError("CdfGrid: grid must be strictly increasing");
    if (values[k] < values[k - 1]) throw ArgumentError("CdfGrid: values must be nondecreasing");
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("CdfGrid: values must lie in [0, 1]");
  }
}

CdfGrid unit_cdf(const GridSpec& grid) {
  CdfGrid f;
  f.x = grid.abscissae();
  f.values.assign(f.x.size(), 1.0);
  return f;
}

CdfGrid lindley_iterate(const CdfGrid& f, const DistributionSpec& arrival,
                        const DistributionSpec& service) {
  require_difference_pair(service, arrival);
  const std::size_t n = f.x.size();
  if (n < 2) throw ArgumentError("lindley_iterate: grid needs at least 2 points");
  const double h = f.x[1] - f.x[0];
  const double x_max = f.x.back();

  // Toeplitz kernel p_U((i - j) h), offset by n - 1.
  std::vector<double> kernel(2 * n - 1);
  for (std::size_t m = 0; m < kernel.size(); ++m) {
    const double u = (static_cast<double>(m) - static_cast<double>(n - 1)) * h;
    kernel[m] = pdf_difference(service, arrival, u);
  }
  std::vector<double> wf(n);
  for (std::size_t j = 0; j < n; ++j) wf[j] = f.values[j] * ((j == 0 || j + 1 == n) ? 0.5 * h : h);

  const auto jump = density_jump(service, arrival);
  CdfGrid out;
  out.x = f.x;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* k = kernel.data() + (n - 1) + i;  // k[-j] = p_U(x_i - x_j)
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wf[j] * k[-static_cast<std::ptrdiff_t>(j)];
    acc += cdf_difference(service, arrival, f.x[i] - x_max);

    if (jump) {
      // Redo the trapezoid on the cell where x_i - v crosses the jump, splitting it there.
      const double v_star = f.x[i] - jump->at;
      if (v_star >= 0.0 && v_star < x_max) {
        const auto j0 = static_cast<std::size_t>(std::floor(v_star / h));
        const double theta = v_star / h - static_cast<double>(j0);
        if (theta == 0.0) {
          // Node j0 sits on the jump; the cell to its left only sees p = 0.
          if (j0 >= 1) acc -= 0.5 * h * f.values[j0] * k[-static_cast<std::ptrdiff_t>(j0)];
        } else if (j0 + 1 < n) {
          const double f_lo = f.values[j0];
          const double f_hi = f.values[j0 + 1];
          const double p_lo = k[-static_cast<std::ptrdiff_t>(j0)];
          const double p_hi = k[-static_cast<std::ptrdiff_t>(j0 + 1)];
          const double f_star = f_lo + theta * (f_hi - f_lo);
          const double naive = 0.5 * h * (f_lo * p_lo + f_hi * p_hi);
          const double split = 0.5 * (1.0 - theta) * h * (f_star * jump->left + f_hi * p_hi);
          acc += split - naive;
        }
      }
    }
    out.values[i] = acc;
  }
  finalize(out.values);
  return out;
}

LindleySolution lindley_fixed_point(const DistributionSpec& arrival, const DistributionSpec& service,
                                    const GridSpec& grid, double tol, std::size_t max_iterations) {
  require_difference_pair(service, arrival);
  const double r = utilization(arrival, service);
  if (r >= 1.0) {
    throw NoStationaryDistribution(r);
  }
  LindleySolution sol;
  sol.cdf = unit_cdf(grid);
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    CdfGrid next = lindley_iterate(sol.cdf, arrival, service);
    double change = 0.0;
    for (std::size_t k = 0; k < next.values.size(); ++k) {
      change = std::max(change, std::abs(next.values[k] - sol.cdf.values[k]));
    }
    sol.cdf = std::move(next);
    sol.iterations = it;
    sol.residual = change;
    if (change < tol) return sol;
  }
  throw ConvergenceError("lindley_fixed_point did not converge", sol.iterations, sol.residual);
}

CdfGrid idle_cdf(const CdfGrid& f, const DistributionSpec& arrival,
                 const DistributionSpec& service) {
  require_difference_pair(service, arrival);
  const std::size_t n = f.x.size();
  if (n < 2) throw ArgumentError("idle_cdf: grid needs at least 2 points");
  const double h = f.x[1] - f.x[0];
  const double x_max = f.x.back();

  // Hankel kernel p_U(-(i + j) h).
  std::vector<double> kernel(2 * n - 1);
  for (std::size_t m = 0; m < kernel.size(); ++m) {
    kernel[m] = pdf_difference(service, arrival, -static_cast<double>(m) * h);
  }
  std::vector<double> wf(n);
  for (std::size_t j = 0; j < n; ++j) wf[j] = f.values[j] * ((j == 0 || j + 1 == n) ? 0.5 * h : h);

  CdfGrid out;
  out.x = f.x;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wf[j] * kernel[i + j];
    acc += cdf_difference(service, arrival, -f.x[i] - x_max);
    out.values[i] = 1.0 - acc;
  }
  finalize(out.values);
  return out;
}

CdfGrid empirical_cdf(std::span<const double> samples, const std::vector<double>& x) {
  if (samples.empty()) throw ArgumentError("empirical_cdf: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  CdfGrid out;
  out.x = x;
  out.values.resize(x.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), x[k]) - sorted.begin();
    out.values[k] = static_cast<double>(count) / n;
  }
  return out;
}

CdfGrid empirical_cdf(std::span<const double> samples, const GridSpec& grid) {
  return empirical_cdf(samples, grid.abscissae());
}

double sup_distance(const CdfGrid& a, const CdfGrid& b) {
  require_same_grid(a, b);
  double d = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    d = std::max(d, std::abs(a.values[k] - b.values[k]));
  }
  return d;
}

void write_cdf_csv(std::ostream& os, const CdfGrid& cdf) {
  CsvWriter csv(os);
  csv.header({"x", "F"});
  for (std::size_t k = 0; k < cdf.x.size(); ++k) csv.row(cdf.x[k], cdf.values[k]);
}

void write_cdf_comparison_csv(std::ostream& os, const CdfGrid& numeric, const CdfGrid& empirical) {
  require_same_grid(numeric, empirical);
  CsvWriter csv(os);
  csv.header({"x", "F_numeric", "F_empirical", "abs_diff"});
  for (std::size_t k = 0; k < numeric.x.size(); ++k) {
    csv.row(numeric.x[k], numeric.values[k], empirical.values[k],
            std::abs(numeric.values[k] - empirical.values[k]));
  }
}

}  // namespace qqcm
