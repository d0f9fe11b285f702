#include "qqcm/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qqcm/errors.hpp"

namespace qqcm {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw ArgumentError("unvec: length is not a perfect square");
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix hermitian_part(const Matrix& x) {
  return 0.5 * (x + x.adjoint());
}

namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Largest 1-norms for which the degree-m approximant meets unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double norm1(const Matrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

template <std::size_t N>
Matrix pade_low(const Matrix& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix u_inner = b[1] * id;
  Matrix v = b[0] * id;
  Matrix power = id;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    v += b[k] * power;
    if (k + 1 < N) u_inner += b[k + 1] * power;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                        b[3] * a2 + b[1] * id);
  const Matrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw ArgumentError("expm: matrix must be square");
  }
  if (!a.allFinite()) {
    throw NumericalError("expm: non-finite input");
  }
  const double nrm = norm1(a);
  if (nrm <= kTheta3) return pade_low(a, kPade3);
  if (nrm <= kTheta5) return pade_low(a, kPade5);
  if (nrm <= kTheta7) return pade_low(a, kPade7);
  if (nrm <= kTheta9) return pade_low(a, kPade9);

  int squarings = 0;
  if (nrm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / kTheta13)));
  }
  Matrix r = pade13(a / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) {
    r = r * r;
  }
  if (!r.allFinite()) {
    throw NumericalError("expm: result is not finite");
  }
  return r;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) {
    throw ArgumentError("gauss_legendre: need at least one node");
  }
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Three-term recurrence for P_n(x) and its derivative.
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double pn = n == 1 ? x : p1;
    const double pn1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

}  // namespace qqcm
