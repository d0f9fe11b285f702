#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qqcm {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization: vec(X)[i + d*j] = X(i, j).
/// With this convention vec(A X B) = (B^T kron A) vec(X).
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v);

/// Hermitian part (X + X^dagger) / 2.
Matrix hermitian_part(const Matrix& x);

/// Matrix exponential by scaling and squaring with diagonal Padé approximants
/// of degree 3, 5, 7, 9 or 13, selected from the 1-norm as in Higham (2005).
Matrix expm(const Matrix& a);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

}  // namespace qqcm
