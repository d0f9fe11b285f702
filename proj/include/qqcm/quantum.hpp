#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qqcm/linalg.hpp"

namespace qqcm {

// Basis convention: |0> is the +1 eigenvector of sigma_z; in two-qubit
// operators the system is the first tensor factor, the ancilla the second.
namespace pauli {
Matrix identity(int dim);
Matrix x();
Matrix y();
Matrix z();
/// |0><1|
Matrix plus();
/// |1><0|
Matrix minus();
Matrix swap();
}  // namespace pauli

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenTol = 1e-10;

struct StateDefects {
  double hermiticity = 0.0;     // max |X - X^dagger| entrywise
  double trace_error = 0.0;     // |Tr X - 1|
  double min_eigenvalue = 0.0;  // of the Hermitian part
  bool ok() const {
    return hermiticity <= kHermiticityTol && trace_error <= kTraceTol &&
           min_eigenvalue >= -kEigenTol;
  }
};

StateDefects inspect_state(const Matrix& m);

/// Qubit or two-qubit density matrix; always Hermitian, unit trace and PSD
/// within the tolerances above.
class DensityMatrix {
 public:
  /// Validates; throws ArgumentError if m is not a density matrix of dim 2 or 4.
  explicit DensityMatrix(Matrix m);

  /// Takes the Hermitian part and renormalizes the trace to absorb roundoff, then
  /// validates. Throws NumericalError if the input is not a state within tolerance.
  static DensityMatrix sanitized(const Matrix& m);

  static DensityMatrix ket0();
  static DensityMatrix ket1();
  static DensityMatrix ket_plus();
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix product(const DensityMatrix& system, const DensityMatrix& ancilla);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

 private:
  struct Trusted {};
  DensityMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

enum class DephasingConvention {
  Generator,   // exp of gamma (sz rho sz - rho): coherences decay as exp(-2 gamma t)
  ClosedForm,  // [(1 + e^{-gamma t}) rho + (1 - e^{-gamma t}) sz rho sz] / 2: exp(-gamma t)
};

std::string to_string(DephasingConvention c);
DephasingConvention dephasing_convention_from_string(const std::string& s);

struct IdentityChannel {};
struct Dephasing {
  double gamma = 0.0;
  DephasingConvention convention = DephasingConvention::Generator;
};
struct PartialSwapUnitary {
  double g = 0.0;
};
struct XxzDephasing {
  double g = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};

using ChannelSpec = std::variant<IdentityChannel, Dephasing, PartialSwapUnitary, XxzDephasing>;

/// Hilbert-space dimension the channel acts on; 0 for Identity (any).
int channel_dimension(const ChannelSpec& c);
std::string describe(const ChannelSpec& c);
/// Throws ArgumentError for negative rates.
void validate(const ChannelSpec& c);

/// dim^2 x dim^2 matrix acting on column-stacked density matrices.
class Superoperator {
 public:
  explicit Superoperator(Matrix m);
  int hilbert_dim() const { return dim_; }
  const Matrix& matrix() const { return m_; }
  Matrix apply(const Matrix& rho) const { return unvec(m_ * vec(rho)); }

 private:
  Matrix m_;
  int dim_;
};

/// Off-diagonals multiplied by exp(-2 gamma t) (Generator) or exp(-gamma t) (ClosedForm).
Matrix apply_dephasing(const Matrix& rho, double gamma, double t, DephasingConvention c);
DensityMatrix apply_dephasing(const DensityMatrix& rho, double gamma, double t,
                              DephasingConvention c);

/// i cos(g s) I + sin(g s) SWAP.
Matrix partial_swap_unitary(double g, double s);

/// g (sx sx + sy sy + delta sz sz).
Matrix xxz_hamiltonian(double g, double delta);

/// Lindblad generator for a Hamiltonian and Hermitian jump operators J, each with
/// dissipator gamma (J rho J - rho), in the column-stacking convention:
/// L = -i (I kron H - H^T kron I) + sum gamma (conj(J) kron J - I).
Superoperator lindblad_liouvillian(const Matrix& hamiltonian, const std::vector<Matrix>& jumps,
                                   double gamma);

/// -i[H_SA, .] + D[sz kron I] + D[I kron sz], 16 x 16.
Superoperator xxz_liouvillian(double g, double delta, double gamma);

/// Single-qubit pure dephasing generator D[sz], 4 x 4.
Superoperator dephasing_liouvillian(double gamma);

/// exp(L t) applied to rho, followed by sanitization.
DensityMatrix propagate(const Superoperator& l, double t, const DensityMatrix& rho);

/// Trace over the second (ancilla) qubit of a 4 x 4 operator.
Matrix partial_trace_ancilla(const Matrix& rho_sa);
DensityMatrix partial_trace_ancilla(const DensityMatrix& rho_sa);

/// |Tr(sigma_+ rho)| = |rho_01|, in [0, 1/2] for a qubit state.
double coherence(const DensityMatrix& rho);

/// Linear action of the channel at time t on an arbitrary operator.
Matrix apply_channel(const ChannelSpec& c, double t, const Matrix& x);

Superoperator channel_superoperator(const ChannelSpec& c, int dim, double t);

/// Choi matrix sum_ij |i><j| kron E(|i><j|).
Matrix choi_matrix(const ChannelSpec& c, int dim, double t);

/// A channel prepared for repeated application. For generator-based channels the
/// Liouvillian is built once, and if `hint_time` is given the propagator at that
/// time is precomputed. Other times go through an eigendecomposition of the
/// Liouvillian when its eigenvectors are well conditioned, else through expm.
/// Immutable after construction, so it can be shared read-only between threads.
class CompiledChannel {
 public:
  CompiledChannel(ChannelSpec spec, std::optional<double> hint_time = std::nullopt);

  const ChannelSpec& spec() const { return spec_; }
  bool is_identity() const { return std::holds_alternative<IdentityChannel>(spec_); }
  Matrix apply(double t, const Matrix& x) const;
  /// Full superoperator at time t (uses the precomputed propagator when t matches).
  Matrix propagator(double t) const;

 private:
  ChannelSpec spec_;
  std::optional<Superoperator> generator_;
  std::optional<double> hint_time_;
  Matrix hint_propagator_;
  Matrix hint_unitary_;
  // L = V diag(lambda) V^-1, kept only when cond(V) is small.
  Matrix eigvecs_;
  Matrix eigvecs_inv_;
  Vector eigvals_;
};

/// Two blocks of dim rows: real parts, then imaginary parts.
void write_density_csv(std::ostream& os, const DensityMatrix& rho);

}  // namespace qqcm
