#include "qqcm/quantum.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "qqcm/csv.hpp"
#include "qqcm/errors.hpp"

namespace qqcm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr cplx kI{0.0, 1.0};

// Largest tolerated trace drift before renormalizing is treated as a failure.
constexpr double kTraceDriftLimit = 1e-8;

double min_eigenvalue_hermitian(const Matrix& h) {
  if (h.rows() == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double half_gap = 0.5 * (a - d);
    return 0.5 * (a + d) - std::sqrt(half_gap * half_gap + std::norm(h(0, 1)));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_square_dim(const Matrix& x, int dim, const char* what) {
  if (x.rows() != dim || x.cols() != dim) {
    throw ArgumentError(std::string(what) + ": expected a " + std::to_string(dim) + "x" +
                        std::to_string(dim) + " operator");
  }
}

}  // namespace

namespace pauli {
Matrix identity(int dim) { return Matrix::Identity(dim, dim); }
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Matrix plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}
Matrix minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}
Matrix swap() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return m;
}
}  // namespace pauli

StateDefects inspect_state(const Matrix& m) {
  StateDefects d;
  d.hermiticity = (m - m.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m.trace() - cplx(1.0, 0.0));
  d.min_eigenvalue = min_eigenvalue_hermitian(hermitian_part(m));
  return d;
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || (m_.rows() != 2 && m_.rows() != 4)) {
    throw ArgumentError("density matrix must be 2x2 or 4x4");
  }
  if (!m_.allFinite()) {
    throw ArgumentError("density matrix has non-finite entries");
  }
  const auto d = inspect_state(m_);
  if (!d.ok()) {
    std::ostringstream os;
    os << "not a density matrix: hermiticity defect " << d.hermiticity << ", trace error "
       << d.trace_error << ", min eigenvalue " << d.min_eigenvalue;
    throw ArgumentError(os.str());
  }
}

DensityMatrix DensityMatrix::sanitized(const Matrix& m) {
  if (!m.allFinite()) {
    throw NumericalError("state has non-finite entries");
  }
  Matrix h = hermitian_part(m);
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > kTraceDriftLimit) {
    throw NumericalError("state trace drifted to " + std::to_string(tr));
  }
  h /= tr;
  const double lo = min_eigenvalue_hermitian(h);
  if (lo < -kEigenTol) {
    throw NumericalError("state lost positivity: min eigenvalue " + std::to_string(lo));
  }
  return DensityMatrix(std::move(h), Trusted{});
}

DensityMatrix DensityMatrix::ket0() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1;
  return DensityMatrix(std::move(m), Trusted{});
}

DensityMatrix DensityMatrix::ket1() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1;
  return DensityMatrix(std::move(m), Trusted{});
}

DensityMatrix DensityMatrix::ket_plus() {
  return DensityMatrix(Matrix::Constant(2, 2, 0.5), Trusted{});
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim != 2 && dim != 4) {
    throw ArgumentError("maximally_mixed: dim must be 2 or 4");
  }
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim), Trusted{});
}

DensityMatrix DensityMatrix::product(const DensityMatrix& system, const DensityMatrix& ancilla) {
  if (system.dim() != 2 || ancilla.dim() != 2) {
    throw ArgumentError("product: both factors must be qubits");
  }
  return DensityMatrix(kron(system.matrix(), ancilla.matrix()), Trusted{});
}

std::string to_string(DephasingConvention c) {
  return c == DephasingConvention::Generator ? "generator" : "closed_form";
}

DephasingConvention dephasing_convention_from_string(const std::string& s) {
  if (s == "generator") return DephasingConvention::Generator;
  if (s == "closed_form" || s == "sm_closed_form") return DephasingConvention::ClosedForm;
  throw ArgumentError("unknown dephasing convention '" + s + "'");
}

int channel_dimension(const ChannelSpec& c) {
  return std::visit(overloaded{
                        [](const IdentityChannel&) { return 0; },
                        [](const Dephasing&) { return 2; },
                        [](const PartialSwapUnitary&) { return 4; },
                        [](const XxzDephasing&) { return 4; },
                    },
                    c);
}

std::string describe(const ChannelSpec& c) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const IdentityChannel&) { os << "identity"; },
                 [&](const Dephasing& d) {
                   os << "dephasing(gamma=" << d.gamma << ", " << to_string(d.convention) << ")";
                 },
                 [&](const PartialSwapUnitary& p) { os << "partial_swap(g=" << p.g << ")"; },
                 [&](const XxzDephasing& x) {
                   os << "xxz(g=" << x.g << ", delta=" << x.delta << ", gamma=" << x.gamma << ")";
                 },
             },
             c);
  return os.str();
}

void validate(const ChannelSpec& c) {
  std::visit(overloaded{
                 [](const IdentityChannel&) {},
                 [](const Dephasing& d) {
                   if (!(d.gamma >= 0.0) || !std::isfinite(d.gamma)) {
                     throw ArgumentError("dephasing rate must be finite and >= 0");
                   }
                 },
                 [](const PartialSwapUnitary& p) {
                   if (!std::isfinite(p.g)) throw ArgumentError("partial swap g must be finite");
                 },
                 [](const XxzDephasing& x) {
                   if (!std::isfinite(x.g) || !std::isfinite(x.delta)) {
                     throw ArgumentError("xxz g and delta must be finite");
                   }
                   if (!(x.gamma >= 0.0) || !std::isfinite(x.gamma)) {
                     throw ArgumentError("xxz dephasing rate must be finite and >= 0");
                   }
                 },
             },
             c);
}

Superoperator::Superoperator(Matrix m) : m_(std::move(m)) {
  const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m_.rows()))));
  if (m_.rows() != m_.cols() || d * d != m_.rows()) {
    throw ArgumentError("superoperator must be square with a perfect-square size");
  }
  dim_ = d;
}

Matrix apply_dephasing(const Matrix& rho, double gamma, double t, DephasingConvention c) {
  require_square_dim(rho, 2, "apply_dephasing");
  if (!(gamma >= 0.0) || !(t >= 0.0)) {
    throw ArgumentError("apply_dephasing: gamma and t must be >= 0");
  }
  const double rate = c == DephasingConvention::Generator ? 2.0 * gamma : gamma;
  const double f = std::exp(-rate * t);
  Matrix out = rho;
  out(0, 1) *= f;
  out(1, 0) *= f;
  return out;
}

DensityMatrix apply_dephasing(const DensityMatrix& rho, double gamma, double t,
                              DephasingConvention c) {
  if (rho.dim() != 2) throw ArgumentError("apply_dephasing: qubit state expected");
  return DensityMatrix::sanitized(apply_dephasing(rho.matrix(), gamma, t, c));
}

Matrix partial_swap_unitary(double g, double s) {
  const double phase = g * s;
  return kI * std::cos(phase) * Matrix::Identity(4, 4) + std::sin(phase) * pauli::swap();
}

Matrix xxz_hamiltonian(double g, double delta) {
  return g * (kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y()) +
              delta * kron(pauli::z(), pauli::z()));
}

Superoperator lindblad_liouvillian(const Matrix& hamiltonian, const std::vector<Matrix>& jumps,
                                   double gamma) {
  const auto d = hamiltonian.rows();
  const Matrix id = Matrix::Identity(d, d);
  Matrix l = -kI * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
  const Matrix id2 = Matrix::Identity(d * d, d * d);
  for (const auto& j : jumps) {
    l += gamma * (kron(j.conjugate(), j) - id2);
  }
  return Superoperator(std::move(l));
}

Superoperator xxz_liouvillian(double g, double delta, double gamma) {
  if (!(gamma >= 0.0)) throw ArgumentError("xxz_liouvillian: gamma must be >= 0");
  const Matrix id2 = pauli::identity(2);
  return lindblad_liouvillian(xxz_hamiltonian(g, delta),
                              {kron(pauli::z(), id2), kron(id2, pauli::z())}, gamma);
}

Superoperator dephasing_liouvillian(double gamma) {
  if (!(gamma >= 0.0)) throw ArgumentError("dephasing_liouvillian: gamma must be >= 0");
  return lindblad_liouvillian(Matrix::Zero(2, 2), {pauli::z()}, gamma);
}

DensityMatrix propagate(const Superoperator& l, double t, const DensityMatrix& rho) {
  if (!(t >= 0.0)) throw ArgumentError("propagate: t must be >= 0");
  if (l.hilbert_dim() != rho.dim()) throw ArgumentError("propagate: dimension mismatch");
  if (t == 0.0) return rho;
  const Matrix e = expm(l.matrix() * t);
  return DensityMatrix::sanitized(unvec(e * vec(rho.matrix())));
}

Matrix partial_trace_ancilla(const Matrix& rho_sa) {
  require_square_dim(rho_sa, 4, "partial_trace_ancilla");
  Matrix out(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out(i, j) = rho_sa(2 * i, 2 * j) + rho_sa(2 * i + 1, 2 * j + 1);
    }
  }
  return out;
}

DensityMatrix partial_trace_ancilla(const DensityMatrix& rho_sa) {
  if (rho_sa.dim() != 4) throw ArgumentError("partial_trace_ancilla: 4x4 state expected");
  return DensityMatrix::sanitized(partial_trace_ancilla(rho_sa.matrix()));
}

double coherence(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw ArgumentError("coherence: qubit state expected");
  return std::abs((pauli::plus() * rho.matrix()).trace());
}

Matrix apply_channel(const ChannelSpec& c, double t, const Matrix& x) {
  if (!(t >= 0.0)) throw ArgumentError("channel time must be >= 0");
  return std::visit(
      overloaded{
          [&](const IdentityChannel&) -> Matrix { return x; },
          [&](const Dephasing& d) -> Matrix {
            return apply_dephasing(x, d.gamma, t, d.convention);
          },
          [&](const PartialSwapUnitary& p) -> Matrix {
            require_square_dim(x, 4, "partial swap");
            const Matrix u = partial_swap_unitary(p.g, t);
            return u * x * u.adjoint();
          },
          [&](const XxzDephasing& xx) -> Matrix {
            require_square_dim(x, 4, "xxz channel");
            const auto l = xxz_liouvillian(xx.g, xx.delta, xx.gamma);
            return unvec(expm(l.matrix() * t) * vec(x));
          },
      },
      c);
}

Superoperator channel_superoperator(const ChannelSpec& c, int dim, double t) {
  const int cd = channel_dimension(c);
  if (cd != 0 && cd != dim) {
    throw ArgumentError("channel " + describe(c) + " acts on dimension " + std::to_string(cd));
  }
  const int n = dim * dim;
  Matrix m(n, n);
  for (int k = 0; k < n; ++k) {
    Matrix basis = Matrix::Zero(dim, dim);
    basis(k % dim, k / dim) = 1.0;
    m.col(k) = vec(apply_channel(c, t, basis));
  }
  return Superoperator(std::move(m));
}

Matrix choi_matrix(const ChannelSpec& c, int dim, double t) {
  Matrix choi = Matrix::Zero(dim * dim, dim * dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Matrix eij = Matrix::Zero(dim, dim);
      eij(i, j) = 1.0;
      choi += kron(eij, apply_channel(c, t, eij));
    }
  }
  return choi;
}

namespace {
// Spectral propagators lose about cond(V) * eps; beyond this use expm.
constexpr double kMaxEigenCondition = 1e4;
}  // namespace

CompiledChannel::CompiledChannel(ChannelSpec spec, std::optional<double> hint_time)
    : spec_(std::move(spec)), hint_time_(hint_time) {
  validate(spec_);
  if (const auto* x = std::get_if<XxzDephasing>(&spec_)) {
    generator_ = xxz_liouvillian(x->g, x->delta, x->gamma);
    if (hint_time_) {
      hint_propagator_ = expm(generator_->matrix() * *hint_time_);
    }
    Eigen::ComplexEigenSolver<Matrix> es(generator_->matrix());
    if (es.info() == Eigen::Success) {
      const Matrix v = es.eigenvectors();
      const Matrix v_inv = v.inverse();
      const double cond = v.cwiseAbs().colwise().sum().maxCoeff() *
                          v_inv.cwiseAbs().colwise().sum().maxCoeff();
      if (std::isfinite(cond) && cond <= kMaxEigenCondition) {
        eigvecs_ = v;
        eigvecs_inv_ = v_inv;
        eigvals_ = es.eigenvalues();
      }
    }
  } else if (const auto* p = std::get_if<PartialSwapUnitary>(&spec_); p && hint_time_) {
    hint_unitary_ = partial_swap_unitary(p->g, *hint_time_);
  }
}

Matrix CompiledChannel::propagator(double t) const {
  if (generator_) {
    if (hint_time_ && t == *hint_time_) return hint_propagator_;
    if (eigvals_.size() != 0) {
      const Vector e = (eigvals_ * t).array().exp().matrix();
      return eigvecs_ * e.asDiagonal() * eigvecs_inv_;
    }
    return expm(generator_->matrix() * t);
  }
  const int dim = channel_dimension(spec_) == 0 ? 2 : channel_dimension(spec_);
  return channel_superoperator(spec_, dim, t).matrix();
}

Matrix CompiledChannel::apply(double t, const Matrix& x) const {
  if (!(t >= 0.0)) throw ArgumentError("channel time must be >= 0");
  if (generator_) {
    if (x.rows() != 4 || x.cols() != 4) throw ArgumentError("xxz channel: 4x4 operator expected");
    if (hint_time_ && t == *hint_time_) return unvec(hint_propagator_ * vec(x));
    if (eigvals_.size() != 0) {
      const Vector y = eigvecs_inv_ * vec(x);
      return unvec(eigvecs_ * (eigvals_ * t).array().exp().matrix().cwiseProduct(y));
    }
    return unvec(expm(generator_->matrix() * t) * vec(x));
  }
  if (hint_unitary_.size() != 0 && t == *hint_time_) {
    if (x.rows() != 4 || x.cols() != 4) throw ArgumentError("partial swap: 4x4 operator expected");
    return hint_unitary_ * x * hint_unitary_.adjoint();
  }
  return apply_channel(spec_, t, x);
}

void write_density_csv(std::ostream& os, const DensityMatrix& rho) {
  CsvWriter csv(os);
  std::vector<std::string> header{"part", "row"};
  for (int j = 0; j < rho.dim(); ++j) header.push_back("c" + std::to_string(j));
  csv.header(header);
  for (int part = 0; part < 2; ++part) {
    for (int i = 0; i < rho.dim(); ++i) {
      std::string line = (part == 0 ? "re," : "im,") + std::to_string(i);
      for (int j = 0; j < rho.dim(); ++j) {
        line += ',';
        line += format_number(part == 0 ? rho(i, j).real() : rho(i, j).imag());
      }
      csv.row(line);
    }
  }
}

}  // namespace qqcm
