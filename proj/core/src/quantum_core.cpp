#include "qse/quantum_core.hpp"

#include "qse/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qse {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;

constexpr std::array<Slot, 16> kSlots{{
    {0, 0, false}, {1, 0, false}, {1, 0, true}, {2, 0, false},
    {2, 0, true},  {3, 0, false}, {3, 0, true}, {1, 1, false},
    {2, 1, false}, {2, 1, true},  {3, 1, false}, {3, 1, true},
    {2, 2, false}, {3, 2, false}, {3, 2, true},  {3, 3, false},
}};

Eigen::Matrix2cd pauli(int i) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd s;
  switch (i) {
    case 0: s << 1.0, 0.0, 0.0, 1.0; break;
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -1i, 1i, 0.0; break;
    default: s << 1.0, 0.0, 0.0, -1.0; break;
  }
  return s;
}

Matrix4c kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

double binary_entropy(double p) {
  auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
  return term(p) + term(1.0 - p);
}

Eigen::Vector4d clipped(const Eigen::Vector4d& ev, const char* who) {
  Eigen::Vector4d out = ev;
  for (int i = 0; i < 4; ++i) {
    if (out(i) < kEigenClip) {
      throw InvariantViolation(std::string(who) + ": eigenvalue " + std::to_string(out(i)) +
                               " below clipping floor");
    }
    out(i) = std::max(out(i), 0.0);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const Matrix4c& m) {
  if (!is_hermitian(m, kHermitianTol)) {
    throw InvariantViolation("density matrix is not Hermitian");
  }
  m_ = 0.5 * (m + m.adjoint());
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvariantViolation("density matrix trace is " + std::to_string(tr));
  }
  const double min_ev = hermitian_eigenvalues(m_)(0);
  if (min_ev < kEigenClip) {
    throw InvariantViolation("density matrix has eigenvalue " + std::to_string(min_ev));
  }
}

Eigen::Vector4d DensityMatrix::eigenvalues() const {
  return hermitian_eigenvalues(m_).cwiseMax(0.0);
}

int DensityMatrix::numerical_rank(double tol) const {
  const auto ev = eigenvalues();
  return static_cast<int>((ev.array() > tol).count());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix4c::Identity() / 4.0);
}

DensityMatrix DensityMatrix::pure(const Vector4c& ket) {
  const double n = ket.norm();
  if (n == 0.0) throw DegenerateInputError("pure state from zero vector");
  const Vector4c k = ket / n;
  return DensityMatrix(k * k.adjoint());
}

// ---------------------------------------------------------------------------
// CholeskyModel

int CholeskyModel::param_count(int rank) {
  switch (rank) {
    case 1: return 7;
    case 2: return 12;
    case 3: return 15;
    case 4: return 16;
    default: throw ConfigError("rank must be 1, 2, 3 or 4, got " + std::to_string(rank));
  }
}

int CholeskyModel::rank_for_param_count(int k) {
  switch (k) {
    case 7: return 1;
    case 12: return 2;
    case 15: return 3;
    case 16: return 4;
    default: throw ConfigError("no rank model has " + std::to_string(k) + " parameters");
  }
}

CholeskyModel::CholeskyModel(int rank, VectorXd params) : rank_(rank), params_(std::move(params)) {
  if (params_.size() != param_count(rank)) {
    throw ConfigError("rank " + std::to_string(rank) + " needs " +
                      std::to_string(param_count(rank)) + " parameters, got " +
                      std::to_string(params_.size()));
  }
  if (!params_.allFinite()) throw DegenerateInputError("non-finite Cholesky parameter");
}

Slot cholesky_slot(int i) { return kSlots.at(static_cast<std::size_t>(i)); }

Matrix4c CholeskyModel::triangular() const {
  Matrix4c t = Matrix4c::Zero();
  for (int i = 0; i < size(); ++i) {
    const Slot s = kSlots[static_cast<std::size_t>(i)];
    if (s.imaginary)
      t(s.row, s.col) += Complex(0.0, params_(i));
    else
      t(s.row, s.col) += params_(i);
  }
  return t;
}

Matrix4c CholeskyModel::scaled_density() const {
  const Matrix4c t = triangular();
  return t * t.adjoint();
}

CholeskyModel CholeskyModel::with_lambda(double lambda) const {
  const double n = params_.norm();
  if (n == 0.0) throw DegenerateInputError("cannot rescale an all-zero parameter vector");
  return CholeskyModel(rank_, params_ * (std::sqrt(lambda) / n));
}

CholeskyModel CholeskyModel::canonical() const {
  VectorXd p = params_;
  for (int col = 0; col < rank_; ++col) {
    int diag = -1;
    for (int i = 0; i < size(); ++i) {
      const Slot s = kSlots[static_cast<std::size_t>(i)];
      if (s.row == col && s.col == col) diag = i;
    }
    if (diag >= 0 && p(diag) < 0.0) {
      for (int i = 0; i < size(); ++i)
        if (kSlots[static_cast<std::size_t>(i)].col == col) p(i) = -p(i);
    }
  }
  return CholeskyModel(rank_, std::move(p));
}

Matrix4c CholeskyModel::triangular_derivative(int i) const {
  Matrix4c d = Matrix4c::Zero();
  const Slot s = cholesky_slot(i);
  d(s.row, s.col) = s.imaginary ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
  return d;
}

// ---------------------------------------------------------------------------
// Pauli representation

const std::array<Matrix4c, 16>& pauli_basis() {
  static const std::array<Matrix4c, 16> basis = [] {
    std::array<Matrix4c, 16> b;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) b[static_cast<std::size_t>(4 * i + j)] = 0.25 * kron(pauli(i), pauli(j));
    return b;
  }();
  return basis;
}

Matrix4c density_from_pauli(const PauliCoefficients& phi) {
  const auto& g = pauli_basis();
  Matrix4c m = Matrix4c::Zero();
  for (int mu = 0; mu < 16; ++mu) m += g[static_cast<std::size_t>(mu)] * phi.phi(mu);
  return m;
}

PauliCoefficients pauli_coefficients(const Matrix4c& m) {
  const auto& g = pauli_basis();
  PauliCoefficients out;
  for (int mu = 0; mu < 16; ++mu) out.phi(mu) = 4.0 * (g[static_cast<std::size_t>(mu)] * m).trace().real();
  return out;
}

PauliCoefficients pauli_coefficients(const DensityMatrix& rho) {
  PauliCoefficients out = pauli_coefficients(rho.matrix());
  out.phi(0) = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Cholesky <-> density

DensityMatrix density_from_cholesky(const CholeskyModel& model) {
  const double lam = model.lambda();
  if (!(lam > 0.0)) throw DegenerateInputError("all-zero Cholesky parameter vector");
  Matrix4c g = model.scaled_density() / lam;
  g = 0.5 * (g + g.adjoint());
  // Rescale once more so the trace is unity to machine precision.
  g /= g.trace().real();
  return DensityMatrix(g);
}

CholeskyModel cholesky_from_density(const DensityMatrix& rho, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  const Matrix4c reg = rho.matrix() + 1e-10 * Matrix4c::Identity();
  Eigen::LLT<Matrix4c> llt(reg);
  if (llt.info() != Eigen::Success) {
    throw InvariantViolation("Cholesky factorization failed after regularization");
  }
  const Matrix4c l = llt.matrixL();
  VectorXd p(16);
  for (int i = 0; i < 16; ++i) {
    const Slot s = cholesky_slot(i);
    p(i) = s.imaginary ? l(s.row, s.col).imag() : l(s.row, s.col).real();
  }
  return CholeskyModel(4, p).with_lambda(lambda);
}

CholeskyModel model_from_density(const DensityMatrix& rho, int rank, double lambda) {
  (void)CholeskyModel::param_count(rank);
  const int k = rank;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  MatrixXc top(4, k);
  for (int j = 0; j < k; ++j) {
    const int src = 3 - j;
    top.col(j) = es.eigenvectors().col(src) * std::sqrt(ev(src));
  }
  // top = R^dagger Q^dagger with R from the QR factorization of top^dagger,
  // so R^dagger is lower trapezoidal and reproduces top * top^dagger.
  Eigen::HouseholderQR<MatrixXc> qr(top.adjoint());
  MatrixXc r = qr.matrixQR().triangularView<Eigen::Upper>();
  MatrixXc l = r.adjoint();  // 4 x k
  for (int j = 0; j < k; ++j) {
    const Complex d = l(j, j);
    if (std::abs(d) > 0.0) l.col(j) *= std::conj(d) / std::abs(d);
  }
  VectorXd p(CholeskyModel::param_count(rank));
  for (int i = 0; i < p.size(); ++i) {
    const Slot s = cholesky_slot(i);
    p(i) = s.imaginary ? l(s.row, s.col).imag() : l(s.row, s.col).real();
  }
  if (p.norm() == 0.0) throw DegenerateInputError("state has no weight in the requested rank");
  return CholeskyModel(rank, p).with_lambda(lambda);
}

// ---------------------------------------------------------------------------
// Metrics

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  // Tr|sqrt(rho1) sqrt(rho2)| avoids square roots of round-off eigenvalues.
  const Matrix4c prod = psd_sqrt(rho1.matrix()) * psd_sqrt(rho2.matrix());
  const double f = Eigen::JacobiSVD<Matrix4c>(prod).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

double bures_distance_sq(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  return 2.0 * (1.0 - fidelity(rho1, rho2));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const Eigen::Vector4d p = clipped(hermitian_eigenvalues(rho.matrix()), "entropy");
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    if (p(i) > 0.0) s -= p(i) * std::log2(p(i));
  return std::max(s, 0.0);
}

double concurrence(const DensityMatrix& rho) {
  const Matrix4c yy = kron(pauli(2), pauli(2));
  const Matrix4c flipped = yy * rho.matrix().conjugate() * yy;
  const Matrix4c s = psd_sqrt(rho.matrix());
  Matrix4c r = s * flipped * s;
  r = 0.5 * (r + r.adjoint());
  Eigen::Vector4d ev = clipped(hermitian_eigenvalues(r), "concurrence");
  for (int i = 0; i < 4; ++i) ev(i) = std::sqrt(ev(i));
  // ascending order: ev(3) is the largest
  return std::max(0.0, ev(3) - ev(2) - ev(1) - ev(0));
}

double entanglement_of_formation(const DensityMatrix& rho) {
  const double c = std::min(concurrence(rho), 1.0);
  return std::clamp(binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c))), 0.0, 1.0);
}

DensityMatrix clip_to_state(const Matrix4c& m) {
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const double tr = ev.sum();
  if (!(tr > 0.0)) throw DegenerateInputError("matrix has no positive eigenvalue");
  ev /= tr;
  Matrix4c out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint());
  out /= out.trace().real();
  return DensityMatrix(out);
}

// ---------------------------------------------------------------------------
// Polarization kets

namespace kets {

Eigen::Vector2cd H() { return Eigen::Vector2cd(1.0, 0.0); }
Eigen::Vector2cd V() { return Eigen::Vector2cd(0.0, 1.0); }
Eigen::Vector2cd D() { return (H() + V()) / std::numbers::sqrt2; }
Eigen::Vector2cd X() { return (H() - V()) / std::numbers::sqrt2; }
Eigen::Vector2cd R() { return (H() + Complex(0.0, 1.0) * V()) / std::numbers::sqrt2; }
Eigen::Vector2cd L() { return (H() - Complex(0.0, 1.0) * V()) / std::numbers::sqrt2; }

Eigen::Vector2cd by_label(char label) {
  switch (label) {
    case 'H': return H();
    case 'V': return V();
    case 'D': return D();
    case 'X': return X();
    case 'R': return R();
    case 'L': return L();
    default: throw ConfigError(std::string("unknown polarization label '") + label + "'");
  }
}

Vector4c product(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  Vector4c out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

Vector4c product(const char* labels) {
  return product(by_label(labels[0]), by_label(labels[1]));
}

}  // namespace kets

}  // namespace qse
