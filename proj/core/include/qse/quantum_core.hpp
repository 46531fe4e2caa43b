#pragma once

#include "qse/linalg.hpp"

#include <array>
#include <span>
#include <vector>

namespace qse {

using Vector16d = Eigen::Matrix<double, 16, 1>;

/// Two-qubit density matrix in the |HH>, |HV>, |VH>, |VV> basis.
///
/// Construction validates Hermiticity (1e-12), unit trace (1e-12) and
/// positivity (smallest eigenvalue >= -1e-10); the stored matrix is the exact
/// Hermitian part of the input.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix4c& m);

  [[nodiscard]] const Matrix4c& matrix() const noexcept { return m_; }
  [[nodiscard]] Complex operator()(int r, int c) const { return m_(r, c); }

  /// Eigenvalues in ascending order, with round-off negatives clipped to 0.
  [[nodiscard]] Eigen::Vector4d eigenvalues() const;

  /// Number of eigenvalues above `tol`.
  [[nodiscard]] int numerical_rank(double tol = 1e-9) const;

  [[nodiscard]] static DensityMatrix maximally_mixed();
  [[nodiscard]] static DensityMatrix pure(const Vector4c& ket);

 private:
  Matrix4c m_;
};

/// Hilbert-Schmidt coordinates phi^mu, mu = 4i + j, of rho = sum Gamma_mu phi^mu.
struct PauliCoefficients {
  Vector16d phi = Vector16d::Zero();
};

/// Rank-k lower-triangular parametrization rho = T T^dagger / Tr[T T^dagger].
///
/// Parameters follow the 16-slot layout
///
///     [ t1          0            0            0   ]
///     [ t2 + i t3   t8           0            0   ]
///     [ t4 + i t5   t9  + i t10  t13          0   ]
///     [ t6 + i t7   t11 + i t12  t14 + i t15  t16 ]
///
/// truncated to the first 7/12/15/16 entries for rank 1/2/3/4, which zeroes
/// the trailing columns. Tr[T T^dagger] is the nuisance scale lambda and
/// equals the squared Euclidean norm of the parameter vector.
class CholeskyModel {
 public:
  CholeskyModel(int rank, VectorXd params);

  [[nodiscard]] static int param_count(int rank);
  [[nodiscard]] static int rank_for_param_count(int k);

  [[nodiscard]] int rank() const noexcept { return rank_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(params_.size()); }
  [[nodiscard]] const VectorXd& params() const noexcept { return params_; }

  [[nodiscard]] Matrix4c triangular() const;
  /// T T^dagger, i.e. rho scaled by lambda.
  [[nodiscard]] Matrix4c scaled_density() const;
  [[nodiscard]] double lambda() const { return params_.squaredNorm(); }

  /// Same shape, parameters rescaled so that Tr[T T^dagger] = `lambda`.
  [[nodiscard]] CholeskyModel with_lambda(double lambda) const;

  /// Flips the sign of every column whose diagonal entry is negative. The
  /// density matrix is unchanged; for rank 4 the result is the unique
  /// Cholesky factor with nonnegative diagonal.
  [[nodiscard]] CholeskyModel canonical() const;

  /// Derivative dT/dtheta^i, a single unit (or imaginary unit) entry.
  [[nodiscard]] Matrix4c triangular_derivative(int i) const;

 private:
  int rank_;
  VectorXd params_;
};

struct Slot {
  int row;
  int col;
  bool imaginary;
};

/// Position of parameter `i` (0-based) inside T.
[[nodiscard]] Slot cholesky_slot(int i);

/// Gamma_0 ... Gamma_15 with Gamma_{4i+j} = (sigma_i (x) sigma_j) / 4.
[[nodiscard]] const std::array<Matrix4c, 16>& pauli_basis();

[[nodiscard]] Matrix4c density_from_pauli(const PauliCoefficients& phi);
[[nodiscard]] PauliCoefficients pauli_coefficients(const DensityMatrix& rho);
/// phi^mu = 4 Tr[Gamma_mu M] for any Hermitian M (phi^0 is then Tr M).
[[nodiscard]] PauliCoefficients pauli_coefficients(const Matrix4c& m);

/// Throws DegenerateInputError for an all-zero parameter vector.
[[nodiscard]] DensityMatrix density_from_cholesky(const CholeskyModel& model);

/// Rank-4 factor of rho + 1e-10 I, scaled so that Tr[T T^dagger] = lambda.
[[nodiscard]] CholeskyModel cholesky_from_density(const DensityMatrix& rho, double lambda);

/// Rank-k factor of the best rank-k approximation of rho, obtained by an LQ
/// factorization of V_k sqrt(diag(p_k)). Works for singular leading minors.
[[nodiscard]] CholeskyModel model_from_density(const DensityMatrix& rho, int rank, double lambda);

[[nodiscard]] double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);
[[nodiscard]] double bures_distance_sq(const DensityMatrix& rho1, const DensityMatrix& rho2);
/// Von Neumann entropy in bits.
[[nodiscard]] double von_neumann_entropy(const DensityMatrix& rho);
[[nodiscard]] double concurrence(const DensityMatrix& rho);
[[nodiscard]] double entanglement_of_formation(const DensityMatrix& rho);

/// Projects a Hermitian matrix onto the PSD cone and renormalizes to unit
/// trace (negative eigenvalues set to zero).
[[nodiscard]] DensityMatrix clip_to_state(const Matrix4c& m);

namespace kets {
// Single-qubit polarization states.
[[nodiscard]] Eigen::Vector2cd H();
[[nodiscard]] Eigen::Vector2cd V();
[[nodiscard]] Eigen::Vector2cd D();
[[nodiscard]] Eigen::Vector2cd X();
[[nodiscard]] Eigen::Vector2cd R();
[[nodiscard]] Eigen::Vector2cd L();
/// Label lookup for "H", "V", "D", "X", "R", "L".
[[nodiscard]] Eigen::Vector2cd by_label(char label);
[[nodiscard]] Vector4c product(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b);
/// Two-letter product ket such as "HD".
[[nodiscard]] Vector4c product(const char* labels);
}  // namespace kets

}  // namespace qse
