#pragma once

#include <Eigen/Core>

#include <complex>

namespace qse {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;
using MatrixXd = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXd = Eigen::VectorXd;

/// Eigenvalues at or above this (negative) floor are treated as round-off and
/// clipped to zero; anything more negative is an invariant violation.
inline constexpr double kEigenClip = -1e-10;

/// Relative singular-value cutoff shared by every pseudo-inverse in the library.
inline constexpr double kPinvRelTol = 1e-10;

[[nodiscard]] double max_abs(const MatrixXc& m);
[[nodiscard]] bool is_hermitian(const Matrix4c& m, double tol = 1e-12);

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Throws InvariantViolation when `m` is not Hermitian to 1e-10 or has an
/// eigenvalue below kEigenClip.
[[nodiscard]] Matrix4c psd_sqrt(const Matrix4c& m);

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// `rel_tol * sigma_max` are dropped. A negative `rel_tol` selects kPinvRelTol.
[[nodiscard]] MatrixXd pinv(const MatrixXd& m, double rel_tol = -1.0);
[[nodiscard]] MatrixXc pinv(const MatrixXc& m, double rel_tol = -1.0);

/// Eigenvalues of a Hermitian 4x4 matrix in ascending order.
[[nodiscard]] Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m);

/// Smallest eigenvalue of a real symmetric matrix.
[[nodiscard]] double min_symmetric_eigenvalue(const MatrixXd& m);

}  // namespace qse
