#include "qse/linalg.hpp"

#include "qse/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qse {

double max_abs(const MatrixXc& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix4c& m, double tol) {
  return max_abs(m - m.adjoint()) <= tol;
}

Matrix4c psd_sqrt(const Matrix4c& m) {
  if (!is_hermitian(m, 1e-10)) {
    throw InvariantViolation("psd_sqrt: matrix is not Hermitian");
  }
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  Eigen::Vector4d ev = es.eigenvalues();
  // Eigenvalues at round-off level are treated as exact zeros.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * ev.cwiseAbs().maxCoeff();
  for (int i = 0; i < 4; ++i) {
    if (std::abs(ev(i)) <= noise) ev(i) = 0.0;
    if (ev(i) < kEigenClip) {
      throw InvariantViolation("psd_sqrt: eigenvalue " + std::to_string(ev(i)) +
                               " below clipping floor");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

template <typename Mat>
Mat pinv_impl(const Mat& m, double rel_tol) {
  if (m.size() == 0) return Mat(m.cols(), m.rows());
  if (rel_tol < 0.0) rel_tol = kPinvRelTol;
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace

MatrixXd pinv(const MatrixXd& m, double rel_tol) { return pinv_impl(m, rel_tol); }
MatrixXc pinv(const MatrixXc& m, double rel_tol) { return pinv_impl(m, rel_tol); }

Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m) {
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_symmetric_eigenvalue(const MatrixXd& m) {
  const MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace qse
