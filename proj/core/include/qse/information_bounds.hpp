#pragma once

#include "qse/quantum_core.hpp"
#include "qse/tomography.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qse {

/// Classical Fisher information of the Poisson count model in theta coordinates.
struct FisherMatrix {
  MatrixXd entries;
  int rank_model = 0;
  VectorXd at_theta;
  /// Tr[T T^dagger] at which the matrix was evaluated.
  double acquisition_scale = 0.0;
};

struct SldFisherMatrix {
  MatrixXd entries;
  int rank_model = 0;
  VectorXd at_theta;
};

struct BoundReport {
  /// C = Tr[J_SLD pinv(Jbar)] / 8, both at the unit-scale point theta / sqrt(lambda).
  double coefficient = 0.0;
  int rank_model = 0;
  std::string set_name;
  VectorXd theta;
  /// False when the bound was computed on an incomplete measurement set.
  bool complete_set = true;

  /// Asymptotic lower bound on 1 - F at total scale lambda.
  [[nodiscard]] double infidelity_bound(double lambda) const { return coefficient / lambda; }
  /// Asymptotic lower bound on the squared Bures distance.
  [[nodiscard]] double bures_sq_bound(double lambda) const { return 2.0 * coefficient / lambda; }
};

enum class Sampling { gaussian, poisson };

enum class CompletenessPolicy {
  /// Throw IncompleteMeasurementError for an incomplete set.
  require,
  /// Proceed; pinv drops the unmeasured directions and the report is flagged.
  pseudo_inverse,
};

/// d rho / d theta^i for i = 0..k-1; each Hermitian and traceless.
[[nodiscard]] std::vector<Matrix4c> density_gradient(const CholeskyModel& model);

/// 16 x k matrix dM_nu / d theta^i.
[[nodiscard]] MatrixXd mean_count_jacobian(const CholeskyModel& model, const ProjectorSet& set);

/// J_ij = sum_nu dM_nu/dtheta^i dM_nu/dtheta^j / M_nu.
///
/// Channels with vanishing mean are skipped when their derivative vanishes
/// too; otherwise UnboundedInformationError is thrown.
[[nodiscard]] FisherMatrix fisher_analytic(const CholeskyModel& model, const ProjectorSet& set);

/// Average outer product of the score over sampled count vectors.
///
/// Gaussian draws are rounded to the nearest nonnegative integer. Samples
/// are processed in fixed blocks with derived seeds and summed in block
/// order, so the result depends only on `seed`, never on `threads`.
[[nodiscard]] FisherMatrix fisher_mc(const CholeskyModel& model, const ProjectorSet& set,
                                     int n_samples, Sampling sampling, std::uint64_t seed,
                                     unsigned threads = 0);

/// Score of the Poisson model; identical to log_likelihood_gradient.
[[nodiscard]] VectorXd score(const CholeskyModel& model, const CountVector& counts,
                             const ProjectorSet& set);

/// Minimum-norm solution L of d_rho = (L rho + rho L) / 2.
///
/// Throws InconsistentDirectionError when the reconstruction residual
/// exceeds 1e-8.
[[nodiscard]] Matrix4c sld(const DensityMatrix& rho, const Matrix4c& drho);

/// J_ij = Tr[rho (L_i L_j + L_j L_i)] / 2.
[[nodiscard]] SldFisherMatrix sld_fisher(const CholeskyModel& model);

[[nodiscard]] BoundReport bound_coefficient(const CholeskyModel& model, const ProjectorSet& set,
                                            CompletenessPolicy policy = CompletenessPolicy::require);

/// dtheta^T J_SLD dtheta / 4, the local approximation of the squared Bures
/// distance between rho(theta) and rho(theta + dtheta).
[[nodiscard]] double bures_quadratic_form(const CholeskyModel& model, const VectorXd& delta_theta);

}  // namespace qse
