#pragma once

#include "qse/optimizer.hpp"
#include "qse/quantum_core.hpp"
#include "qse/tomography.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qse {

/// Floor applied to Poisson means before taking logarithms.
inline constexpr double kMeanFloor = 1e-12;

/// sum_nu [ -M_nu + n_nu ln M_nu - ln Gamma(n_nu + 1) ].
[[nodiscard]] double log_likelihood(const CholeskyModel& model, const CountVector& counts,
                                    const ProjectorSet& set);
[[nodiscard]] double log_likelihood(const CholeskyModel& model, const Vector16d& counts,
                                    const ProjectorSet& set);

/// Analytic gradient of log_likelihood with respect to theta.
[[nodiscard]] VectorXd log_likelihood_gradient(const CholeskyModel& model, const CountVector& counts,
                                               const ProjectorSet& set);
[[nodiscard]] VectorXd log_likelihood_gradient(const CholeskyModel& model, const Vector16d& counts,
                                               const ProjectorSet& set);

/// -2 logL + 2k, k being the parameter count of `rank`.
[[nodiscard]] double aic(double log_likelihood, int rank);

struct EstimationResult {
  int rank = 0;
  VectorXd theta_hat;
  double log_likelihood = 0.0;
  double aic = 0.0;
  DensityMatrix rho_hat = DensityMatrix::maximally_mixed();
  double lambda_hat = 0.0;
  bool converged = false;
  int iterations = 0;

  [[nodiscard]] int parameter_count() const { return CholeskyModel::param_count(rank); }
  [[nodiscard]] CholeskyModel model() const { return CholeskyModel(rank, theta_hat); }
};

struct MleOptions {
  /// Seeded random restarts in addition to the deterministic start.
  int restarts = 4;
  /// Restart perturbation, relative to sqrt(lambda / k) per coordinate.
  double jitter = 1.0;
  std::uint64_t seed = 0x5eedULL;
  MinimizeOptions minimizer{};
};

/// Maximum-likelihood estimate within the rank-`rank` model.
///
/// Without `init`, the deterministic start is the linear-tomography estimate
/// clipped to the state space; `options.restarts` jittered copies follow
/// and the highest likelihood wins.
/// `converged` reports whether the winning run met the gradient test.
[[nodiscard]] EstimationResult mle(int rank, const CountVector& counts, const ProjectorSet& set,
                                   const std::optional<VectorXd>& init = std::nullopt,
                                   const MleOptions& options = {});

struct MaiceResult {
  EstimationResult best;
  /// Fits for rank 1, 2, 3, 4 in that order.
  std::vector<EstimationResult> all;

  [[nodiscard]] const EstimationResult& by_rank(int rank) const {
    return all.at(static_cast<std::size_t>(rank - 1));
  }
};

/// Fits every rank model and returns the minimum-AIC one; exact ties go to
/// the smaller model. Rank k+1 is additionally started from the rank-k
/// optimum, and the embedded rank-k optimum itself is a candidate, so the
/// maximized likelihoods are nondecreasing in rank.
[[nodiscard]] MaiceResult maice(const CountVector& counts, const ProjectorSet& set,
                                const MleOptions& options = {});

/// Kullback-Leibler divergence between two products of Poisson laws.
[[nodiscard]] double kl_divergence(const Vector16d& mean0, const Vector16d& mean1);

}  // namespace qse
