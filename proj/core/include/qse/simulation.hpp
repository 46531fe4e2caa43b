#pragma once

#include "qse/estimation.hpp"
#include "qse/information_bounds.hpp"
#include "qse/tomography.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qse {

enum class Estimator { mle16, maice };

[[nodiscard]] Estimator estimator_from_name(const std::string& name);
[[nodiscard]] std::string estimator_name(Estimator e);

/// Analog states: "mixed" is I/4, "product" is (1-eps)|HV><HV| + eps I/4 and
/// "bell" is (1-eps)|Phi+><Phi+| + eps I/4.
[[nodiscard]] DensityMatrix preset_state(const std::string& name, double epsilon);
/// 0 for "mixed", 0.05 for the pure presets.
[[nodiscard]] double default_epsilon(const std::string& name);

struct SimulationConfig {
  /// Preset name; ignored when `explicit_state` is set.
  std::string true_state = "mixed";
  std::optional<DensityMatrix> explicit_state;
  /// Count rate; the total scale of each point is rate * time.
  double rate = 500.0;
  std::vector<double> acquisition_times{0.2, 0.5, 1.0, 2.0, 5.0};
  int trials = 200;
  Estimator estimator = Estimator::maice;
  std::string basis = "local";
  std::uint64_t seed = 1;
  /// Preset regularization; the preset default applies when unset.
  std::optional<double> epsilon;
  /// Rank of the coordinates used for the bound. Defaults to 4 for mle16
  /// and to the numerical rank of the true state for maice.
  std::optional<int> bound_rank;
  /// Worker threads for trials; 0 uses the hardware concurrency.
  unsigned threads = 0;
  /// Keep per-trial records in the result.
  bool keep_trials = false;
  MleOptions mle{};

  void validate() const;
  [[nodiscard]] DensityMatrix resolve_state() const;
  [[nodiscard]] double resolved_epsilon() const;
};

struct TrialRecord {
  int trial_index = 0;
  CountVector counts;
  std::optional<EstimationResult> result;
  double fidelity_to_true = 0.0;
  double bures_sq_to_true = 0.0;
  /// Empty on success.
  std::string error;
};

struct SweepPoint {
  double lambda = 0.0;
  double mean_fidelity = 0.0;
  double mean_infidelity = 0.0;
  double mean_bures_sq = 0.0;
  double std_bures_sq = 0.0;
  /// Trace of the sample covariance of the estimated parameters, over the
  /// trials whose selected rank equals the bound rank.
  double cov_trace = 0.0;
  int cov_samples = 0;
  /// 2C / lambda.
  double bound = 0.0;
  int trials = 0;
  int failures = 0;
  int not_converged = 0;
  /// Trials whose selected rank equals the rank of the true state.
  int rank_matches = 0;
  std::vector<TrialRecord> records;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // ascending lambda
  BoundReport bound;
  /// Rank-k coordinates of the true state at unit scale used for the bound.
  CholeskyModel truth = CholeskyModel(4, VectorXd::Unit(16, 0));
};

/// Independent Poisson counts with means lambda Tr[M_nu rho].
[[nodiscard]] CountVector sample_counts(const DensityMatrix& rho, const ProjectorSet& set, double lambda,
                                        std::mt19937_64& rng);

/// Unit-scale coordinates of `rho` in its numerical-rank model.
[[nodiscard]] CholeskyModel truth_coordinates(const DensityMatrix& rho, std::optional<int> rank = std::nullopt);

/// Monte Carlo sweep over lambda = rate * t. Trial i of point p uses the seed
/// derive_seed(derive_seed(seed, p), i), so results do not depend on thread
/// count or scheduling. Failed trials are excluded and counted; more than 5%
/// failures at any point throws SweepFailure.
[[nodiscard]] SweepResult run_sweep(const SimulationConfig& config);

struct BasisComparison {
  SweepResult local;
  SweepResult inseparable;
  BoundReport local_bound;
  BoundReport inseparable_bound;
};

/// Same sweep and bound under both built-in sets, with a shared seed and the
/// same rank-4 coordinates of the true state.
[[nodiscard]] BasisComparison compare_bases(const SimulationConfig& config);

/// Real parts of nine estimates as a 3x3 grid of 4x4 blocks, row-major.
[[nodiscard]] MatrixXd tile_estimates(const std::vector<DensityMatrix>& estimates);

}  // namespace qse
