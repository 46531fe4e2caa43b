#pragma once

#include "qse/quantum_core.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qse {

using Matrix16d = Eigen::Matrix<double, 16, 16>;

/// 16 coincidence counts, ordered to match a ProjectorSet.
struct CountVector {
  std::array<std::int64_t, 16> n{};

  [[nodiscard]] double total() const;
  [[nodiscard]] Vector16d as_vector() const;
  bool operator==(const CountVector&) const = default;
};

/// 16 positive-semidefinite measurement operators and their B matrix.
///
/// Operators need not be rank-1 projectors; weighted rank-2 operators such
/// as |H><H| (x) I/2 are stored as-is.
class ProjectorSet {
 public:
  ProjectorSet(std::string name, std::vector<Matrix4c> operators);

  /// Builds rank-1 projectors |k><k| from unit kets (norm checked to 1e-12).
  [[nodiscard]] static ProjectorSet from_kets(std::string name, const std::vector<Vector4c>& kets);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<Matrix4c>& operators() const noexcept { return ops_; }
  [[nodiscard]] const Matrix4c& op(int nu) const { return ops_.at(static_cast<std::size_t>(nu)); }
  [[nodiscard]] const Matrix16d& b_matrix() const noexcept { return b_; }
  [[nodiscard]] bool complete() const noexcept { return complete_; }
  [[nodiscard]] double condition_number() const noexcept { return cond_; }

 private:
  std::string name_;
  std::vector<Matrix4c> ops_;
  Matrix16d b_;
  bool complete_ = false;
  double cond_ = 0.0;
};

/// Product projectors with first qubit in {H,V,D,R} and second in
/// {H,V,D,L}, row-major: HH HV HD HL / VH VV VD VL / DH DV DD DL / RH RV RD RL.
[[nodiscard]] const ProjectorSet& local_projector_set();

/// Ten Bell-type projectors followed by the six single-qubit operators
/// H(x)I/2, I/2(x)H, D(x)I/2, I/2(x)D, R(x)I/2, I/2(x)R.
///
/// As listed, the ten superposition projectors contain two linear
/// dependencies, so this set is not tomographically complete (B has rank 14).
[[nodiscard]] const ProjectorSet& inseparable_projector_set();

/// Looks up "local" or "inseparable".
[[nodiscard]] const ProjectorSet& projector_set_by_name(const std::string& name);

/// B_{nu,mu} = Tr[M_nu Gamma_mu].
[[nodiscard]] Matrix16d b_matrix(const std::vector<Matrix4c>& operators);

struct Completeness {
  bool complete;
  /// sigma_max / sigma_min of B (infinity when B is singular).
  double condition_number;
};

/// Complete iff the smallest singular value of B exceeds 1e-10 times the largest.
[[nodiscard]] Completeness completeness_check(const ProjectorSet& set);

/// M_nu = Tr[M_nu T T^dagger]. Throws DegenerateInputError for all-zero theta.
[[nodiscard]] Vector16d mean_counts(const CholeskyModel& model, const ProjectorSet& set);
/// M_nu = lambda Tr[M_nu rho].
[[nodiscard]] Vector16d mean_counts(const DensityMatrix& rho, double lambda, const ProjectorSet& set);

struct LinearEstimate {
  PauliCoefficients phi;
  double lambda_hat;
};

/// Solves n = B (lambda phi) and splits off lambda through phi^0 = 1.
///
/// Throws IncompleteMeasurementError for an incomplete set and
/// InversionFailure when the recovered lambda is not positive.
[[nodiscard]] LinearEstimate linear_tomography(const Vector16d& counts, const ProjectorSet& set);
[[nodiscard]] LinearEstimate linear_tomography(const CountVector& counts, const ProjectorSet& set);

/// Minimum-norm least-squares variant of linear_tomography that also accepts
/// incomplete sets (unmeasured directions come back as zero). Used to seed
/// the likelihood maximization.
[[nodiscard]] LinearEstimate least_squares_tomography(const Vector16d& counts, const ProjectorSet& set);

/// The laboratory acquisition order used for the published count lists:
/// HH HV VH VV HD HL DH RH VD VL DV RV DD RL RD DL. Entry i is the row-major
/// local-set index of the i-th acquired count.
[[nodiscard]] const std::array<int, 16>& published_acquisition_order();

/// Reorders counts given in acquisition order into row-major local order.
[[nodiscard]] CountVector from_acquisition_order(const CountVector& acquired);

}  // namespace qse
