#include "qse/tomography.hpp"

#include "qse/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace qse {

namespace {

constexpr double kCompletenessTol = 1e-10;

Completeness analyze(const Matrix16d& b) {
  Eigen::JacobiSVD<Matrix16d> svd(b);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(15);
  const bool complete = smin > kCompletenessTol * smax;
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return {complete, cond};
}

Matrix4c projector(const Vector4c& k) { return k * k.adjoint(); }

Matrix4c bell_projector(const char* a, double sign, const char* b) {
  const Vector4c k = (kets::product(a) + sign * kets::product(b)) / std::sqrt(2.0);
  return projector(k);
}

Matrix4c half_identity_kron(const Eigen::Vector2cd& k, bool first) {
  const Eigen::Matrix2cd p = k * k.adjoint();
  const Eigen::Matrix2cd half = 0.5 * Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd& a = first ? p : half;
  const Eigen::Matrix2cd& b = first ? half : p;
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

LinearEstimate split_lambda(const Vector16d& lambda_phi) {
  const double lam = lambda_phi(0);
  if (!(lam > 0.0) || !std::isfinite(lam)) {
    throw InversionFailure("linear tomography: recovered lambda " + std::to_string(lam) +
                           " is not positive");
  }
  LinearEstimate out;
  out.phi.phi = lambda_phi / lam;
  out.phi.phi(0) = 1.0;
  out.lambda_hat = lam;
  return out;
}

}  // namespace

double CountVector::total() const {
  double s = 0.0;
  for (auto v : n) s += static_cast<double>(v);
  return s;
}

Vector16d CountVector::as_vector() const {
  Vector16d v;
  for (int i = 0; i < 16; ++i) v(i) = static_cast<double>(n[static_cast<std::size_t>(i)]);
  return v;
}

ProjectorSet::ProjectorSet(std::string name, std::vector<Matrix4c> operators)
    : name_(std::move(name)), ops_(std::move(operators)) {
  if (ops_.size() != 16) {
    throw ConfigError("a projector set needs 16 operators, got " + std::to_string(ops_.size()));
  }
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (!is_hermitian(ops_[i], 1e-12)) {
      throw InvariantViolation("measurement operator " + std::to_string(i) + " is not Hermitian");
    }
    if (hermitian_eigenvalues(ops_[i])(0) < kEigenClip) {
      throw InvariantViolation("measurement operator " + std::to_string(i) + " is not PSD");
    }
  }
  b_ = qse::b_matrix(ops_);
  const Completeness c = analyze(b_);
  complete_ = c.complete;
  cond_ = c.condition_number;
}

ProjectorSet ProjectorSet::from_kets(std::string name, const std::vector<Vector4c>& kets) {
  std::vector<Matrix4c> ops;
  ops.reserve(kets.size());
  for (std::size_t i = 0; i < kets.size(); ++i) {
    if (std::abs(kets[i].norm() - 1.0) > 1e-12) {
      throw InvariantViolation("ket " + std::to_string(i) + " is not normalized");
    }
    ops.push_back(projector(kets[i]));
  }
  return ProjectorSet(std::move(name), std::move(ops));
}

const ProjectorSet& local_projector_set() {
  static const ProjectorSet set = [] {
    std::vector<Vector4c> k;
    for (char a : {'H', 'V', 'D', 'R'})
      for (char b : {'H', 'V', 'D', 'L'}) k.push_back(kets::product(kets::by_label(a), kets::by_label(b)));
    return ProjectorSet::from_kets("local", k);
  }();
  return set;
}

const ProjectorSet& inseparable_projector_set() {
  static const ProjectorSet set = [] {
    std::vector<Matrix4c> ops{
        bell_projector("HH", +1, "VV"), bell_projector("HH", -1, "VV"),
        bell_projector("HV", +1, "VH"), bell_projector("HV", -1, "VH"),
        bell_projector("HD", +1, "VX"), bell_projector("HD", -1, "VX"),
        bell_projector("HX", +1, "VD"), bell_projector("HR", +1, "VL"),
        bell_projector("HR", -1, "VL"), bell_projector("HL", +1, "VR"),
    };
    for (char l : {'H', 'D', 'R'}) {
      ops.push_back(half_identity_kron(kets::by_label(l), true));
      ops.push_back(half_identity_kron(kets::by_label(l), false));
    }
    return ProjectorSet("inseparable", std::move(ops));
  }();
  return set;
}

const ProjectorSet& projector_set_by_name(const std::string& name) {
  if (name == "local") return local_projector_set();
  if (name == "inseparable") return inseparable_projector_set();
  throw ConfigError("unknown basis '" + name + "' (expected local or inseparable)");
}

Matrix16d b_matrix(const std::vector<Matrix4c>& operators) {
  const auto& g = pauli_basis();
  Matrix16d b;
  for (int nu = 0; nu < 16; ++nu)
    for (int mu = 0; mu < 16; ++mu)
      b(nu, mu) = (operators[static_cast<std::size_t>(nu)] * g[static_cast<std::size_t>(mu)]).trace().real();
  return b;
}

Completeness completeness_check(const ProjectorSet& set) {
  return {set.complete(), set.condition_number()};
}

Vector16d mean_counts(const CholeskyModel& model, const ProjectorSet& set) {
  if (!(model.lambda() > 0.0)) throw DegenerateInputError("all-zero Cholesky parameter vector");
  const Matrix4c g = model.scaled_density();
  Vector16d m;
  for (int nu = 0; nu < 16; ++nu) m(nu) = std::max(0.0, (set.op(nu) * g).trace().real());
  return m;
}

Vector16d mean_counts(const DensityMatrix& rho, double lambda, const ProjectorSet& set) {
  Vector16d m;
  for (int nu = 0; nu < 16; ++nu)
    m(nu) = std::max(0.0, lambda * (set.op(nu) * rho.matrix()).trace().real());
  return m;
}

LinearEstimate linear_tomography(const Vector16d& counts, const ProjectorSet& set) {
  if (!set.complete()) {
    throw IncompleteMeasurementError("linear tomography needs a complete set; '" + set.name() +
                                     "' has condition number " +
                                     std::to_string(set.condition_number()));
  }
  const Vector16d lambda_phi = set.b_matrix().fullPivLu().solve(counts);
  return split_lambda(lambda_phi);
}

LinearEstimate linear_tomography(const CountVector& counts, const ProjectorSet& set) {
  return linear_tomography(counts.as_vector(), set);
}

LinearEstimate least_squares_tomography(const Vector16d& counts, const ProjectorSet& set) {
  const MatrixXd bp = pinv(MatrixXd(set.b_matrix()));
  const Vector16d lambda_phi = bp * counts;
  return split_lambda(lambda_phi);
}

const std::array<int, 16>& published_acquisition_order() {
  static const std::array<int, 16> order{0, 1, 4, 5, 2, 3, 8, 12, 6, 7, 9, 13, 10, 15, 14, 11};
  return order;
}

CountVector from_acquisition_order(const CountVector& acquired) {
  CountVector out;
  const auto& order = published_acquisition_order();
  for (std::size_t i = 0; i < 16; ++i) out.n[static_cast<std::size_t>(order[i])] = acquired.n[i];
  return out;
}

}  // namespace qse
