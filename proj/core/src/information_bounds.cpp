#include "qse/information_bounds.hpp"

#include "qse/errors.hpp"
#include "qse/estimation.hpp"
#include "qse/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace qse {

namespace {

constexpr double kSldResidualTol = 1e-8;
constexpr double kZeroMean = 1e-9;
constexpr int kMcBlock = 1000;

Vector16d draw_counts(const Vector16d& mean, Sampling sampling, std::mt19937_64& rng) {
  Vector16d n;
  for (int nu = 0; nu < 16; ++nu) {
    const double m = mean(nu);
    if (!(m > 0.0)) {
      n(nu) = 0.0;
    } else if (sampling == Sampling::poisson) {
      n(nu) = static_cast<double>(std::poisson_distribution<long long>(m)(rng));
    } else {
      const double x = std::normal_distribution<double>(m, std::sqrt(m))(rng);
      n(nu) = std::max(0.0, std::round(x));
    }
  }
  return n;
}

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

std::vector<Matrix4c> density_gradient(const CholeskyModel& model) {
  const double lam = model.lambda();
  if (!(lam > 0.0)) throw DegenerateInputError("all-zero Cholesky parameter vector");
  const Matrix4c t = model.triangular();
  const Matrix4c rho = t * t.adjoint() / lam;
  std::vector<Matrix4c> out;
  out.reserve(static_cast<std::size_t>(model.size()));
  for (int i = 0; i < model.size(); ++i) {
    const Matrix4c dt = model.triangular_derivative(i);
    const Matrix4c dg = dt * t.adjoint() + t * dt.adjoint();
    out.push_back(dg / lam - rho * (dg.trace().real() / lam));
  }
  return out;
}

MatrixXd mean_count_jacobian(const CholeskyModel& model, const ProjectorSet& set) {
  const Matrix4c t = model.triangular();
  MatrixXd d(16, model.size());
  for (int i = 0; i < model.size(); ++i) {
    const Matrix4c dt = model.triangular_derivative(i);
    const Matrix4c dg = dt * t.adjoint() + t * dt.adjoint();
    for (int nu = 0; nu < 16; ++nu) d(nu, i) = (set.op(nu) * dg).trace().real();
  }
  return d;
}

FisherMatrix fisher_analytic(const CholeskyModel& model, const ProjectorSet& set) {
  const Vector16d m = mean_counts(model, set);
  const MatrixXd d = mean_count_jacobian(model, set);
  const double dscale = std::max(1.0, d.cwiseAbs().maxCoeff());
  MatrixXd j = MatrixXd::Zero(model.size(), model.size());
  for (int nu = 0; nu < 16; ++nu) {
    if (m(nu) <= kZeroMean) {
      if (d.row(nu).cwiseAbs().maxCoeff() > 1e-9 * dscale) {
        throw UnboundedInformationError("channel " + std::to_string(nu) +
                                        " has zero mean but nonzero derivative");
      }
      continue;
    }
    j += d.row(nu).transpose() * d.row(nu) / m(nu);
  }
  return {symmetrized(j), model.rank(), model.params(), model.lambda()};
}

FisherMatrix fisher_mc(const CholeskyModel& model, const ProjectorSet& set, int n_samples,
                       Sampling sampling, std::uint64_t seed, unsigned threads) {
  if (n_samples < 100) throw ConfigError("fisher_mc needs at least 100 samples");
  const Vector16d mean = mean_counts(model, set);
  const int k = model.size();
  const int blocks = (n_samples + kMcBlock - 1) / kMcBlock;
  std::vector<MatrixXd> partial(static_cast<std::size_t>(blocks), MatrixXd::Zero(k, k));

  auto run_block = [&](int b) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    const int begin = b * kMcBlock;
    const int end = std::min(n_samples, begin + kMcBlock);
    MatrixXd acc = MatrixXd::Zero(k, k);
    for (int s = begin; s < end; ++s) {
      const Vector16d n = draw_counts(mean, sampling, rng);
      const VectorXd g = log_likelihood_gradient(model, n, set);
      acc.noalias() += g * g.transpose();
    }
    partial[static_cast<std::size_t>(b)] = std::move(acc);
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(blocks));
  if (workers <= 1) {
    for (int b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int b = static_cast<int>(w); b < blocks; b += static_cast<int>(workers)) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  MatrixXd j = MatrixXd::Zero(k, k);
  for (const auto& p : partial) j += p;
  j /= static_cast<double>(n_samples);
  return {symmetrized(j), model.rank(), model.params(), model.lambda()};
}

VectorXd score(const CholeskyModel& model, const CountVector& counts, const ProjectorSet& set) {
  return log_likelihood_gradient(model, counts, set);
}

Matrix4c sld(const DensityMatrix& rho, const Matrix4c& drho) {
  if (!is_hermitian(drho, 1e-10)) throw InvariantViolation("sld: derivative is not Hermitian");
  // In the eigenbasis of rho, (p_i + p_j)/2 L_ij = D_ij; pairs with
  // p_i + p_j ~ 0 get the pseudo-inverse.
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
  const Eigen::Vector4d p = es.eigenvalues();
  const Matrix4c& u = es.eigenvectors();
  const Matrix4c d = u.adjoint() * drho * u;
  const double cut = kPinvRelTol * p.cwiseAbs().maxCoeff();
  Matrix4c lt = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double s = 0.5 * (p(i) + p(j));
      if (s > cut) lt(i, j) = d(i, j) / s;
    }
  lt = 0.5 * (lt + lt.adjoint());
  // Residual measured in the eigenbasis, where the map is diagonal.
  Matrix4c rec;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rec(i, j) = 0.5 * (p(i) + p(j)) * lt(i, j);
  const double residual = (rec - d).norm();
  if (!(residual <= kSldResidualTol)) {
    std::ostringstream msg;
    msg << "sld: residual " << residual << " exceeds tolerance";
    throw InconsistentDirectionError(msg.str());
  }
  Matrix4c l = u * lt * u.adjoint();
  return 0.5 * (l + l.adjoint());
}

SldFisherMatrix sld_fisher(const CholeskyModel& model) {
  const DensityMatrix rho = density_from_cholesky(model);
  const std::vector<Matrix4c> drho = density_gradient(model);
  std::vector<Matrix4c> l;
  l.reserve(drho.size());
  for (const auto& d : drho) l.push_back(sld(rho, d));
  const int k = model.size();
  MatrixXd j(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      const std::size_t ia = static_cast<std::size_t>(a);
      const std::size_t ib = static_cast<std::size_t>(b);
      const double v = (rho.matrix() * l[ia] * l[ib]).trace().real();
      j(a, b) = v;
      j(b, a) = v;
    }
  return {j, model.rank(), model.params()};
}

BoundReport bound_coefficient(const CholeskyModel& model, const ProjectorSet& set,
                              CompletenessPolicy policy) {
  if (!set.complete() && policy == CompletenessPolicy::require) {
    throw IncompleteMeasurementError("bound_coefficient: projector set '" + set.name() +
                                     "' is not tomographically complete");
  }
  const CholeskyModel unit = model.with_lambda(1.0);
  const SldFisherMatrix js = sld_fisher(unit);
  const FisherMatrix jbar = fisher_analytic(unit, set);
  BoundReport r;
  r.coefficient = (js.entries * pinv(jbar.entries)).trace() / 8.0;
  r.rank_model = model.rank();
  r.set_name = set.name();
  r.theta = unit.params();
  r.complete_set = set.complete();
  if (!(r.coefficient > 0.0) || !std::isfinite(r.coefficient)) {
    throw InvariantViolation("bound coefficient is not positive");
  }
  return r;
}

double bures_quadratic_form(const CholeskyModel& model, const VectorXd& delta_theta) {
  if (delta_theta.size() != model.size()) throw ConfigError("delta_theta has the wrong length");
  const SldFisherMatrix j = sld_fisher(model);
  return 0.25 * delta_theta.dot(j.entries * delta_theta);
}

}  // namespace qse
