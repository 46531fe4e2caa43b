#include "qse/estimation.hpp"

#include "qse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qse {

namespace {

struct Evaluation {
  double log_likelihood;
  VectorXd gradient;
};

// logL and its gradient in one pass. The gradient with respect to the entry
// u * e_r e_c^T of T is 2 Re[u (T^dagger W)(c, r)] with
// W = sum_nu (n_nu / M_nu - 1) E_nu.
Evaluation evaluate(const VectorXd& theta, int rank, const Vector16d& n, const ProjectorSet& set,
                    bool want_gradient) {
  const CholeskyModel model(rank, theta);
  const Matrix4c t = model.triangular();
  const Matrix4c g = t * t.adjoint();
  double ll = 0.0;
  Matrix4c w = Matrix4c::Zero();
  for (int nu = 0; nu < 16; ++nu) {
    const Matrix4c& e = set.op(nu);
    const double m_raw = (e * g).trace().real();
    const double m = std::max(m_raw, kMeanFloor);
    ll += -m - std::lgamma(n(nu) + 1.0);
    if (n(nu) > 0.0) ll += n(nu) * std::log(m);
    if (want_gradient) {
      const double dll_dm = (m_raw > kMeanFloor ? n(nu) / m_raw : 0.0) - 1.0;
      w += dll_dm * e;
    }
  }
  Evaluation out{ll, VectorXd()};
  if (want_gradient) {
    const Matrix4c p = t.adjoint() * w;
    out.gradient.resize(theta.size());
    for (int i = 0; i < theta.size(); ++i) {
      const Slot s = cholesky_slot(i);
      const Complex v = p(s.col, s.row);
      out.gradient(i) = 2.0 * (s.imaginary ? -v.imag() : v.real());
    }
  }
  return out;
}

void check_counts(const Vector16d& n) {
  for (int i = 0; i < 16; ++i) {
    if (!(n(i) >= 0.0) || !std::isfinite(n(i))) {
      throw ConfigError("counts must be finite and nonnegative");
    }
  }
}

EstimationResult make_result(int rank, const VectorXd& theta, double ll, bool converged, int iterations) {
  EstimationResult r;
  const CholeskyModel model = CholeskyModel(rank, theta).canonical();
  r.rank = rank;
  r.theta_hat = model.params();
  r.log_likelihood = ll;
  r.aic = aic(ll, rank);
  r.rho_hat = density_from_cholesky(model);
  r.lambda_hat = model.lambda();
  r.converged = converged;
  r.iterations = iterations;
  return r;
}

// Deterministic start: least-squares linear inversion, clipped onto the
// state space and mixed with a little I/4 so no Cholesky column is exactly
// zero (zero columns are stationary points of the likelihood).
VectorXd tomographic_start(int rank, const Vector16d& n, const ProjectorSet& set) {
  const double total = n.sum();
  double lambda = 0.0;
  Matrix4c rho = Matrix4c::Identity() / 4.0;
  try {
    const LinearEstimate lin = least_squares_tomography(n, set);
    lambda = lin.lambda_hat;
    rho = clip_to_state(density_from_pauli(lin.phi)).matrix();
  } catch (const Error&) {
    lambda = 0.0;
  }
  if (!(lambda > 0.0)) {
    // Fall back to I/4 at the scale whose total mean matches the total count.
    const double per_unit = mean_counts(DensityMatrix::maximally_mixed(), 1.0, set).sum();
    lambda = total / per_unit;
  }
  constexpr double kMix = 1e-3;
  rho = (1.0 - kMix) * rho + kMix * Matrix4c::Identity() / 4.0;
  return model_from_density(DensityMatrix(rho), rank, lambda).params();
}

struct Fit {
  VectorXd theta;
  double ll;
  bool converged;
  int iterations;
};

Fit run_fit(int rank, const VectorXd& start, const Vector16d& n, const ProjectorSet& set,
            const MleOptions& options) {
  const double scale = std::max(1.0, n.sum());
  MinimizeOptions mo = options.minimizer;
  if (!mo.scaled_gradient) {
    mo.scaled_gradient = [scale](const VectorXd& x, const VectorXd& g) {
      return g.cwiseAbs().maxCoeff() * std::max(1.0, x.norm()) / scale;
    };
  }
  auto objective = [&](const VectorXd& x, VectorXd& grad) {
    if (!(x.squaredNorm() > 0.0)) {
      grad = VectorXd::Zero(x.size());
      return std::numeric_limits<double>::infinity();
    }
    Evaluation e = evaluate(x, rank, n, set, true);
    grad = -e.gradient;
    return -e.log_likelihood;
  };
  const MinimizeResult r = minimize(objective, start, mo);
  return {r.x, -r.value, r.converged, r.iterations};
}

std::vector<VectorXd> jittered(const VectorXd& base, int count, double jitter, std::uint64_t seed) {
  std::vector<VectorXd> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = jitter * base.norm() / std::sqrt(static_cast<double>(base.size()));
  for (int i = 0; i < count; ++i) {
    VectorXd x = base;
    for (int j = 0; j < x.size(); ++j) x(j) += s * normal(rng);
    out.push_back(std::move(x));
  }
  return out;
}

std::uint64_t rank_seed(std::uint64_t seed, int rank) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(rank));
}

EstimationResult best_of(int rank, const std::vector<VectorXd>& starts, const Vector16d& n,
                         const ProjectorSet& set, const MleOptions& options) {
  std::optional<Fit> best;
  int iterations = 0;
  for (const auto& s : starts) {
    Fit f = run_fit(rank, s, n, set, options);
    iterations += f.iterations;
    if (!best || f.ll > best->ll) best = std::move(f);
  }
  return make_result(rank, best->theta, best->ll, best->converged, iterations);
}

}  // namespace

double log_likelihood(const CholeskyModel& model, const Vector16d& counts, const ProjectorSet& set) {
  if (!(model.lambda() > 0.0)) throw DegenerateInputError("all-zero Cholesky parameter vector");
  return evaluate(model.params(), model.rank(), counts, set, false).log_likelihood;
}

double log_likelihood(const CholeskyModel& model, const CountVector& counts, const ProjectorSet& set) {
  return log_likelihood(model, counts.as_vector(), set);
}

VectorXd log_likelihood_gradient(const CholeskyModel& model, const Vector16d& counts,
                                 const ProjectorSet& set) {
  if (!(model.lambda() > 0.0)) throw DegenerateInputError("all-zero Cholesky parameter vector");
  return evaluate(model.params(), model.rank(), counts, set, true).gradient;
}

VectorXd log_likelihood_gradient(const CholeskyModel& model, const CountVector& counts,
                                 const ProjectorSet& set) {
  return log_likelihood_gradient(model, counts.as_vector(), set);
}

double aic(double log_likelihood, int rank) {
  return -2.0 * log_likelihood + 2.0 * CholeskyModel::param_count(rank);
}

EstimationResult mle(int rank, const CountVector& counts, const ProjectorSet& set,
                     const std::optional<VectorXd>& init, const MleOptions& options) {
  const Vector16d n = counts.as_vector();
  check_counts(n);
  if (!(n.sum() > 0.0)) throw DegenerateInputError("all counts are zero");
  VectorXd x0;
  if (init) {
    x0 = *init;
    (void)CholeskyModel(rank, x0);  // validates length
  } else {
    x0 = tomographic_start(rank, n, set);
  }
  std::vector<VectorXd> starts{x0};
  for (auto& s : jittered(x0, options.restarts, options.jitter, rank_seed(options.seed, rank)))
    starts.push_back(std::move(s));
  return best_of(rank, starts, n, set, options);
}

MaiceResult maice(const CountVector& counts, const ProjectorSet& set, const MleOptions& options) {
  const Vector16d n = counts.as_vector();
  check_counts(n);
  if (!(n.sum() > 0.0)) throw DegenerateInputError("all counts are zero");

  MaiceResult out;
  for (int rank = 1; rank <= 4; ++rank) {
    const VectorXd x0 = tomographic_start(rank, n, set);
    std::vector<VectorXd> starts{x0};
    for (auto& s : jittered(x0, options.restarts, options.jitter, rank_seed(options.seed, rank)))
      starts.push_back(std::move(s));

    std::optional<VectorXd> embedded;
    if (rank > 1) {
      const EstimationResult& prev = out.all.back();
      const int k = CholeskyModel::param_count(rank);
      VectorXd e = VectorXd::Zero(k);
      e.head(prev.theta_hat.size()) = prev.theta_hat;
      embedded = e;
      // Warm start: the previous optimum with a small random new column.
      std::mt19937_64 rng(rank_seed(options.seed, rank + 16));
      std::normal_distribution<double> normal(0.0, 1.0);
      const double s = 0.1 * std::sqrt(prev.lambda_hat / 4.0);
      for (Eigen::Index j = prev.theta_hat.size(); j < k; ++j) e(j) = s * normal(rng);
      starts.push_back(std::move(e));
    }

    EstimationResult fit = best_of(rank, starts, n, set, options);
    if (embedded) {
      const CholeskyModel em(rank, *embedded);
      const double ll = log_likelihood(em, n, set);
      if (ll > fit.log_likelihood) {
        // The smaller model's optimum is a stationary point of this model too.
        fit = make_result(rank, *embedded, ll, out.all.back().converged, fit.iterations);
      }
    }
    out.all.push_back(std::move(fit));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.all.size(); ++i)
    if (out.all[i].aic < out.all[best].aic) best = i;
  out.best = out.all[best];
  return out;
}

double kl_divergence(const Vector16d& mean0, const Vector16d& mean1) {
  double d = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double a = mean0(i);
    const double b = mean1(i);
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("kl_divergence needs positive means");
    d += a * std::log(a / b) - a + b;
  }
  return std::max(d, 0.0);
}

}  // namespace qse
