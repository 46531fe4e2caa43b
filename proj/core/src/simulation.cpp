#include "qse/simulation.hpp"

#include "qse/errors.hpp"
#include "qse/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qse {

namespace {

constexpr double kMaxFailureFraction = 0.05;

struct TrialOutcome {
  TrialRecord record;
  std::optional<VectorXd> theta;  // set when the selected rank matches the bound rank
  int selected_rank = 0;
  bool converged = false;
};

TrialOutcome run_trial(const SimulationConfig& config, const DensityMatrix& truth, const ProjectorSet& set,
                       double lambda, int bound_rank, int index, std::uint64_t seed) {
  TrialOutcome out;
  out.record.trial_index = index;
  std::mt19937_64 rng(seed);
  out.record.counts = sample_counts(truth, set, lambda, rng);
  MleOptions opts = config.mle;
  opts.seed = derive_seed(seed, 0xE57ULL);
  try {
    EstimationResult r = config.estimator == Estimator::mle16
                             ? mle(4, out.record.counts, set, std::nullopt, opts)
                             : maice(out.record.counts, set, opts).best;
    const double f = fidelity(truth, r.rho_hat);
    if (!std::isfinite(f)) throw InvariantViolation("non-finite fidelity");
    out.record.fidelity_to_true = f;
    out.record.bures_sq_to_true = 2.0 * (1.0 - f);
    out.selected_rank = r.rank;
    out.converged = r.converged;
    if (r.rank == bound_rank) out.theta = r.theta_hat;
    out.record.result = std::move(r);
  } catch (const Error& e) {
    out.record.error = e.what();
  }
  return out;
}

template <typename Fn>
void parallel_for(int n, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(n, 1)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

SweepPoint aggregate(std::vector<TrialOutcome>& outcomes, double lambda, int truth_rank,
                     const BoundReport& bound, bool keep) {
  SweepPoint p;
  p.lambda = lambda;
  p.trials = static_cast<int>(outcomes.size());
  p.bound = bound.bures_sq_bound(lambda);
  std::vector<double> d2;
  std::vector<VectorXd> thetas;
  double sum_f = 0.0;
  for (auto& o : outcomes) {
    if (!o.record.error.empty()) {
      ++p.failures;
      continue;
    }
    if (!o.converged) ++p.not_converged;
    if (o.selected_rank == truth_rank) ++p.rank_matches;
    sum_f += o.record.fidelity_to_true;
    d2.push_back(o.record.bures_sq_to_true);
    if (o.theta) thetas.push_back(*o.theta);
  }
  const auto ok = static_cast<double>(d2.size());
  if (ok > 0) {
    p.mean_fidelity = sum_f / ok;
    p.mean_infidelity = 1.0 - p.mean_fidelity;
    double s = 0.0;
    for (double v : d2) s += v;
    p.mean_bures_sq = s / ok;
    double ss = 0.0;
    for (double v : d2) ss += (v - p.mean_bures_sq) * (v - p.mean_bures_sq);
    p.std_bures_sq = d2.size() > 1 ? std::sqrt(ss / (ok - 1.0)) : 0.0;
  }
  p.cov_samples = static_cast<int>(thetas.size());
  if (thetas.size() > 1) {
    VectorXd mean = VectorXd::Zero(thetas.front().size());
    for (const auto& t : thetas) mean += t;
    mean /= static_cast<double>(thetas.size());
    double tr = 0.0;
    for (const auto& t : thetas) tr += (t - mean).squaredNorm();
    p.cov_trace = tr / static_cast<double>(thetas.size() - 1);
  }
  if (keep) {
    p.records.reserve(outcomes.size());
    for (auto& o : outcomes) p.records.push_back(std::move(o.record));
  }
  return p;
}

}  // namespace

Estimator estimator_from_name(const std::string& name) {
  if (name == "mle16") return Estimator::mle16;
  if (name == "maice") return Estimator::maice;
  throw ConfigError("unknown estimator '" + name + "' (expected mle16 or maice)");
}

std::string estimator_name(Estimator e) { return e == Estimator::mle16 ? "mle16" : "maice"; }

double default_epsilon(const std::string& name) {
  if (name == "mixed") return 0.0;
  if (name == "product" || name == "bell") return 0.05;
  throw ConfigError("unknown state preset '" + name + "' (expected mixed, product or bell)");
}

DensityMatrix preset_state(const std::string& name, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
  const Matrix4c noise = Matrix4c::Identity() / 4.0;
  if (name == "mixed") return DensityMatrix(noise);
  Vector4c ket;
  if (name == "product") {
    ket = kets::product("HV");
  } else if (name == "bell") {
    ket = (kets::product("HH") + kets::product("VV")) / std::sqrt(2.0);
  } else {
    throw ConfigError("unknown state preset '" + name + "' (expected mixed, product or bell)");
  }
  Matrix4c rho = (1.0 - epsilon) * ket * ket.adjoint() + epsilon * noise;
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

void SimulationConfig::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("rate must be positive");
  if (acquisition_times.empty()) throw ConfigError("at least one acquisition time is required");
  for (double t : acquisition_times)
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("acquisition times must be positive");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  (void)projector_set_by_name(basis);
  if (bound_rank) (void)CholeskyModel::param_count(*bound_rank);
  if (!explicit_state) (void)default_epsilon(true_state);
  if (epsilon && !(*epsilon >= 0.0 && *epsilon < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
}

double SimulationConfig::resolved_epsilon() const {
  return epsilon ? *epsilon : default_epsilon(true_state);
}

DensityMatrix SimulationConfig::resolve_state() const {
  if (explicit_state) return *explicit_state;
  return preset_state(true_state, resolved_epsilon());
}

CountVector sample_counts(const DensityMatrix& rho, const ProjectorSet& set, double lambda,
                          std::mt19937_64& rng) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  const Vector16d mean = mean_counts(rho, lambda, set);
  CountVector c;
  for (int nu = 0; nu < 16; ++nu) {
    const double m = mean(nu);
    c.n[static_cast<std::size_t>(nu)] = m > 0.0 ? std::poisson_distribution<std::int64_t>(m)(rng) : 0;
  }
  return c;
}

CholeskyModel truth_coordinates(const DensityMatrix& rho, std::optional<int> rank) {
  const int k = rank ? *rank : std::max(1, rho.numerical_rank());
  // The LQ route keeps unused columns exactly zero for rank-deficient states;
  // for full-rank states it coincides with the Cholesky factor.
  return model_from_density(rho, k, 1.0);
}

SweepResult run_sweep(const SimulationConfig& config) {
  config.validate();
  const DensityMatrix truth = config.resolve_state();
  const ProjectorSet& set = projector_set_by_name(config.basis);
  const int truth_rank = std::max(1, truth.numerical_rank());
  const int bound_rank =
      config.bound_rank ? *config.bound_rank : (config.estimator == Estimator::mle16 ? 4 : truth_rank);

  SweepResult result;
  result.truth = truth_coordinates(truth, bound_rank);
  result.bound = bound_coefficient(result.truth, set, CompletenessPolicy::pseudo_inverse);

  std::vector<double> lambdas;
  for (double t : config.acquisition_times) lambdas.push_back(config.rate * t);
  std::sort(lambdas.begin(), lambdas.end());

  for (std::size_t p = 0; p < lambdas.size(); ++p) {
    const double lambda = lambdas[p];
    const std::uint64_t point_seed = derive_seed(config.seed, p);
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
    parallel_for(config.trials, config.threads, [&](int i) {
      outcomes[static_cast<std::size_t>(i)] =
          run_trial(config, truth, set, lambda, bound_rank, i, derive_seed(point_seed, static_cast<std::uint64_t>(i)));
    });
    SweepPoint point = aggregate(outcomes, lambda, truth_rank, result.bound, config.keep_trials);
    if (point.failures > kMaxFailureFraction * point.trials) {
      throw SweepFailure(std::to_string(point.failures) + " of " + std::to_string(point.trials) +
                         " trials failed at lambda " + std::to_string(lambda));
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

BasisComparison compare_bases(const SimulationConfig& config) {
  SimulationConfig local = config;
  local.basis = "local";
  local.bound_rank = 4;
  SimulationConfig inseparable = local;
  inseparable.basis = "inseparable";

  BasisComparison out;
  out.local = run_sweep(local);
  out.inseparable = run_sweep(inseparable);
  out.local_bound = out.local.bound;
  out.inseparable_bound = out.inseparable.bound;
  return out;
}

MatrixXd tile_estimates(const std::vector<DensityMatrix>& estimates) {
  if (estimates.size() != 9) {
    throw ConfigError("tiling needs exactly 9 estimates, got " + std::to_string(estimates.size()));
  }
  MatrixXd out(12, 12);
  for (int b = 0; b < 9; ++b)
    out.block(4 * (b / 3), 4 * (b % 3), 4, 4) = estimates[static_cast<std::size_t>(b)].matrix().real();
  return out;
}

}  // namespace qse
