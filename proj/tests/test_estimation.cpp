#include "qse/errors.hpp"
#include "qse/estimation.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace qse {
namespace {

const CountVector kVnms{{615, 553, 613, 605, 550, 576, 596, 609, 575, 622, 577, 601, 574, 569, 591, 569}};
const CountVector kApss{{42, 45, 25, 2504, 60, 56, 31, 33, 1309, 1431, 1148, 1125, 514, 487, 576, 599}};

CountVector rounded(const Vector16d& m) {
  CountVector c;
  for (int i = 0; i < 16; ++i) c.n[static_cast<std::size_t>(i)] = std::llround(m(i));
  return c;
}

CountVector poisson_counts(const Vector16d& mean, std::mt19937_64& rng) {
  CountVector c;
  for (int i = 0; i < 16; ++i)
    c.n[static_cast<std::size_t>(i)] = mean(i) > 0 ? std::poisson_distribution<std::int64_t>(mean(i))(rng) : 0;
  return c;
}

TEST(LogLikelihood, ZeroCountsLeaveOnlyMeans) {
  const double m = 37.0;
  const CholeskyModel model = cholesky_from_density(DensityMatrix::maximally_mixed(), 4.0 * m);
  EXPECT_NEAR(log_likelihood(model, CountVector{}, local_projector_set()), -16.0 * m, 1e-8);
}

TEST(LogLikelihood, UnitCountsAtUnitMeans) {
  // Each term is -1 + 1 ln 1 - ln Gamma(2) = -1.
  const CholeskyModel model = cholesky_from_density(DensityMatrix::maximally_mixed(), 4.0);
  CountVector ones;
  ones.n.fill(1);
  EXPECT_NEAR(log_likelihood(model, ones, local_projector_set()), -16.0, 1e-8);
}

TEST(LogLikelihood, MaximizedAlongScaleWhenMeansEqualCounts) {
  const CholeskyModel model = cholesky_from_density(DensityMatrix::maximally_mixed(), 2500.0);
  const CountVector n = rounded(mean_counts(model, local_projector_set()));
  const double at = log_likelihood(model, n, local_projector_set());
  for (double s : {0.98, 0.995, 1.005, 1.02}) {
    const CholeskyModel scaled(4, model.params() * std::sqrt(s));
    EXPECT_LT(log_likelihood(scaled, n, local_projector_set()), at);
  }
}

TEST(LogLikelihood, ClampsZeroMeans) {
  VectorXd th = VectorXd::Zero(7);
  th(0) = 10.0;  // |HH>, so the HV channel has zero mean
  CountVector n;
  n.n[1] = 3;
  const double ll = log_likelihood(CholeskyModel(1, th), n, local_projector_set());
  EXPECT_TRUE(std::isfinite(ll));
  EXPECT_LT(ll, -50.0);
}

TEST(Gradient, VanishesWhenCountsEqualMeans) {
  std::mt19937_64 rng(30);
  const CholeskyModel model = testing::random_model(rng, 4, 1000.0);
  const Vector16d m = mean_counts(model, local_projector_set());
  const VectorXd g = log_likelihood_gradient(model, m, local_projector_set());
  EXPECT_EQ(g.size(), 16);
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Gradient, LengthMatchesRank) {
  std::mt19937_64 rng(31);
  for (int rank = 1; rank <= 4; ++rank) {
    const CholeskyModel model = testing::random_model(rng, rank, 10.0);
    EXPECT_EQ(log_likelihood_gradient(model, kVnms, local_projector_set()).size(),
              CholeskyModel::param_count(rank));
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int rank = 1 + trial % 4;
    const ProjectorSet& set = trial % 2 ? inseparable_projector_set() : local_projector_set();
    const CholeskyModel model = testing::random_model(rng, rank, 500.0);
    const CountVector n = poisson_counts(mean_counts(model, set) * 1.3, rng);
    const VectorXd g = log_likelihood_gradient(model, n, set);
    for (int i = 0; i < model.size(); ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(model.params()(i)));
      VectorXd p = model.params(), q = model.params();
      p(i) += h;
      q(i) -= h;
      const double fd = (log_likelihood(CholeskyModel(rank, p), n, set) -
                         log_likelihood(CholeskyModel(rank, q), n, set)) / (2.0 * h);
      EXPECT_LE(std::abs(fd - g(i)), 1e-5 * std::max(1.0, g.cwiseAbs().maxCoeff()))
          << "trial " << trial << " component " << i;
    }
  }
}

TEST(Aic, Arithmetic) {
  EXPECT_NEAR(aic(-65.7, 4), 163.4, 1e-12);
  EXPECT_DOUBLE_EQ(aic(0.0, 1), 14.0);
  EXPECT_DOUBLE_EQ(aic(-50.0, 2), 124.0);
}

TEST(Mle, NoiselessMaximallyMixed) {
  const Vector16d m = mean_counts(DensityMatrix::maximally_mixed(), 2500.0, local_projector_set());
  const EstimationResult r = mle(4, rounded(m), local_projector_set());
  EXPECT_TRUE(r.converged);
  EXPECT_LT(max_abs(r.rho_hat.matrix() - Matrix4c::Identity() / 4.0), 1e-4);
  EXPECT_NEAR(r.lambda_hat, 2500.0, 1.0);
}

TEST(Mle, ResultFieldsAreConsistent) {
  const EstimationResult r = mle(3, from_acquisition_order(kApss), local_projector_set());
  EXPECT_EQ(r.rank, 3);
  EXPECT_EQ(r.theta_hat.size(), 15);
  EXPECT_DOUBLE_EQ(r.aic, -2.0 * r.log_likelihood + 2.0 * 15);
  EXPECT_NEAR(r.lambda_hat, r.theta_hat.squaredNorm(), 1e-9);
  EXPECT_LT(max_abs(r.rho_hat.matrix() - density_from_cholesky(r.model()).matrix()), 1e-12);
  EXPECT_NEAR(r.log_likelihood,
              log_likelihood(r.model(), from_acquisition_order(kApss), local_projector_set()), 1e-9);
}

TEST(Mle, VnmsFullRankAic) {
  const EstimationResult r = mle(4, from_acquisition_order(kVnms), local_projector_set());
  EXPECT_NEAR(r.aic, 163.4, 1.0);
}

TEST(Mle, ApssRankTwoAic) {
  const EstimationResult r = mle(2, from_acquisition_order(kApss), local_projector_set());
  EXPECT_NEAR(r.aic, 146.3, 1.0);
}

TEST(Mle, NeverWorseThanInit) {
  std::mt19937_64 rng(33);
  for (int rank = 1; rank <= 4; ++rank) {
    const VectorXd init = testing::random_theta(rng, rank, 9000.0);
    const CountVector n = from_acquisition_order(kVnms);
    const double ll0 = log_likelihood(CholeskyModel(rank, init), n, local_projector_set());
    const EstimationResult r = mle(rank, n, local_projector_set(), init);
    EXPECT_GE(r.log_likelihood, ll0);
  }
}

TEST(Mle, DeterministicGivenInputs) {
  const CountVector n = from_acquisition_order(kApss);
  const EstimationResult a = mle(4, n, local_projector_set());
  const EstimationResult b = mle(4, n, local_projector_set());
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Mle, StationaryPointMatchesTotalCount) {
  // theta . grad = 2 (sum n - sum M), so sum M = sum n at any stationary point.
  std::mt19937_64 rng(34);
  for (int rank = 1; rank <= 4; ++rank) {
    const CountVector n = poisson_counts(mean_counts(testing::random_state(rng), 5000.0, local_projector_set()), rng);
    const EstimationResult r = mle(rank, n, local_projector_set());
    EXPECT_NEAR(mean_counts(r.model(), local_projector_set()).sum(), n.total(), 1e-4 * n.total());
  }
}

TEST(Mle, LambdaIsQuarterTotalForMixedTruth) {
  std::mt19937_64 rng(35);
  const Vector16d mean = mean_counts(DensityMatrix::maximally_mixed(), 1e6, local_projector_set());
  for (int i = 0; i < 5; ++i) {
    const CountVector n = poisson_counts(mean, rng);
    const EstimationResult r = mle(4, n, local_projector_set());
    // Sum of fitted means equals the total; the local operators sum to
    // (I + D + R) (x) (I + D + L), whose expectation is 4 at I/4.
    Matrix4c sum = Matrix4c::Zero();
    for (const auto& op : local_projector_set().operators()) sum += op;
    EXPECT_NEAR(r.lambda_hat * (r.rho_hat.matrix() * sum).trace().real(), n.total(), 1e-6 * n.total());
    EXPECT_NEAR(r.lambda_hat, n.total() / 4.0, 5e-3 * n.total() / 4.0);
  }
}

TEST(Mle, RejectsAllZeroCounts) {
  EXPECT_THROW((void)mle(4, CountVector{}, local_projector_set()), DegenerateInputError);
}

TEST(Maice, ApssSelectsRankTwo) {
  const MaiceResult r = maice(from_acquisition_order(kApss), local_projector_set());
  EXPECT_EQ(r.best.rank, 2);
  ASSERT_EQ(r.all.size(), 4u);
  EXPECT_NEAR(r.by_rank(4).aic, 152.8, 2.0);
  EXPECT_NEAR(r.by_rank(3).aic, 150.8, 2.0);
  EXPECT_NEAR(r.by_rank(2).aic, 146.3, 1.0);
  EXPECT_NEAR(r.by_rank(1).aic, 208.9, 2.0);
}

TEST(Maice, VnmsSelectsRankFour) {
  const MaiceResult r = maice(from_acquisition_order(kVnms), local_projector_set());
  EXPECT_EQ(r.best.rank, 4);
  EXPECT_NEAR(r.by_rank(4).aic, 163.4, 1.0);
  EXPECT_NEAR(r.by_rank(3).aic, 201.3, 2.0);
  EXPECT_NEAR(r.by_rank(2).aic, 349.9, 2.0);
}

TEST(Maice, NoiselessPureStateSelectsRankOne) {
  const DensityMatrix rho = DensityMatrix::pure(kets::product("HD"));
  const Vector16d m = mean_counts(rho, 4000.0, local_projector_set());
  Vector16d rounded_m = m.array().round();
  CountVector n;
  for (int i = 0; i < 16; ++i) n.n[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rounded_m(i));
  const MaiceResult r = maice(n, local_projector_set());
  EXPECT_EQ(r.best.rank, 1);
}

TEST(Maice, NestedLikelihoodsAreMonotone) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix truth = testing::random_state(rng, 1 + trial % 4);
    const CountVector n = poisson_counts(mean_counts(truth, 300.0 + 100.0 * trial, local_projector_set()), rng);
    const MaiceResult r = maice(n, local_projector_set());
    for (int k = 1; k < 4; ++k)
      EXPECT_GE(r.by_rank(k + 1).log_likelihood, r.by_rank(k).log_likelihood - 1e-6) << trial;
    for (const auto& e : r.all) EXPECT_DOUBLE_EQ(e.aic, aic(e.log_likelihood, e.rank));
    double best = r.all[0].aic;
    for (const auto& e : r.all) best = std::min(best, e.aic);
    EXPECT_DOUBLE_EQ(r.best.aic, best);
  }
}

TEST(Maice, WorksOnIncompleteSet) {
  std::mt19937_64 rng(37);
  const auto& s = inseparable_projector_set();
  const CountVector n = poisson_counts(mean_counts(DensityMatrix::pure(testing::phi_plus()), 2000.0, s), rng);
  const MaiceResult r = maice(n, s);
  EXPECT_GT(fidelity(r.best.rho_hat, DensityMatrix::pure(testing::phi_plus())), 0.98);
}

TEST(KlDivergence, Values) {
  Vector16d a = Vector16d::Constant(3.0);
  EXPECT_DOUBLE_EQ(kl_divergence(a, a), 0.0);
  EXPECT_NEAR(kl_divergence(Vector16d::Ones(), Vector16d::Constant(std::exp(1.0))), 16.0 * (std::exp(1.0) - 2.0),
              1e-12);
  Vector16d b = a;
  b(3) = 3.1;
  EXPECT_GT(kl_divergence(a, b), 0.0);
  EXPECT_GT(kl_divergence(b, a), 0.0);
  b(3) = 0.0;
  EXPECT_THROW((void)kl_divergence(a, b), ConfigError);
}

}  // namespace
}  // namespace qse
