#include "oracles.hpp"

#include <gtest/gtest.h>

namespace js = jspursuit;

namespace {

js::RecoveryProblem<double> random_problem(js::Index m, js::Index n, js::Index l, js::Index k, js::Index r,
                                           std::uint64_t seed) {
  js::RecoveryProblem<double> p;
  const js::Seed s{seed, 0};
  p.phi = js::gen_gaussian_phi<double>(m, n, 1.0, s.derive(0));
  p.truth = js::gen_signal<double>({n, l, k, r}, s.derive(1));
  p.y = p.phi * p.truth->x0;
  p.k = k;
  return p;
}

}  // namespace

TEST(Music, FullRankRecovery) {
  for (js::Index k = 1; k <= 8; ++k)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = random_problem(16, 32, k, k, k, 100 * k + seed);
      EXPECT_EQ(js::music(p, k).omega_hat, p.truth->omega);
    }
}

TEST(Music, IdentityPhi) {
  js::RecoveryProblem<double> p;
  p.phi = Eigen::MatrixXd::Identity(5, 5);
  p.y = Eigen::MatrixXd::Zero(5, 2);
  p.y(1, 0) = 1.0;
  p.y(3, 1) = 2.0;
  EXPECT_EQ(js::music(p, 2).omega_hat, (js::IndexSet{1, 3}));
}

TEST(Music, ScoresOnExactSubspace) {
  const auto p = random_problem(16, 32, 5, 5, 5, 9);
  const auto sh = js::estimate_signal_subspace(p.y, js::RankPolicy::automatic());
  ASSERT_EQ(sh.dim(), 5);
  for (js::Index i = 0; i < 32; ++i) {
    const double score = (sh.basis.transpose() * p.phi.col(i)).norm() / p.phi.col(i).norm();
    const bool in = std::find(p.truth->omega.begin(), p.truth->omega.end(), i) != p.truth->omega.end();
    if (in)
      EXPECT_NEAR(score, 1.0, 1e-10);
    else
      EXPECT_LT(score, 1.0 - 1e-6);
  }
}

TEST(SaMusic, ReducesToMusicWhenRankEqualsK) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_problem(16, 40, 4, 4, 4, 200 + seed);
    EXPECT_EQ(js::sa_music_osmp(p, 4).omega_hat, js::music(p, 4).omega_hat);
  }
}

TEST(SaMusic, FullRowRankRecovery) {
  for (js::Index k = 1; k <= 8; ++k)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = random_problem(16, 32, k, k, k, 300 * k + seed);
      EXPECT_EQ(js::sa_music_osmp(p, k).omega_hat, p.truth->omega);
    }
}

TEST(SaMusic, RankDefectiveRuns) {
  const auto p = random_problem(32, 64, 2, 8, 2, 77);
  const auto r = js::sa_music_osmp(p, 8);
  EXPECT_EQ(r.omega_hat.size(), 8u);
  EXPECT_TRUE(std::is_sorted(r.omega_hat.begin(), r.omega_hat.end()));
}

TEST(Somp, IdentitySingleVector) {
  js::RecoveryProblem<double> p;
  p.phi = Eigen::MatrixXd::Identity(6, 6);
  p.y = Eigen::MatrixXd::Zero(6, 1);
  p.y << 0.1, -4.0, 0.0, 3.0, -0.5, 2.0;
  EXPECT_EQ(js::somp(p, 3).omega_hat, (js::IndexSet{1, 3, 5}));
}

TEST(Somp, ScaleInvariance) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_problem(20, 40, 1, 4, 1, 500 + seed);
    auto q = p;
    for (js::Index j = 0; j < 40; ++j) q.phi.col(j) *= u(gen);
    EXPECT_EQ(js::somp(p, 4).omega_hat, js::somp(q, 4).omega_hat);
  }
}

TEST(Somp, SingleVectorBelowTsmpAtLargeK) {
  int somp_ok = 0;
  int tsmp_ok = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_problem(64, 512, 1, 24, 1, 900 + seed);
    somp_ok += js::somp(p, 24).omega_hat == p.truth->omega;
    tsmp_ok += js::tsmp1(p, 24).omega_hat == p.truth->omega;
  }
  EXPECT_LE(somp_ok, tsmp_ok);
}

TEST(Baselines, Preconditions) {
  const auto p = random_problem(8, 16, 2, 3, 2, 1);
  EXPECT_THROW(js::music(p, 17), js::Error);
  EXPECT_THROW(js::somp(p, 9), js::Error);
  EXPECT_THROW(js::sa_music_osmp(p, 0), js::Error);
}
