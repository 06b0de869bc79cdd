#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace js = jspursuit;

TEST(Matmodel, GaussianSampleMeanNearZero) {
  const auto phi = js::gen_gaussian_phi<double>(64, 512, 1.0, js::Seed{1, 0});
  EXPECT_EQ(phi.rows(), 64);
  EXPECT_EQ(phi.cols(), 512);
  EXPECT_LT(std::abs(phi.mean()), 4.0 / std::sqrt(64.0 * 512.0));
}

TEST(Matmodel, GaussianDeterministic) {
  const auto a = js::gen_gaussian_phi<double>(1, 1, 1.0, js::Seed{5, 5});
  const auto b = js::gen_gaussian_phi<double>(1, 1, 1.0, js::Seed{5, 5});
  EXPECT_EQ(a(0, 0), b(0, 0));
  const auto c = js::gen_gaussian_phi<std::complex<double>>(4, 3, 1.0, js::Seed{5, 5});
  const auto d = js::gen_gaussian_phi<std::complex<double>>(4, 3, 1.0, js::Seed{5, 5});
  EXPECT_EQ(c, d);
}

TEST(Matmodel, GaussianVarianceInChiSquareInterval) {
  // (n-1) s^2 / sigma^2 ~ chi^2_{999}; the 99.9% interval for s^2 at sigma = 2
  // is roughly [3.4, 4.6].
  const auto phi = js::gen_gaussian_phi<double>(1000, 1, 2.0, js::Seed{11, 3});
  const double mean = phi.mean();
  const double var = (phi.array() - mean).square().sum() / 999.0;
  EXPECT_GE(var, 3.4);
  EXPECT_LE(var, 4.6);
}

TEST(Matmodel, GaussianRejectsEmpty) {
  try {
    js::gen_gaussian_phi<double>(0, 3, 1.0, js::Seed{});
    FAIL();
  } catch (const js::Error& e) {
    EXPECT_EQ(e.kind(), js::ErrorKind::invalid_dimension);
  }
}

TEST(Matmodel, SphericalColumnsUnitNorm) {
  const auto phi = js::gen_spherical_phi<double>(3, 5, js::Seed{2, 0});
  for (js::Index j = 0; j < 5; ++j) EXPECT_NEAR(phi.col(j).norm(), 1.0, 1e-12);
  const auto c = js::gen_spherical_phi<std::complex<double>>(6, 7, js::Seed{2, 0});
  for (js::Index j = 0; j < 7; ++j) EXPECT_NEAR(c.col(j).norm(), 1.0, 1e-12);
}

TEST(Matmodel, SphericalZeroSphere) {
  const auto phi = js::gen_spherical_phi<double>(1, 4, js::Seed{2, 1});
  for (js::Index j = 0; j < 4; ++j) EXPECT_EQ(std::abs(phi(0, j)), 1.0);
}

TEST(Matmodel, SphericalAnglesUniformKS) {
  const js::Index n = 10000;
  const auto phi = js::gen_spherical_phi<double>(2, n, js::Seed{3, 0});
  std::vector<double> u(static_cast<std::size_t>(n));
  for (js::Index j = 0; j < n; ++j) {
    double ang = std::atan2(phi(1, j), phi(0, j));
    if (ang < 0) ang += 2.0 * std::numbers::pi;
    u[static_cast<std::size_t>(j)] = ang / (2.0 * std::numbers::pi);
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  for (js::Index i = 0; i < n; ++i) {
    const double x = u[static_cast<std::size_t>(i)];
    d = std::max({d, (i + 1.0) / n - x, x - static_cast<double>(i) / n});
  }
  // Asymptotic 99% critical value of the Kolmogorov statistic: sqrt(-ln(alpha/2)/2) / sqrt(n).
  const double critical = std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(static_cast<double>(n));
  EXPECT_LT(d, critical);
}

TEST(Matmodel, PartialDftFullSelectionIsUnitary) {
  const js::Index n = 8;
  js::IndexSet rows(n);
  std::iota(rows.begin(), rows.end(), js::Index{0});
  const auto phi = js::partial_dft_rows(n, rows);
  EXPECT_TRUE((phi * phi.adjoint()).isApprox(Eigen::MatrixXcd::Identity(n, n), 1e-10));
}

TEST(Matmodel, PartialDftDcRow) {
  const auto phi = js::partial_dft_rows(4, {0});
  for (js::Index j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(phi(0, j) - std::complex<double>(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Matmodel, PartialDftEqualColumnNormsAndDistinctRows) {
  const auto phi = js::gen_partial_dft(2, 4, js::Seed{4, 0});
  for (js::Index j = 0; j < 4; ++j) EXPECT_NEAR(phi.col(j).norm(), 1.0, 1e-12);
  const auto big = js::gen_partial_dft(16, 32, js::Seed{4, 1});
  // Distinct rows give orthonormal rows after rescaling by sqrt(m/n).
  const Eigen::MatrixXcd g = big * big.adjoint() * (16.0 / 32.0);
  EXPECT_TRUE(g.isApprox(Eigen::MatrixXcd::Identity(16, 16), 1e-10));
  EXPECT_THROW(js::gen_partial_dft(5, 4, js::Seed{}), js::Error);
}

TEST(Matmodel, SignalStructureFigureConfig) {
  const auto t = js::gen_signal<double>({512, 3, 20, 3}, js::Seed{7, 0});
  EXPECT_EQ(t.omega.size(), 20u);
  EXPECT_EQ(js::row_support(t.x0), t.omega);
  EXPECT_EQ(js::numerical_rank(t.x0), 3);
}

TEST(Matmodel, SignalTrivialAndRankDefective) {
  const auto t = js::gen_signal<double>({4, 1, 1, 1}, js::Seed{7, 1});
  EXPECT_EQ(js::row_support(t.x0).size(), 1u);
  EXPECT_EQ(js::numerical_rank(t.x0), 1);
  const auto c = js::gen_signal<std::complex<double>>({40, 6, 10, 2}, js::Seed{7, 2});
  EXPECT_EQ(js::numerical_rank(c.x0), 2);
  EXPECT_THROW(js::gen_signal<double>({10, 3, 5, 4}, js::Seed{}), js::Error);
}

TEST(Matmodel, SignalRowsNondegenerate) {
  int ok = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto t = js::gen_signal<double>({30, 4, 6, 3}, js::Seed{8, s});
    const Eigen::MatrixXd rows = js::select_rows(t.x0, t.omega);
    // krank(X^*) computed by the brute-force oracle.
    const Eigen::MatrixXd xt = rows.transpose();
    if (oracle::krank<double>(xt) == js::numerical_rank(rows, 1e-10)) ++ok;
  }
  EXPECT_GE(ok, 99);
}

TEST(Matmodel, NoiselessSentinel) {
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(5, 3);
  const auto noisy = js::add_noise<double>(y, js::kInfinity, js::Seed{1, 1});
  EXPECT_TRUE(noisy.w.isZero(0.0));
  EXPECT_EQ(noisy.y, y);
  EXPECT_THROW(js::add_noise<double>(Eigen::MatrixXd::Zero(3, 3), 10.0, js::Seed{}), js::Error);
}

TEST(Matmodel, NoiseCalibrationAt40dB) {
  double acc = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const js::Seed s{21, t};
    const auto phi = js::gen_gaussian_phi<double>(64, 512, 1.0, s.derive(0));
    const auto sig = js::gen_signal<double>({512, 3, 20, 3}, s.derive(1));
    const Eigen::MatrixXd yc = phi * sig.x0;
    const auto noisy = js::add_noise<double>(yc, 40.0, s.derive(2));
    acc += 10.0 * std::log10(yc.squaredNorm() / noisy.w.squaredNorm());
  }
  EXPECT_NEAR(acc / 100.0, 40.0, 1.0);
}

TEST(Matmodel, NoiseEnergyAtZeroDb) {
  for (int cplx = 0; cplx < 2; ++cplx) {
    double acc = 0.0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
      if (cplx) {
        Eigen::MatrixXcd y = Eigen::MatrixXcd::Ones(4, 3);
        y /= y.norm();
        acc += js::add_noise<std::complex<double>>(y, 0.0, js::Seed{31, t}).w.squaredNorm();
      } else {
        Eigen::MatrixXd y = Eigen::MatrixXd::Ones(4, 3);
        y /= y.norm();
        acc += js::add_noise<double>(y, 0.0, js::Seed{31, t}).w.squaredNorm();
      }
    }
    EXPECT_NEAR(acc / 1000.0, 1.0, 0.1) << "complex=" << cplx;
  }
}

TEST(Matmodel, GenPhiDispatch) {
  EXPECT_THROW(js::gen_phi<double>(js::MatrixModel::partial_dft, 4, 8, 1.0, js::Seed{}), js::Error);
  const auto c = js::gen_phi<std::complex<double>>(js::MatrixModel::partial_dft, 4, 8, 1.0, js::Seed{});
  EXPECT_EQ(c.rows(), 4);
  const auto s = js::gen_phi<double>(js::MatrixModel::spherical, 4, 8, 1.0, js::Seed{});
  EXPECT_NEAR(s.col(3).norm(), 1.0, 1e-12);
}
