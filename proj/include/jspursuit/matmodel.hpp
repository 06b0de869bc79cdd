#pragma once

// Random sensing matrices, the row-sparse signal model and SNR-calibrated
// noise injection. Every generator is a pure function of its Seed.

#include "jspursuit/core.hpp"
#include "jspursuit/random.hpp"

#include <cmath>
#include <numbers>

namespace jspursuit {

enum class MatrixModel { gaussian, spherical, partial_dft };

inline const char* to_string(MatrixModel m) {
  switch (m) {
    case MatrixModel::gaussian: return "gaussian";
    case MatrixModel::spherical: return "spherical";
    case MatrixModel::partial_dft: return "partial_dft";
  }
  return "unknown";
}

/// m x n matrix with i.i.d. N(0, sigma^2) components.
template <typename Scalar>
Mat<Scalar> gen_gaussian_phi(Index m, Index n, double sigma, Seed seed) {
  require(m >= 1 && n >= 1, ErrorKind::invalid_dimension, "gen_gaussian_phi: m and n must be >= 1");
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::invalid_spec, "gen_gaussian_phi: sigma must be > 0");
  Rng rng(seed);
  Mat<Scalar> phi(m, n);
  // Column-major fill keeps column j's draws contiguous in the stream.
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) phi(i, j) = rng.icn<Scalar>(sigma * sigma);
  return phi;
}

/// Columns i.i.d. uniform on the unit sphere (Gaussian draw, then normalize).
template <typename Scalar>
Mat<Scalar> gen_spherical_phi(Index m, Index n, Seed seed) {
  require(m >= 1 && n >= 1, ErrorKind::invalid_dimension, "gen_spherical_phi: m and n must be >= 1");
  Rng rng(seed);
  Mat<Scalar> phi(m, n);
  for (Index j = 0; j < n; ++j) {
    double norm = 0.0;
    do {
      for (Index i = 0; i < m; ++i) phi(i, j) = rng.icn<Scalar>(1.0);
      norm = phi.col(j).norm();
    } while (norm == 0.0);
    phi.col(j) /= norm;
  }
  return phi;
}

/// Rows `rows` of the n x n DFT matrix, scaled by 1/sqrt(m).
inline ComplexMat partial_dft_rows(Index n, const IndexSet& rows) {
  const Index m = static_cast<Index>(rows.size());
  require(m >= 1 && n >= 1, ErrorKind::invalid_dimension, "partial_dft_rows: empty selection");
  ComplexMat phi(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index r = 0; r < m; ++r) {
    const Index c = rows[static_cast<std::size_t>(r)];
    require(c >= 0 && c < n, ErrorKind::invalid_dimension, "partial_dft_rows: row index out of range");
    for (Index j = 0; j < n; ++j) {
      // Reduce c*j mod n first so the phase stays exact for large n.
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((c * j) % n) / static_cast<double>(n);
      phi(r, j) = std::polar(scale, phase);
    }
  }
  return phi;
}

/// m distinct DFT rows chosen uniformly at random (without replacement).
inline ComplexMat gen_partial_dft(Index m, Index n, Seed seed) {
  require(m >= 1 && n >= 1, ErrorKind::invalid_dimension, "gen_partial_dft: m and n must be >= 1");
  require(m <= n, ErrorKind::invalid_dimension, "gen_partial_dft: m > n");
  Rng rng(seed);
  return partial_dft_rows(n, rng.sample_without_replacement(n, m));
}

/// Haar-distributed d x r matrix with orthonormal columns (QR of an ICN draw
/// with the R diagonal made positive).
template <typename Scalar>
Mat<Scalar> random_orthonormal(Index d, Index r, Rng& rng) {
  Mat<Scalar> g(d, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = rng.icn<Scalar>(1.0);
  Eigen::HouseholderQR<Mat<Scalar>> qr(g);
  Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(d, r);
  const Mat<Scalar>& packed = qr.matrixQR();
  for (Index j = 0; j < r; ++j) {
    const Scalar diag = packed(j, j);
    if (std::abs(diag) > 0.0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

/// X0 with k nonzero rows on a uniform random support; X0^Omega = V1 Lambda V2^*.
template <typename Scalar>
Truth<Scalar> gen_signal(const SignalSpec& spec, Seed seed) {
  spec.validate();
  Rng rng(seed);
  Truth<Scalar> t;
  t.omega = rng.sample_without_replacement(spec.n, spec.k);
  const Mat<Scalar> v1 = random_orthonormal<Scalar>(spec.k, spec.r, rng);
  const Mat<Scalar> lambda = random_orthonormal<Scalar>(spec.r, spec.r, rng);
  const Mat<Scalar> v2 = random_orthonormal<Scalar>(spec.l, spec.r, rng);
  const Mat<Scalar> rows = v1 * lambda * v2.adjoint();
  t.x0 = Mat<Scalar>::Zero(spec.n, spec.l);
  for (Index i = 0; i < spec.k; ++i) t.x0.row(t.omega[static_cast<std::size_t>(i)]) = rows.row(i);
  return t;
}

template <typename Scalar>
struct NoisyMeasurement {
  Mat<Scalar> y;
  Mat<Scalar> w;
};

/// Adds ICN noise whose per-entry energy makes ||y_clean||_F^2 / E||W||_F^2
/// equal 10^(snr_db/10) for this instance. snr_db = +inf gives W = 0.
template <typename Scalar>
NoisyMeasurement<Scalar> add_noise(const Mat<Scalar>& y_clean, double snr_db, Seed seed) {
  const double energy = y_clean.squaredNorm();
  require(energy > 0.0, ErrorKind::degenerate_signal, "add_noise: ||y_clean||_F == 0");
  NoisyMeasurement<Scalar> out;
  if (std::isinf(snr_db) && snr_db > 0) {
    out.w = Mat<Scalar>::Zero(y_clean.rows(), y_clean.cols());
    out.y = y_clean;
    return out;
  }
  require(std::isfinite(snr_db), ErrorKind::domain, "add_noise: snr_db must be finite or +inf");
  const double entries = static_cast<double>(y_clean.size());
  const double entry_energy = energy / (entries * std::pow(10.0, snr_db / 10.0));
  // Complex entries split the energy evenly between the two components.
  const double component_var = is_complex_v<Scalar> ? entry_energy / 2.0 : entry_energy;
  Rng rng(seed);
  out.w.resize(y_clean.rows(), y_clean.cols());
  for (Index j = 0; j < out.w.cols(); ++j)
    for (Index i = 0; i < out.w.rows(); ++i) out.w(i, j) = rng.icn<Scalar>(component_var);
  out.y = y_clean + out.w;
  return out;
}

/// Sensing matrix of the requested model; partial DFT requires a complex field.
template <typename Scalar>
Mat<Scalar> gen_phi(MatrixModel model, Index m, Index n, double sigma, Seed seed) {
  switch (model) {
    case MatrixModel::gaussian: return gen_gaussian_phi<Scalar>(m, n, sigma, seed);
    case MatrixModel::spherical: return gen_spherical_phi<Scalar>(m, n, seed);
    case MatrixModel::partial_dft:
      if constexpr (is_complex_v<Scalar>) {
        return gen_partial_dft(m, n, seed);
      } else {
        throw Error(ErrorKind::config, "partial_dft sensing matrices need field = complex");
      }
  }
  throw Error(ErrorKind::config, "unknown matrix model");
}

}  // namespace jspursuit
