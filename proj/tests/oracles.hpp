#pragma once

// Reference implementations used only by the tests. They recompute the
// library's quantities by the most direct route available: explicit dense
// projector matrices, bitmask subset enumeration and a different SVD
// (divide and conquer) or Gram eigen-solver, so they share no code path with
// the library beyond Eigen's basic arithmetic.

#include "jspursuit/jspursuit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <bit>
#include <cstdint>
#include <random>

namespace oracle {

using jspursuit::Index;
using jspursuit::IndexSet;
template <typename S>
using Mat = jspursuit::Mat<S>;

/// Ascending singular values via BDCSVD.
template <typename S>
Eigen::VectorXd svals(const Mat<S>& a) {
  if (a.size() == 0) return {};
  Eigen::BDCSVD<Mat<S>> svd(a);
  return svd.singularValues();  // descending
}

/// sigma_p^2 by the eigenvalues of the Gram matrix (0 when p exceeds rows).
template <typename S>
double sigma_sq(const Mat<S>& a, Index p) {
  if (p < 1 || p > a.cols() || p > a.rows()) return 0.0;
  const Mat<S> g = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(g, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();  // ascending
  return std::max(0.0, ev(a.cols() - p));
}

inline IndexSet from_mask(std::uint64_t mask) {
  IndexSet s;
  for (Index i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) s.push_back(i);
  return s;
}

inline std::uint64_t to_mask(const IndexSet& s) {
  std::uint64_t m = 0;
  for (Index i : s) m |= std::uint64_t{1} << i;
  return m;
}

template <typename S>
Mat<S> cols(const Mat<S>& a, const IndexSet& idx) {
  Mat<S> out(a.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = a.col(idx[j]);
  return out;
}

/// Moore-Penrose pseudoinverse from a BDCSVD with relative cutoff.
template <typename S>
Mat<S> pinv(const Mat<S>& a, double rel = 1e-12) {
  Eigen::BDCSVD<Mat<S>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  Mat<S> sinv = Mat<S>::Zero(s.size(), s.size());
  const double cut = s.size() ? rel * s(0) : 0.0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) sinv(i, i) = 1.0 / s(i);
  return svd.matrixV() * sinv * svd.matrixU().adjoint();
}

/// Dense projector onto R(a)^perp.
template <typename S>
Mat<S> perp_projector(const Mat<S>& a, Index m) {
  Mat<S> p = Mat<S>::Identity(m, m);
  if (a.cols() == 0) return p;
  return p - a * pinv(a);
}

/// Dense projector onto R(a) keeping singular directions above abs_tol.
template <typename S>
Mat<S> range_projector(const Mat<S>& a, double abs_tol) {
  const Index m = a.rows();
  if (a.cols() == 0) return Mat<S>::Zero(m, m);
  Eigen::BDCSVD<Mat<S>> svd(a, Eigen::ComputeThinU);
  Mat<S> p = Mat<S>::Zero(m, m);
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > abs_tol) p += svd.matrixU().col(i) * svd.matrixU().col(i).adjoint();
  return p;
}

/// submp by explicit projector matrices, recomputed from scratch each step.
template <typename S>
IndexSet submp(const Mat<S>& s_hat, const Mat<S>& phi, const IndexSet& gamma0, Index s, double zero_tol = 1e-12,
               double tie_tol = 1e-10, double sub_tol = 1e-9) {
  const Index m = phi.rows();
  const Index n = phi.cols();
  IndexSet gamma = gamma0;
  IndexSet picked;
  for (Index step = 0; step < s; ++step) {
    const Mat<S> perp = perp_projector<S>(cols(phi, gamma), m);
    const Mat<S> ps = range_projector<S>(Mat<S>(perp * s_hat), sub_tol);
    std::vector<double> score(static_cast<std::size_t>(n), -1.0);
    for (Index l = 0; l < n; ++l) {
      if (std::find(gamma.begin(), gamma.end(), l) != gamma.end()) continue;
      const auto pl = (perp * phi.col(l)).eval();
      const double den = pl.norm();
      if (!(den > zero_tol * phi.col(l).norm())) continue;
      score[static_cast<std::size_t>(l)] = std::min(1.0, (ps * phi.col(l)).norm() / den);
    }
    double best = -1.0;
    for (double v : score) best = std::max(best, v);
    if (best < 0.0) throw std::runtime_error("oracle submp exhausted");
    Index pick = -1;
    for (Index l = 0; l < n && pick < 0; ++l)
      if (score[static_cast<std::size_t>(l)] >= 0.0 && score[static_cast<std::size_t>(l)] >= best - tie_tol) pick = l;
    picked.push_back(pick);
    gamma.push_back(pick);
  }
  return picked;
}

/// Largest q with every q-subset of columns having sigma_min > 1e-10 sigma_1(A).
template <typename S>
Index krank(const Mat<S>& a) {
  const Index n = a.cols();
  for (Index i = 0; i < n; ++i)
    if (a.col(i).norm() == 0.0) return 0;
  const double tol = 1e-10 * svals(a)(0);
  Index best = std::min(a.rows(), n);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const Index q = std::popcount(mask);
    if (q > best) continue;
    const Eigen::VectorXd s = svals<S>(cols(a, from_mask(mask)));
    const double smin = q <= a.rows() ? s(q - 1) : 0.0;
    if (!(smin > tol)) best = std::min(best, q - 1);
  }
  return best;
}

template <typename S>
double coherence(const Mat<S>& a) {
  double best = 0.0;
  for (Index i = 0; i < a.cols(); ++i)
    for (Index j = i + 1; j < a.cols(); ++j)
      best = std::max(best, std::abs(a.col(i).dot(a.col(j))) / (a.col(i).norm() * a.col(j).norm()));
  return best;
}

/// Normalized P_perp-projected columns; zero columns where the projection vanishes.
template <typename S>
Mat<S> dotted(const Mat<S>& a, const IndexSet& gamma, double zero_tol = 1e-12) {
  const Mat<S> p = perp_projector<S>(cols(a, gamma), a.rows());
  Mat<S> out = p * a;
  for (Index i = 0; i < a.cols(); ++i) {
    const double nv = out.col(i).norm();
    if (nv > zero_tol * a.col(i).norm())
      out.col(i) /= nv;
    else
      out.col(i).setZero();
  }
  return out;
}

template <typename S>
double lcp(const Mat<S>& a, const IndexSet& delta, const IndexSet& gamma) {
  const Mat<S> d = dotted(a, gamma);
  const std::uint64_t g = to_mask(gamma);
  double best = 0.0;
  for (Index i : delta)
    for (Index j : delta) {
      if (i >= j || ((g >> i) & 1) || ((g >> j) & 1)) continue;
      best = std::max(best, std::abs(d.col(i).dot(d.col(j))));
    }
  return best;
}

/// delta via kappa over every superset K of J with |K| = |J| + b.
template <typename S>
double wrip(const Mat<S>& a, const IndexSet& j, Index b) {
  const Index n = a.cols();
  const std::uint64_t jm = to_mask(j);
  const Index order = static_cast<Index>(j.size()) + b;
  double low = std::numeric_limits<double>::infinity();
  double high = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if ((mask & jm) != jm || std::popcount(mask) != order) continue;
    const Mat<S> ak = cols(a, from_mask(mask));
    low = std::min(low, sigma_sq(ak, order));
    high = std::max(high, sigma_sq(ak, 1));
  }
  const double kappa = high > 0.0 ? low / high : 0.0;
  return (1.0 - kappa) / (1.0 + kappa);
}

struct T3 {
  double a1, a2, a3;
};

template <typename S>
T3 theorem3(const Mat<S>& phi, const IndexSet& omega, Index v1) {
  const Index n = phi.cols();
  const Index k = static_cast<Index>(omega.size());
  const std::uint64_t om = to_mask(omega);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  const Index order = k + v1 + 1;
  T3 t{};
  t.a1 = wrip(phi, omega, v1 + 1);
  t.a2 = std::numeric_limits<double>::infinity();
  for (std::uint64_t d = 0; d <= full; ++d) {
    if ((d & om) || std::popcount(d) != v1) continue;
    double low = std::numeric_limits<double>::infinity();
    double high = 0.0;
    for (Index i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if ((om | d) & bit) continue;
      const Mat<S> sub = cols(phi, from_mask(om | d | bit));
      low = std::min(low, sigma_sq(sub, order));
      high = std::max(high, sigma_sq(sub, 1));
    }
    t.a2 = std::min(t.a2, low / high);
  }
  double maxcol = 0.0;
  for (Index i = 0; i < n; ++i) maxcol = std::max(maxcol, phi.col(i).squaredNorm());
  double low3 = std::numeric_limits<double>::infinity();
  for (std::uint64_t d = 0; d <= full; ++d) {
    if ((d & om) || std::popcount(d) != v1 + 1) continue;
    low3 = std::min(low3, sigma_sq<S>(cols(phi, from_mask(om | d)), order));
  }
  t.a3 = low3 / maxcol;
  return t;
}

struct T4 {
  double alpha, beta, min37;
};

/// Minima over Gamma subsets of Omega of projected-column singular values.
template <typename S>
T4 theorem4(const Mat<S>& phi, const IndexSet& omega, Index r) {
  const Index n = phi.cols();
  const Index k = static_cast<Index>(omega.size());
  const std::uint64_t om = to_mask(omega);
  T4 t{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
       std::numeric_limits<double>::infinity()};
  for (std::uint64_t g = 0; g <= om; ++g) {
    if ((g & ~om) != 0) continue;
    const Index gs = std::popcount(g);
    if (gs > k - r) continue;
    const IndexSet gamma = from_mask(g);
    const Mat<S> d = dotted(phi, gamma);
    const std::uint64_t rest = om & ~g;
    const Index p = std::popcount(rest);
    if (gs < k - r) t.alpha = std::min(t.alpha, std::sqrt(sigma_sq<S>(cols(d, from_mask(rest)), p)));
    for (Index i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (om & bit) continue;
      const double v = sigma_sq<S>(cols(d, from_mask(rest | bit)), p + 1);
      if (gs < k - r) t.beta = std::min(t.beta, std::sqrt(v));
      if (gs == k - r) t.min37 = std::min(t.min37, v);
    }
  }
  return t;
}

/// Gaussian test matrix from an independent std::mt19937_64 stream.
inline Eigen::MatrixXd gaussian(Index m, Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = nd(gen);
  return a;
}

inline Eigen::MatrixXcd complex_gaussian(Index m, Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = {nd(gen), nd(gen)};
  return a;
}

inline IndexSet random_subset(Index n, Index k, std::mt19937_64& gen) {
  IndexSet all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  std::shuffle(all.begin(), all.end(), gen);
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace oracle
