#pragma once

// Greedy subspace pursuit: the submp selection kernel, OSMP, the two-stage
// TSMP variants with their ESMS pruning steps, and the QR formulation of
// TSMP_1.

#include "jspursuit/core.hpp"
#include "jspursuit/subspace.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>
#include <vector>

namespace jspursuit {

struct PursuitParams {
  RankPolicy rank_policy = RankPolicy::automatic();
  /// A candidate whose residual ||P_perp phi_l|| is at most zero_col_tol * ||phi_l||
  /// lies in R(Phi_Gamma) and cannot be selected.
  double zero_col_tol = 1e-12;
  /// Scores within tie_tol of the best are ties; the lowest index wins.
  double tie_tol = 1e-10;
  /// Directions of the projected subspace with singular value <= subspace_tol are dropped.
  double subspace_tol = 1e-9;

  void validate() const {
    rank_policy.validate();
    require(zero_col_tol > 0.0, ErrorKind::config, "zero_col_tol must be > 0");
    require(tie_tol >= 0.0, ErrorKind::config, "tie_tol must be >= 0");
    require(subspace_tol > 0.0, ErrorKind::config, "subspace_tol must be > 0");
  }
};

template <typename Scalar>
struct RecoveryResult {
  IndexSet omega_hat;                 // sorted
  std::optional<IndexSet> omega_c;    // selection order
  Mat<Scalar> x_hat;                  // n x l, zero outside omega_hat
  std::vector<double> zeta;           // aligned with omega_c if present, else omega_hat
  double runtime_ms = 0.0;
  bool rank_deficient = false;
  std::vector<std::string> warnings;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Scores < 0 mark inadmissible candidates. Returns -1 when none is admissible.
inline Index select_best(const std::vector<double>& score, double tie_tol) {
  double best = -1.0;
  for (double s : score) best = std::max(best, s);
  if (best < 0.0) return -1;
  for (std::size_t i = 0; i < score.size(); ++i)
    if (score[i] >= 0.0 && score[i] >= best - tie_tol) return static_cast<Index>(i);
  return -1;
}

/// Indices of `j` ordered by descending value, lowest index first on ties.
inline IndexSet rank_descending(const IndexSet& j, const std::vector<double>& value) {
  std::vector<std::size_t> order(j.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (value[a] != value[b]) return value[a] > value[b];
    return j[a] < j[b];
  });
  IndexSet out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(j[i]);
  return out;
}

inline void check_index_set(const IndexSet& s, Index n, const char* what) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Index i : s) {
    require(i >= 0 && i < n, ErrorKind::invalid_dimension, std::string(what) + ": index out of range");
    require(!seen[static_cast<std::size_t>(i)], ErrorKind::invalid_spec, std::string(what) + ": duplicate index");
    seen[static_cast<std::size_t>(i)] = true;
  }
}

template <typename Scalar>
void check_problem(const RecoveryProblem<Scalar>& p) {
  require(p.phi.rows() >= 1 && p.phi.cols() >= 1, ErrorKind::invalid_dimension, "phi must be non-empty");
  require(p.y.rows() == p.phi.rows(), ErrorKind::dimension_mismatch, "phi.rows != y.rows");
  require(p.y.cols() >= 1, ErrorKind::invalid_dimension, "y must have at least one column");
}

}  // namespace detail

/// Minimum-Frobenius-norm minimizer of ||Y - Phi_J X||_F.
template <typename Scalar>
Mat<Scalar> least_squares_rows(const Mat<Scalar>& phi_j, const Mat<Scalar>& y, bool* rank_deficient = nullptr) {
  require(phi_j.rows() == y.rows(), ErrorKind::dimension_mismatch, "least_squares_rows: row mismatch");
  if (phi_j.cols() == 0) {
    if (rank_deficient) *rank_deficient = false;
    return Mat<Scalar>(0, y.cols());
  }
  Eigen::CompleteOrthogonalDecomposition<Mat<Scalar>> cod(phi_j);
  if (rank_deficient) *rank_deficient = cod.rank() < phi_j.cols();
  return cod.solve(y);
}

/// n x l matrix holding Phi_S^dagger Y on rows `support`, zero elsewhere.
template <typename Scalar>
Mat<Scalar> refit_on_support(const Mat<Scalar>& phi, const Mat<Scalar>& y, const IndexSet& support,
                             bool* rank_deficient = nullptr) {
  Mat<Scalar> x = Mat<Scalar>::Zero(phi.cols(), y.cols());
  const Mat<Scalar> rows = least_squares_rows<Scalar>(select_cols(phi, support), y, rank_deficient);
  for (std::size_t i = 0; i < support.size(); ++i) x.row(support[i]) = rows.row(static_cast<Index>(i));
  return x;
}

/// submp(S_hat, Gamma0, s): s greedy selections, each maximizing
/// ||P_{R(P_perp S_hat)} phi_l|| / ||P_perp phi_l|| with P_perp the projector
/// onto R(Phi_Gamma)^perp. Returns the new indices in selection order.
///
/// R(Phi_Gamma) is tracked by an incrementally grown orthonormal basis and the
/// candidate residuals P_perp phi_l are deflated one direction per step. An
/// orthonormal basis of P_perp S_hat is updated alongside: removing a unit
/// direction q changes at most one of its singular values, to sqrt(1 - |c|^2)
/// with c = U^* q, so a Householder rotation of U isolates that direction.
template <typename Scalar>
IndexSet submp(const SubspaceBasis<Scalar>& s_hat, const Mat<Scalar>& phi, const IndexSet& gamma0, Index s,
               const PursuitParams& params = {}) {
  params.validate();
  const Index m = phi.rows();
  const Index n = phi.cols();
  require(s_hat.ambient() == m, ErrorKind::dimension_mismatch, "submp: subspace and phi row mismatch");
  require(s >= 1, ErrorKind::invalid_spec, "submp: s must be >= 1");
  require(static_cast<Index>(gamma0.size()) + s <= n, ErrorKind::exhausted_candidates, "submp: |gamma0| + s > n");
  detail::check_index_set(gamma0, n, "submp gamma0");

  RealVec col_norm(n);
  for (Index j = 0; j < n; ++j) col_norm(j) = phi.col(j).norm();

  Mat<Scalar> residual = phi;  // P_perp Phi, kept current
  Mat<Scalar> q_basis(m, 0);
  Mat<Scalar> ub;             // orthonormal basis of P_perp S_hat
  bool ub_ready = false;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);

  auto deflate_subspace = [&](const Vec<Scalar>& q) {
    const Index d = ub.cols();
    if (d == 0) return;
    Vec<Scalar> c = ub.adjoint() * q;
    const double nc = c.norm();
    if (nc == 0.0) return;
    Vec<Scalar> essential(std::max<Index>(d - 1, 0));
    Scalar tau;
    double beta;
    c.makeHouseholder(essential, tau, beta);
    // H = I - tau v v^* with v = (1, essential) maps c onto beta e_1, so the
    // rotated basis ub H^* carries all of q's component in its first column.
    Vec<Scalar> v(d);
    v(0) = Scalar(1);
    v.tail(d - 1) = essential;
    Mat<Scalar> rotated = ub - (ub * v) * (Eigen::numext::conj(tau) * v.adjoint());
    Mat<Scalar> rest = rotated.rightCols(d - 1);
    rest -= q * (q.adjoint() * rest);
    // The lead column is orthogonal to q and to `rest` in exact arithmetic, so
    // projecting both out only removes rounding. Without this, a lead whose
    // true norm is zero survives at the drift level and is normalized into a
    // spurious direction.
    Vec<Scalar> lead = rotated.col(0);
    for (int pass = 0; pass < 2; ++pass) {
      lead -= q * (q.adjoint() * lead);
      if (d > 1) lead -= rest * (rest.adjoint() * lead);
    }
    const double sigma = lead.norm();
    Mat<Scalar> next(m, d);
    Index cols = 0;
    if (sigma > params.subspace_tol) next.col(cols++) = lead / sigma;
    next.middleCols(cols, d - 1) = rest;
    ub = next.leftCols(cols + d - 1);
  };

  auto absorb = [&](Index j) {
    Vec<Scalar> v = residual.col(j);
    // Two Gram-Schmidt passes keep Q orthonormal to working precision.
    if (q_basis.cols() > 0)
      for (int pass = 0; pass < 2; ++pass) v -= q_basis * (q_basis.adjoint() * v);
    const double nv = v.norm();
    if (!(nv > params.zero_col_tol * col_norm(j))) return;
    v /= nv;
    const Index c = q_basis.cols();
    q_basis.conservativeResize(Eigen::NoChange, c + 1);
    q_basis.col(c) = v;
    residual.noalias() -= v * (v.adjoint() * residual);
    if (ub_ready) deflate_subspace(v);
  };

  for (Index j : gamma0) {
    taken[static_cast<std::size_t>(j)] = true;
    absorb(j);
  }
  {
    Mat<Scalar> projected = s_hat.basis;
    if (q_basis.cols() > 0) projected -= q_basis * (q_basis.adjoint() * s_hat.basis);
    ub = orthonormal_basis(projected, params.subspace_tol);
    ub_ready = true;
  }

  IndexSet picked;
  picked.reserve(static_cast<std::size_t>(s));
  std::vector<double> score(static_cast<std::size_t>(n));
  for (Index step = 0; step < s; ++step) {
    const Mat<Scalar> coeff = ub.adjoint() * residual;  // d x n

    for (Index l = 0; l < n; ++l) {
      auto& sc = score[static_cast<std::size_t>(l)];
      if (taken[static_cast<std::size_t>(l)]) {
        sc = -1.0;
        continue;
      }
      const double rn = residual.col(l).norm();
      if (!(rn > params.zero_col_tol * col_norm(l))) {
        sc = -1.0;
        continue;
      }
      sc = ub.cols() > 0 ? std::min(1.0, coeff.col(l).norm() / rn) : 0.0;
    }
    const Index best = detail::select_best(score, params.tie_tol);
    require(best >= 0, ErrorKind::exhausted_candidates,
            "submp: only " + std::to_string(step) + " of " + std::to_string(s) + " admissible selections");
    picked.push_back(best);
    taken[static_cast<std::size_t>(best)] = true;
    absorb(best);
  }
  return picked;
}

template <typename Scalar>
struct EsmsResult {
  IndexSet q;                // sorted
  Mat<Scalar> x_hat;         // n x l
  std::vector<double> zeta;  // row norms of Phi_J^dagger Y, aligned with j
  bool rank_deficient = false;
};

namespace detail {

template <typename Scalar>
std::vector<double> pool_row_norms(const Mat<Scalar>& phi, const Mat<Scalar>& y, const IndexSet& j,
                                   bool& rank_deficient) {
  const Mat<Scalar> xbar = least_squares_rows<Scalar>(select_cols(phi, j), y, &rank_deficient);
  std::vector<double> zeta(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) zeta[i] = xbar.row(static_cast<Index>(i)).norm();
  return zeta;
}

}  // namespace detail

/// ESMS_1: keep the k rows of Phi_J^dagger Y with the largest l2 norms, then refit.
template <typename Scalar>
EsmsResult<Scalar> esms1(const Mat<Scalar>& phi, const Mat<Scalar>& y, const IndexSet& j, Index k) {
  require(phi.rows() == y.rows(), ErrorKind::dimension_mismatch, "esms1: phi.rows != y.rows");
  detail::check_index_set(j, phi.cols(), "esms1 pool");
  require(k >= 0 && k <= static_cast<Index>(j.size()), ErrorKind::invalid_spec, "esms1: k > |J|");
  EsmsResult<Scalar> out;
  out.zeta = detail::pool_row_norms(phi, y, j, out.rank_deficient);
  IndexSet order = detail::rank_descending(j, out.zeta);
  order.resize(static_cast<std::size_t>(k));
  out.q = sorted(std::move(order));
  bool refit_deficient = false;
  out.x_hat = refit_on_support(phi, y, out.q, &refit_deficient);
  out.rank_deficient = out.rank_deficient || refit_deficient;
  return out;
}

/// ESMS_2: keep rows of Phi_J^dagger Y whose l2 norm exceeds kappa, then refit.
template <typename Scalar>
EsmsResult<Scalar> esms2(const Mat<Scalar>& phi, const Mat<Scalar>& y, const IndexSet& j, double kappa) {
  require(phi.rows() == y.rows(), ErrorKind::dimension_mismatch, "esms2: phi.rows != y.rows");
  require(kappa > 0.0, ErrorKind::domain, "esms2: kappa must be > 0");
  detail::check_index_set(j, phi.cols(), "esms2 pool");
  EsmsResult<Scalar> out;
  out.zeta = detail::pool_row_norms(phi, y, j, out.rank_deficient);
  for (std::size_t i = 0; i < j.size(); ++i)
    if (out.zeta[i] > kappa) out.q.push_back(j[i]);
  out.q = sorted(std::move(out.q));
  bool refit_deficient = false;
  out.x_hat = refit_on_support(phi, y, out.q, &refit_deficient);
  out.rank_deficient = out.rank_deficient || refit_deficient;
  return out;
}

/// OSMP(k): subspace estimate, then submp(S_hat, {}, k) and a least-squares refit.
template <typename Scalar>
RecoveryResult<Scalar> osmp(const RecoveryProblem<Scalar>& problem, Index k, const PursuitParams& params = {}) {
  detail::check_problem(problem);
  require(k >= 1 && k <= std::min(problem.m() - 1, problem.n()), ErrorKind::invalid_spec,
          "osmp: k must be in [1, min(m-1, n)]");
  detail::Stopwatch clock;
  RecoveryResult<Scalar> res;
  const auto s_hat = estimate_signal_subspace(problem.y, params.rank_policy);
  res.omega_hat = sorted(submp(s_hat, problem.phi, {}, k, params));
  res.x_hat = refit_on_support(problem.phi, problem.y, res.omega_hat, &res.rank_deficient);
  for (Index i : res.omega_hat) res.zeta.push_back(res.x_hat.row(i).norm());
  res.runtime_ms = clock.elapsed_ms();
  return res;
}

namespace detail {

template <typename Scalar>
IndexSet tsmp_pool(const RecoveryProblem<Scalar>& problem, const PursuitParams& params) {
  const Index pool = problem.m() - 1;
  require(pool >= 1, ErrorKind::invalid_dimension, "tsmp: m must be >= 2");
  require(problem.n() >= pool, ErrorKind::exhausted_candidates, "tsmp: n < m - 1");
  const auto s_hat = estimate_signal_subspace(problem.y, params.rank_policy);
  return submp(s_hat, problem.phi, {}, pool, params);
}

template <typename Scalar>
RecoveryResult<Scalar> from_esms(IndexSet omega_c, EsmsResult<Scalar> e) {
  RecoveryResult<Scalar> res;
  res.omega_c = std::move(omega_c);
  res.omega_hat = std::move(e.q);
  res.x_hat = std::move(e.x_hat);
  res.zeta = std::move(e.zeta);
  res.rank_deficient = e.rank_deficient;
  if (res.rank_deficient) res.warnings.push_back("rank-deficient candidate pool; minimum-norm solution used");
  return res;
}

}  // namespace detail

/// TSMP_1(k): pool of m-1 submp candidates, pruned to k by ESMS_1.
template <typename Scalar>
RecoveryResult<Scalar> tsmp1(const RecoveryProblem<Scalar>& problem, Index k, const PursuitParams& params = {}) {
  detail::check_problem(problem);
  require(k >= 1 && k <= problem.m() - 1, ErrorKind::invalid_spec, "tsmp1: k must be in [1, m-1]");
  detail::Stopwatch clock;
  IndexSet omega_c = detail::tsmp_pool(problem, params);
  auto res = detail::from_esms(omega_c, esms1(problem.phi, problem.y, omega_c, k));
  res.runtime_ms = clock.elapsed_ms();
  return res;
}

/// TSMP_2(kappa): pool of m-1 submp candidates, thresholded by ESMS_2.
template <typename Scalar>
RecoveryResult<Scalar> tsmp2(const RecoveryProblem<Scalar>& problem, double kappa, const PursuitParams& params = {}) {
  detail::check_problem(problem);
  require(kappa > 0.0, ErrorKind::domain, "tsmp2: kappa must be > 0");
  detail::Stopwatch clock;
  IndexSet omega_c = detail::tsmp_pool(problem, params);
  auto res = detail::from_esms(omega_c, esms2(problem.phi, problem.y, omega_c, kappa));
  if (res.omega_hat.empty()) res.warnings.push_back("empty-support: no zeta exceeds kappa");
  res.runtime_ms = clock.elapsed_ms();
  return res;
}

/// Picks kappa at the midpoint of the largest gap between sorted scores.
inline double kappa_largest_gap(std::vector<double> zeta) {
  require(zeta.size() >= 2, ErrorKind::domain, "kappa_largest_gap: need at least two scores");
  std::sort(zeta.begin(), zeta.end(), std::greater<>());
  std::size_t at = 0;
  double gap = -1.0;
  for (std::size_t i = 0; i + 1 < zeta.size(); ++i) {
    if (zeta[i] - zeta[i + 1] > gap) {
      gap = zeta[i] - zeta[i + 1];
      at = i;
    }
  }
  const double kappa = 0.5 * (zeta[at] + zeta[at + 1]);
  require(kappa > 0.0, ErrorKind::domain, "kappa_largest_gap: all scores are zero");
  return kappa;
}

/// Root-mean-square of ||(Phi_J^dagger W)^{i}||_2 over i in J for W with
/// i.i.d. entries of energy noise_sigma^2 and `l` columns.
template <typename Scalar>
double kappa_noise_level(const Mat<Scalar>& phi, const IndexSet& j, double noise_sigma, Index l) {
  require(noise_sigma > 0.0 && l >= 1, ErrorKind::domain, "kappa_noise_level: sigma > 0 and l >= 1 required");
  require(!j.empty(), ErrorKind::domain, "kappa_noise_level: empty pool");
  const Mat<Scalar> phi_j = select_cols(phi, j);
  Eigen::CompleteOrthogonalDecomposition<Mat<Scalar>> cod(phi_j);
  const Mat<Scalar> pinv = cod.pseudoInverse();
  const double mean_sq = pinv.rowwise().squaredNorm().mean();
  return noise_sigma * std::sqrt(static_cast<double>(l) * mean_sq);
}

/// TSMP_1(k) as the QR-decomposition algorithm: residual projector
/// A = I - Q2 Q2^* over normalized columns, normal-equation solves via R factors.
template <typename Scalar>
RecoveryResult<Scalar> tsmp1_qr(const RecoveryProblem<Scalar>& problem, Index k, const PursuitParams& params = {}) {
  detail::check_problem(problem);
  params.validate();
  const Index m = problem.m();
  const Index n = problem.n();
  require(k >= 1 && k <= m - 1, ErrorKind::invalid_spec, "tsmp1_qr: k must be in [1, m-1]");
  require(n >= m - 1, ErrorKind::exhausted_candidates, "tsmp1_qr: n < m - 1");
  detail::Stopwatch clock;

  const Mat<Scalar> u_y = estimate_signal_subspace(problem.y, params.rank_policy).basis;

  Mat<Scalar> phi_bar = problem.phi;
  std::vector<bool> usable(static_cast<std::size_t>(n), true);
  for (Index j = 0; j < n; ++j) {
    const double nj = phi_bar.col(j).norm();
    if (nj > 0.0)
      phi_bar.col(j) /= nj;
    else
      usable[static_cast<std::size_t>(j)] = false;
  }

  Mat<Scalar> a = Mat<Scalar>::Identity(m, m);
  IndexSet gamma;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<double> score(static_cast<std::size_t>(n));

  for (Index step = 0; step < m - 1; ++step) {
    // QR of A U_y; its rank-revealing pivots decide which directions survive.
    Eigen::ColPivHouseholderQR<Mat<Scalar>> qr1(a * u_y);
    Index rank = 0;
    const Index diag = std::min(qr1.matrixQR().rows(), qr1.matrixQR().cols());
    while (rank < diag && std::abs(qr1.matrixQR()(rank, rank)) > params.subspace_tol) ++rank;
    const Mat<Scalar> q1 = Mat<Scalar>(qr1.householderQ()).leftCols(rank);

    const Mat<Scalar> t = a * phi_bar;
    const Mat<Scalar> proj = q1.adjoint() * t;
    for (Index b = 0; b < n; ++b) {
      auto& sc = score[static_cast<std::size_t>(b)];
      const double tn = t.col(b).norm();
      if (taken[static_cast<std::size_t>(b)] || !usable[static_cast<std::size_t>(b)] ||
          !(tn > params.zero_col_tol)) {
        sc = -1.0;
        continue;
      }
      sc = rank > 0 ? std::min(1.0, proj.col(b).norm() / tn) : 0.0;
    }
    const Index pick = detail::select_best(score, params.tie_tol);
    require(pick >= 0, ErrorKind::exhausted_candidates, "tsmp1_qr: no admissible candidate");
    gamma.push_back(pick);
    taken[static_cast<std::size_t>(pick)] = true;

    Eigen::HouseholderQR<Mat<Scalar>> qr2(select_cols(phi_bar, gamma));
    const Index g = static_cast<Index>(gamma.size());
    const Mat<Scalar> q2 = qr2.householderQ() * Mat<Scalar>::Identity(m, g);
    a = Mat<Scalar>::Identity(m, m) - q2 * q2.adjoint();
  }

  // (R^* R)^{-1} Phi_J^* Y through two triangular solves.
  auto normal_solve = [&](const IndexSet& j) -> Mat<Scalar> {
    const Mat<Scalar> phi_j = select_cols(problem.phi, j);
    Eigen::HouseholderQR<Mat<Scalar>> qr(phi_j);
    const Index c = phi_j.cols();
    const Mat<Scalar> r = qr.matrixQR().topRows(c).template triangularView<Eigen::Upper>();
    Mat<Scalar> rhs = phi_j.adjoint() * problem.y;
    r.adjoint().template triangularView<Eigen::Lower>().solveInPlace(rhs);
    r.template triangularView<Eigen::Upper>().solveInPlace(rhs);
    return rhs;
  };

  RecoveryResult<Scalar> res;
  res.omega_c = gamma;
  const Mat<Scalar> xbar = normal_solve(gamma);
  res.zeta.resize(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) res.zeta[i] = xbar.row(static_cast<Index>(i)).norm();
  IndexSet order = detail::rank_descending(gamma, res.zeta);
  order.resize(static_cast<std::size_t>(k));
  res.omega_hat = sorted(std::move(order));

  const Mat<Scalar> xq = normal_solve(res.omega_hat);
  res.x_hat = Mat<Scalar>::Zero(n, problem.l());
  for (std::size_t i = 0; i < res.omega_hat.size(); ++i)
    res.x_hat.row(res.omega_hat[i]) = xq.row(static_cast<Index>(i));
  if (!res.x_hat.allFinite()) {
    // Singular R factor: fall back to the minimum-norm path.
    res.rank_deficient = true;
    res.warnings.push_back("singular R factor; minimum-norm solution used");
    res.x_hat = refit_on_support(problem.phi, problem.y, res.omega_hat);
  }
  res.runtime_ms = clock.elapsed_ms();
  return res;
}

}  // namespace jspursuit
