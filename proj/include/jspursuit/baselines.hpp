#pragma once

// Comparison solvers: MUSIC, SA-MUSIC+OSMP and SOMP.

#include "jspursuit/pursuit.hpp"

namespace jspursuit {

namespace detail {

/// ||P_S phi_i|| / ||phi_i|| for every column; zero columns score 0.
template <typename Scalar>
std::vector<double> music_scores(const Mat<Scalar>& basis, const Mat<Scalar>& phi) {
  const Mat<Scalar> coeff = basis.adjoint() * phi;
  std::vector<double> s(static_cast<std::size_t>(phi.cols()));
  for (Index i = 0; i < phi.cols(); ++i) {
    const double ni = phi.col(i).norm();
    s[static_cast<std::size_t>(i)] = ni > 0.0 ? coeff.col(i).norm() / ni : 0.0;
  }
  return s;
}

inline IndexSet top_k(const IndexSet& candidates, const std::vector<double>& score_of_all, Index k) {
  std::vector<double> v;
  v.reserve(candidates.size());
  for (Index i : candidates) v.push_back(score_of_all[static_cast<std::size_t>(i)]);
  IndexSet order = rank_descending(candidates, v);
  order.resize(static_cast<std::size_t>(k));
  return order;
}

template <typename Scalar>
RecoveryResult<Scalar> finish(const RecoveryProblem<Scalar>& problem, IndexSet support, const Stopwatch& clock) {
  RecoveryResult<Scalar> res;
  res.omega_hat = sorted(std::move(support));
  res.x_hat = refit_on_support(problem.phi, problem.y, res.omega_hat, &res.rank_deficient);
  for (Index i : res.omega_hat) res.zeta.push_back(res.x_hat.row(i).norm());
  res.runtime_ms = clock.elapsed_ms();
  return res;
}

}  // namespace detail

/// MUSIC: the k columns best aligned with the estimated signal subspace.
template <typename Scalar>
RecoveryResult<Scalar> music(const RecoveryProblem<Scalar>& problem, Index k, const PursuitParams& params = {}) {
  detail::check_problem(problem);
  require(k >= 1 && k <= problem.n(), ErrorKind::invalid_spec, "music: k must be in [1, n]");
  detail::Stopwatch clock;
  const auto s_hat = estimate_signal_subspace(problem.y, params.rank_policy);
  const auto score = detail::music_scores(s_hat.basis, problem.phi);
  return detail::finish(problem, detail::top_k(complement({}, problem.n()), score, k), clock);
}

/// SA-MUSIC+OSMP: k - r indices from submp, then the remaining r by MUSIC
/// scoring against the augmented subspace R(Phi_Gamma) + S_hat.
template <typename Scalar>
RecoveryResult<Scalar> sa_music_osmp(const RecoveryProblem<Scalar>& problem, Index k,
                                     const PursuitParams& params = {}) {
  detail::check_problem(problem);
  require(k >= 1 && k <= problem.n(), ErrorKind::invalid_spec, "sa_music_osmp: k must be in [1, n]");
  detail::Stopwatch clock;
  const auto s_hat = estimate_signal_subspace(problem.y, params.rank_policy);
  const Index r = std::min(s_hat.dim(), k);
  IndexSet gamma;
  if (k > r) gamma = submp(s_hat, problem.phi, {}, k - r, params);

  Mat<Scalar> basis = s_hat.basis;
  if (!gamma.empty()) {
    Mat<Scalar> augmented(problem.m(), static_cast<Index>(gamma.size()) + s_hat.dim());
    augmented << select_cols(problem.phi, gamma), s_hat.basis;
    basis = range_basis(augmented);
  }
  const auto score = detail::music_scores(basis, problem.phi);
  IndexSet support = gamma;
  for (Index i : detail::top_k(complement(gamma, problem.n()), score, r)) support.push_back(i);
  return detail::finish(problem, std::move(support), clock);
}

/// Simultaneous OMP: k greedy picks of argmax ||phi_i^* R|| / ||phi_i|| with
/// R the least-squares residual of Y on the current support.
template <typename Scalar>
RecoveryResult<Scalar> somp(const RecoveryProblem<Scalar>& problem, Index k, const PursuitParams& params = {}) {
  detail::check_problem(problem);
  require(k >= 1 && k <= std::min(problem.m(), problem.n()), ErrorKind::invalid_spec,
          "somp: k must be in [1, min(m, n)]");
  detail::Stopwatch clock;
  const Index n = problem.n();
  RealVec col_norm(n);
  for (Index i = 0; i < n; ++i) col_norm(i) = problem.phi.col(i).norm();

  IndexSet support;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<double> score(static_cast<std::size_t>(n));
  Mat<Scalar> residual = problem.y;
  for (Index step = 0; step < k; ++step) {
    const Mat<Scalar> corr = problem.phi.adjoint() * residual;
    for (Index i = 0; i < n; ++i) {
      const bool ok = !taken[static_cast<std::size_t>(i)] && col_norm(i) > 0.0;
      score[static_cast<std::size_t>(i)] = ok ? corr.row(i).norm() / col_norm(i) : -1.0;
    }
    const Index pick = detail::select_best(score, params.tie_tol * std::max(1.0, problem.y.norm()));
    require(pick >= 0, ErrorKind::exhausted_candidates, "somp: no admissible column");
    support.push_back(pick);
    taken[static_cast<std::size_t>(pick)] = true;
    const Mat<Scalar> phi_s = select_cols(problem.phi, support);
    residual = problem.y - phi_s * least_squares_rows<Scalar>(phi_s, problem.y);
  }
  return detail::finish(problem, std::move(support), clock);
}

}  // namespace jspursuit
