#pragma once

// Recoverability measures: Kruskal rank, coherence, LCP, WRIP, row
// nondegeneracy, the uniqueness conditions and the theorem-condition checkers.
// All combinatorial quantities are exact enumerations guarded by a budget.

#include "jspursuit/core.hpp"
#include "jspursuit/subspace.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>

namespace jspursuit {

struct EnumerationBudget {
  Index max_n = 24;
  std::uint64_t max_subsets = 20'000'000;
};

/// C(n, q), saturating at uint64 max.
inline std::uint64_t binomial(Index n, Index q) {
  if (q < 0 || q > n) return 0;
  q = std::min(q, n - q);
  std::uint64_t c = 1;
  for (Index i = 1; i <= q; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - q + i);
    if (c > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

/// Calls fn(subset) for every q-subset of `pool` in lexicographic order;
/// stops early when fn returns false. Returns false iff stopped early.
inline bool for_each_subset(const IndexSet& pool, Index q, const std::function<bool(const IndexSet&)>& fn) {
  const Index p = static_cast<Index>(pool.size());
  if (q < 0 || q > p) return true;
  std::vector<Index> pos(static_cast<std::size_t>(q));
  for (Index i = 0; i < q; ++i) pos[static_cast<std::size_t>(i)] = i;
  IndexSet subset(static_cast<std::size_t>(q));
  while (true) {
    for (Index i = 0; i < q; ++i) subset[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
    if (!fn(subset)) return false;
    Index i = q - 1;
    while (i >= 0 && pos[static_cast<std::size_t>(i)] == p - q + i) --i;
    if (i < 0) return true;
    ++pos[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < q; ++j) pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
  }
}

namespace detail {

inline void charge(std::uint64_t& used, std::uint64_t more, const EnumerationBudget& budget, const char* what) {
  require(more <= budget.max_subsets && used <= budget.max_subsets - more, ErrorKind::size_guard,
          std::string(what) + ": enumeration exceeds budget of " + std::to_string(budget.max_subsets) + " subsets");
  used += more;
}

inline void guard_n(Index n, const EnumerationBudget& budget, const char* what) {
  require(n <= budget.max_n, ErrorKind::size_guard,
          std::string(what) + ": n=" + std::to_string(n) + " exceeds max_n=" + std::to_string(budget.max_n));
}

/// sigma_p(A)^2 with the convention sigma_p = 0 when p > rows.
template <typename Scalar>
double sigma_sq_at(const Mat<Scalar>& a, Index p) {
  if (p > a.rows() || p > a.cols() || p < 1) return 0.0;
  const RealVec s = singular_values(a);
  return s(p - 1) * s(p - 1);
}

/// P_perp columns of A for R(A_gamma), normalized; zero where the residual vanishes.
template <typename Scalar>
Mat<Scalar> dotted_columns(const Mat<Scalar>& a, const IndexSet& gamma, double zero_tol = 1e-12) {
  Mat<Scalar> p = a;
  if (!gamma.empty()) {
    const Mat<Scalar> q = range_basis(select_cols(a, gamma));
    if (q.cols() > 0) p -= q * (q.adjoint() * a);
  }
  for (Index i = 0; i < p.cols(); ++i) {
    const double ni = p.col(i).norm();
    if (ni > zero_tol * a.col(i).norm() && ni > 0.0)
      p.col(i) /= ni;
    else
      p.col(i).setZero();
  }
  return p;
}

template <typename Scalar>
double max_abs_inner(const Mat<Scalar>& cols, const IndexSet& idx) {
  double mu = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      mu = std::max(mu, std::abs(cols.col(idx[a]).dot(cols.col(idx[b]))));
  return mu;
}

inline IndexSet set_union(IndexSet a, const IndexSet& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace detail

/// Largest q such that every q columns have sigma_min > 1e-10 * sigma_1(A).
template <typename Scalar>
Index krank(const Mat<Scalar>& a, const EnumerationBudget& budget = {}) {
  const Index n = a.cols();
  detail::guard_n(n, budget, "krank");
  for (Index i = 0; i < n; ++i)
    if (a.col(i).norm() == 0.0) return 0;
  const RealVec s = singular_values(a);
  const double tol = 1e-10 * (s.size() ? s(0) : 0.0);
  const Index qmax = std::min(a.rows(), n);
  const IndexSet all = complement({}, n);
  std::uint64_t used = 0;
  for (Index q = 1; q <= qmax; ++q) {
    detail::charge(used, binomial(n, q), budget, "krank");
    const bool all_independent =
        for_each_subset(all, q, [&](const IndexSet& k) { return sigma_min(select_cols(a, k)) > tol; });
    if (!all_independent) return q - 1;
  }
  return qmax;
}

/// max_{i != j} |<a_i/||a_i||, a_j/||a_j||>|.
template <typename Scalar>
double mutual_coherence(const Mat<Scalar>& a) {
  require(a.cols() >= 2, ErrorKind::insufficient_pairs, "mutual_coherence: need at least two columns");
  for (Index i = 0; i < a.cols(); ++i)
    require(a.col(i).norm() > 0.0, ErrorKind::zero_column, "mutual_coherence: zero column " + std::to_string(i));
  return detail::max_abs_inner(detail::dotted_columns(a, {}), complement({}, a.cols()));
}

/// Locally mutual coherence mu(Delta, Gamma) of the P_perp-projected, normalized columns.
template <typename Scalar>
double lcp(const Mat<Scalar>& a, const IndexSet& delta, const IndexSet& gamma) {
  const IndexSet pairs = set_minus(delta, gamma);
  require(pairs.size() >= 2, ErrorKind::insufficient_pairs, "lcp: |Delta \\ Gamma| < 2");
  for (Index i : detail::set_union(delta, gamma))
    require(i >= 0 && i < a.cols(), ErrorKind::invalid_dimension, "lcp: index out of range");
  return detail::max_abs_inner(detail::dotted_columns(a, gamma), pairs);
}

struct WripResult {
  double delta = 0.0;
  double c = 0.0;
  double kappa = 0.0;
  bool exhaustive = true;
  std::uint64_t subsets = 0;
};

/// delta_a(A_J; b) = (1 - kappa(J)) / (1 + kappa(J)) over all K containing J
/// with |K| = |J| + b, plus the scalar c that attains it.
template <typename Scalar>
WripResult wrip_constant(const Mat<Scalar>& a, const IndexSet& j, Index b, const EnumerationBudget& budget = {}) {
  const Index n = a.cols();
  detail::guard_n(n, budget, "wrip_constant");
  require(b >= 0 && static_cast<Index>(j.size()) + b <= n, ErrorKind::invalid_spec, "wrip_constant: |J| + b > n");
  const IndexSet base = sorted(j);
  const IndexSet rest = set_minus(complement({}, n), base);
  WripResult out;
  std::uint64_t used = 0;
  detail::charge(used, binomial(static_cast<Index>(rest.size()), b), budget, "wrip_constant");
  const Index order = static_cast<Index>(base.size()) + b;
  double low = kInfinity;
  double high = 0.0;
  for_each_subset(rest, b, [&](const IndexSet& extra) {
    const Mat<Scalar> ak = select_cols(a, detail::set_union(base, extra));
    const RealVec s = singular_values(ak);
    const double top = s.size() ? s(0) * s(0) : 0.0;
    const double bottom = order <= a.rows() && s.size() ? s(order - 1) * s(order - 1) : 0.0;
    low = std::min(low, bottom);
    high = std::max(high, top);
    ++out.subsets;
    return true;
  });
  out.kappa = high > 0.0 ? low / high : 0.0;
  out.delta = (1.0 - out.kappa) / (1.0 + out.kappa);
  out.c = 0.5 * (low + high);
  return out;
}

/// delta_s: the RIP constant of order s under the optimal scaling c.
template <typename Scalar>
WripResult rip_constant(const Mat<Scalar>& a, Index s, const EnumerationBudget& budget = {}) {
  return wrip_constant(a, {}, s, budget);
}

/// krank(X^*) == rank(X).
template <typename Scalar>
bool row_nondegenerate(const Mat<Scalar>& x, const EnumerationBudget& budget = {}) {
  const Mat<Scalar> xt = x.adjoint();
  return krank(xt, budget) == numerical_rank(x, 1e-10);
}

struct UniquenessReport {
  Index krank = 0;
  bool l0_ok = false;  // krank(Phi) > 2k - rank(X)
  bool k1_ok = false;  // krank(Phi) >= k + 1
};

template <typename Scalar>
UniquenessReport uniqueness_oracles(const Mat<Scalar>& phi, Index k, Index rank_x,
                                    const EnumerationBudget& budget = {}) {
  UniquenessReport r;
  r.krank = krank(phi, budget);
  r.l0_ok = r.krank > 2 * k - rank_x;
  r.k1_ok = r.krank >= k + 1;
  return r;
}

struct Theorem3Quantities {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

/// a1(v1) = delta_k(Phi_Omega; v1+1); a2(v1), a3(v1) by exhaustive enumeration
/// of Delta subsets outside Omega.
template <typename Scalar>
Theorem3Quantities theorem3_quantities(const Mat<Scalar>& phi, const IndexSet& omega, Index v1,
                                       const EnumerationBudget& budget = {}) {
  const Index n = phi.cols();
  detail::guard_n(n, budget, "theorem3_quantities");
  const IndexSet om = sorted(omega);
  const Index k = static_cast<Index>(om.size());
  const IndexSet outside = set_minus(complement({}, n), om);
  require(v1 >= 0 && v1 + 1 <= static_cast<Index>(outside.size()), ErrorKind::invalid_spec,
          "theorem3_quantities: need v1 + 1 <= n - |Omega|");
  std::uint64_t used = 0;
  detail::charge(used, binomial(static_cast<Index>(outside.size()), v1) * static_cast<std::uint64_t>(outside.size()),
                 budget, "theorem3_quantities");
  detail::charge(used, binomial(static_cast<Index>(outside.size()), v1 + 1), budget, "theorem3_quantities");

  Theorem3Quantities t;
  t.a1 = wrip_constant(phi, om, v1 + 1, budget).delta;

  const Index order = k + v1 + 1;
  t.a2 = kInfinity;
  for_each_subset(outside, v1, [&](const IndexSet& delta) {
    const IndexSet base = detail::set_union(om, delta);
    double low = kInfinity;
    double high = 0.0;
    for (Index i : set_minus(outside, delta)) {
      const Mat<Scalar> sub = select_cols(phi, detail::set_union(base, {i}));
      const RealVec s = singular_values(sub);
      low = std::min(low, order <= phi.rows() ? s(order - 1) * s(order - 1) : 0.0);
      high = std::max(high, s(0) * s(0));
    }
    t.a2 = std::min(t.a2, high > 0.0 ? low / high : 0.0);
    return true;
  });

  double max_col_sq = 0.0;
  for (Index i = 0; i < n; ++i) max_col_sq = std::max(max_col_sq, phi.col(i).squaredNorm());
  double low3 = kInfinity;
  for_each_subset(outside, v1 + 1, [&](const IndexSet& delta) {
    low3 = std::min(low3, detail::sigma_sq_at<Scalar>(select_cols(phi, detail::set_union(om, delta)), order));
    return true;
  });
  t.a3 = max_col_sq > 0.0 ? low3 / max_col_sq : 0.0;
  return t;
}

struct Theorem4Check {
  bool cond36 = false;
  bool cond37 = false;
  double alpha = 1.0;
  double beta = 1.0;
  double min_sigma_sq37 = kInfinity;
  /// True when |Omega| == r: the Gamma family for alpha/beta is empty and the alignment condition holds vacuously.
  bool vacuous36 = false;
};

/// Evaluates the two OSMP recovery conditions (alignment via alpha/beta and
/// separation via projected singular values) by enumerating Gamma subsets of Omega.
template <typename Scalar>
Theorem4Check osmp_theorem4_check(const Mat<Scalar>& phi, const IndexSet& omega, double eta, Index r,
                                  const EnumerationBudget& budget = {}) {
  const Index n = phi.cols();
  detail::guard_n(n, budget, "osmp_theorem4_check");
  require(eta >= 0.0 && eta <= 0.5, ErrorKind::domain, "osmp_theorem4_check: eta must be in [0, 0.5]");
  const IndexSet om = sorted(omega);
  const Index k = static_cast<Index>(om.size());
  require(r >= 1 && r <= k, ErrorKind::domain, "osmp_theorem4_check: need 1 <= r <= |Omega|");
  const IndexSet outside = set_minus(complement({}, n), om);

  std::uint64_t used = 0;
  for (Index g = 0; g <= k - r; ++g) detail::charge(used, binomial(k, g), budget, "osmp_theorem4_check");

  Theorem4Check out;
  out.alpha = kInfinity;
  out.beta = kInfinity;
  for (Index g = 0; g < k - r; ++g) {
    for_each_subset(om, g, [&](const IndexSet& gamma) {
      const Mat<Scalar> dot = detail::dotted_columns(phi, gamma);
      const IndexSet rest = set_minus(om, gamma);
      const Index p = static_cast<Index>(rest.size());
      out.alpha = std::min(out.alpha, std::sqrt(detail::sigma_sq_at<Scalar>(select_cols(dot, rest), p)));
      for (Index i : outside)
        out.beta = std::min(out.beta,
                            std::sqrt(detail::sigma_sq_at<Scalar>(select_cols(dot, detail::set_union(rest, {i})), p + 1)));
      return true;
    });
  }
  if (k == r) {
    out.vacuous36 = true;
    out.alpha = 1.0;
    out.beta = 1.0;
    out.cond36 = true;
  } else {
    if (std::isinf(out.beta)) out.beta = 1.0;  // no index outside Omega
    out.cond36 = std::sqrt(static_cast<double>(r) / static_cast<double>(k)) * out.alpha -
                     std::sqrt(std::max(0.0, 1.0 - out.beta * out.beta)) - 2.0 * eta >
                 0.0;
  }

  const double bound = 4.0 * eta * (1.0 - eta);
  for_each_subset(om, k - r, [&](const IndexSet& gamma) {
    const Mat<Scalar> dot = detail::dotted_columns(phi, gamma);
    const IndexSet rest = set_minus(om, gamma);
    const Index p = static_cast<Index>(rest.size());
    for (Index i : outside)
      out.min_sigma_sq37 =
          std::min(out.min_sigma_sq37, detail::sigma_sq_at<Scalar>(select_cols(dot, detail::set_union(rest, {i})), p + 1));
    return true;
  });
  out.cond37 = out.min_sigma_sq37 > bound;
  return out;
}

struct Theorem7Check {
  bool eq44 = false;
  std::optional<bool> eq45;
  double noise_term = 0.0;     // ||W^*||_{2,inf} / sigma_min(Phi_{Omega_c})
  double min_row_norm = 0.0;   // min_{a in Omega} ||X0^{a}||_2
  double sigma_pool = 0.0;
  double w_row_max = 0.0;
};

/// Max row l2 norm of W, i.e. ||W^*||_{2,inf}.
template <typename Scalar>
double max_row_norm(const Mat<Scalar>& w) {
  double best = 0.0;
  for (Index i = 0; i < w.rows(); ++i) best = std::max(best, w.row(i).norm());
  return best;
}

/// Literal evaluation of the TSMP support-identification inequality and the
/// two-sided threshold window for kappa.
template <typename Scalar>
Theorem7Check tsmp_theorem7_check(const Mat<Scalar>& phi, const IndexSet& omega, const IndexSet& omega_c,
                                  const Mat<Scalar>& x0, const Mat<Scalar>& w, std::optional<double> kappa = {}) {
  require(is_subset(omega, omega_c), ErrorKind::containment_violation, "tsmp_theorem7_check: Omega not in Omega_c");
  require(!omega.empty(), ErrorKind::invalid_spec, "tsmp_theorem7_check: empty Omega");
  require(w.rows() == phi.rows(), ErrorKind::dimension_mismatch, "tsmp_theorem7_check: W must be m x l");
  Theorem7Check out;
  out.sigma_pool = sigma_min(select_cols(phi, omega_c));
  out.w_row_max = max_row_norm(w);
  out.noise_term = out.w_row_max == 0.0 ? 0.0 : (out.sigma_pool > 0.0 ? out.w_row_max / out.sigma_pool : kInfinity);
  out.min_row_norm = kInfinity;
  for (Index a : omega) out.min_row_norm = std::min(out.min_row_norm, x0.row(a).norm());
  out.eq44 = out.min_row_norm > 2.0 * out.noise_term;
  if (kappa) out.eq45 = out.noise_term < *kappa && *kappa <= out.min_row_norm - out.noise_term;
  return out;
}

struct MeasureReport {
  Index krank = 0;
  double coherence = 0.0;
  std::optional<double> lcp;
  std::optional<double> wrip;
  std::optional<Theorem3Quantities> theorem3;
  bool exhaustive = true;
};

/// Krank and coherence always; LCP when `delta` is given, WRIP when `j` and
/// `wrip_b` are given, and the a1..a3 quantities when `j` and `v1` are given.
template <typename Scalar>
MeasureReport measure_report(const Mat<Scalar>& a, const EnumerationBudget& budget = {}, const IndexSet& delta = {},
                             const IndexSet& gamma = {}, const IndexSet& j = {},
                             std::optional<Index> wrip_b = {}, std::optional<Index> v1 = {}) {
  MeasureReport rep;
  rep.krank = krank(a, budget);
  rep.coherence = mutual_coherence(a);
  if (!delta.empty()) rep.lcp = lcp(a, delta, gamma);
  if (wrip_b) {
    require(!j.empty(), ErrorKind::config, "measure_report: WRIP needs an index set");
    const WripResult w = wrip_constant(a, j, *wrip_b, budget);
    rep.wrip = w.delta;
    rep.exhaustive = rep.exhaustive && w.exhaustive;
  }
  if (v1) {
    require(!j.empty(), ErrorKind::config, "measure_report: a1..a3 need an index set");
    rep.theorem3 = theorem3_quantities(a, j, *v1, budget);
  }
  return rep;
}

}  // namespace jspursuit
