#pragma once

// Signal-subspace estimation, orthogonal projections and the projector
// distance rho between an estimated subspace and the true signal space.

#include "jspursuit/core.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace jspursuit {

template <typename Derived>
RealVec singular_values(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 0 || a.cols() == 0) return RealVec();
  Eigen::JacobiSVD<Mat<typename Derived::Scalar>> svd(a.eval());
  return svd.singularValues();
}

/// Smallest of the min(rows, cols) singular values; 0 for an empty matrix.
template <typename Derived>
double sigma_min(const Eigen::MatrixBase<Derived>& a) {
  const RealVec s = singular_values(a);
  return s.size() ? s(s.size() - 1) : 0.0;
}

/// Number of singular values above rel_tol * sigma_1.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& a, double rel_tol = 1e-8) {
  const RealVec s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return r;
}

/// Orthonormal basis for R(a): left singular vectors with sigma > abs_tol.
template <typename Derived>
Mat<typename Derived::Scalar> orthonormal_basis(const Eigen::MatrixBase<Derived>& a, double abs_tol) {
  using Scalar = typename Derived::Scalar;
  if (a.cols() == 0) return Mat<Scalar>(a.rows(), 0);
  Eigen::JacobiSVD<Mat<Scalar>> svd(a.eval(), Eigen::ComputeThinU);
  const RealVec& s = svd.singularValues();
  Index d = 0;
  while (d < s.size() && s(d) > abs_tol) ++d;
  return svd.matrixU().leftCols(d);
}

/// Orthonormal basis for R(a) with a tolerance relative to sigma_1.
template <typename Derived>
Mat<typename Derived::Scalar> range_basis(const Eigen::MatrixBase<Derived>& a, double rel_tol = 1e-10) {
  const RealVec s = singular_values(a);
  const double top = s.size() ? s(0) : 0.0;
  return orthonormal_basis(a, rel_tol * top);
}

struct RankPolicy {
  enum class Mode { fixed, automatic };

  Mode mode = Mode::automatic;
  Index r = 0;
  double rel_tol = 1e-8;

  static RankPolicy fixed(Index r) { return RankPolicy{Mode::fixed, r, 1e-8}; }
  static RankPolicy automatic(double rel_tol = 1e-8) { return RankPolicy{Mode::automatic, 0, rel_tol}; }

  void validate() const {
    if (mode == Mode::fixed)
      require(r >= 1, ErrorKind::config, "fixed rank policy needs r >= 1");
    else
      require(rel_tol > 0.0 && rel_tol < 1.0, ErrorKind::config, "rank policy rel_tol must be in (0, 1)");
  }
};

template <typename Scalar>
struct SubspaceBasis {
  Mat<Scalar> basis;  // m x d, orthonormal columns

  Index dim() const { return basis.cols(); }
  Index ambient() const { return basis.rows(); }

  /// Wraps an arbitrary spanning set, orthonormalizing it.
  static SubspaceBasis span_of(const Mat<Scalar>& a, double rel_tol = 1e-10) {
    return SubspaceBasis{range_basis(a, rel_tol)};
  }
};

/// Top-d left singular vectors of y; d fixed or the numerical rank.
template <typename Scalar>
SubspaceBasis<Scalar> estimate_signal_subspace(const Mat<Scalar>& y, const RankPolicy& policy) {
  policy.validate();
  require(y.size() > 0, ErrorKind::zero_matrix, "estimate_signal_subspace: empty matrix");
  Eigen::JacobiSVD<Mat<Scalar>> svd(y, Eigen::ComputeThinU);
  const RealVec& s = svd.singularValues();
  require(s(0) > 0.0, ErrorKind::zero_matrix, "estimate_signal_subspace: y is zero");
  Index rank = 0;
  const double tol = policy.rel_tol * s(0);
  while (rank < s.size() && s(rank) > tol) ++rank;
  Index d = rank;
  if (policy.mode == RankPolicy::Mode::fixed) {
    require(policy.r <= rank, ErrorKind::rank_deficit,
            "estimate_signal_subspace: fixed r=" + std::to_string(policy.r) + " exceeds rank(y)=" +
                std::to_string(rank));
    d = policy.r;
  }
  return SubspaceBasis<Scalar>{svd.matrixU().leftCols(d)};
}

/// (I - QQ^*) v where Q is an orthonormal basis of R(basis_of).
template <typename Scalar>
Mat<Scalar> proj_complement_apply(const Mat<Scalar>& basis_of, const Mat<Scalar>& v) {
  require(basis_of.rows() == v.rows(), ErrorKind::dimension_mismatch, "proj_complement_apply: row mismatch");
  const Mat<Scalar> q = range_basis(basis_of);
  if (q.cols() == 0) return v;
  return v - q * (q.adjoint() * v);
}

/// rho(S_hat) = min over dim-matched subspaces of the signal space of the
/// projector distance; equals sqrt(1 - sigma_d(V^* U)^2) for orthonormal U, V.
template <typename Scalar>
double compute_rho(const SubspaceBasis<Scalar>& s_hat, const SubspaceBasis<Scalar>& signal_space) {
  require(s_hat.dim() <= signal_space.dim(), ErrorKind::dimension_mismatch,
          "compute_rho: dim(s_hat) > dim(signal_space)");
  require(s_hat.ambient() == signal_space.ambient(), ErrorKind::dimension_mismatch,
          "compute_rho: ambient dimension mismatch");
  if (s_hat.dim() == 0) return 0.0;
  const RealVec s = singular_values(signal_space.basis.adjoint() * s_hat.basis);
  const double c = std::min(1.0, s(s_hat.dim() - 1));
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

}  // namespace jspursuit
