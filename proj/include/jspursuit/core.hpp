#pragma once

// Core types shared by every jspursuit module: dense matrices over a real or
// complex field, index sets, problem bundles, seeds and the error type.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace jspursuit {

using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMat = Mat<double>;
using ComplexMat = Mat<std::complex<double>>;
using RealVec = Vec<double>;

enum class Field { real, complex };

template <typename Scalar>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

template <typename Scalar>
constexpr Field field_of() {
  return is_complex_v<Scalar> ? Field::complex : Field::real;
}

inline const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

enum class ErrorKind {
  invalid_dimension,
  invalid_spec,
  degenerate_signal,
  zero_matrix,
  rank_deficit,
  dimension_mismatch,
  exhausted_candidates,
  size_guard,
  domain,
  containment_violation,
  insufficient_pairs,
  zero_column,
  config,
  io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::degenerate_signal: return "degenerate-signal";
    case ErrorKind::zero_matrix: return "zero-matrix";
    case ErrorKind::rank_deficit: return "rank-deficit";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::exhausted_candidates: return "exhausted-candidates";
    case ErrorKind::size_guard: return "size-guard";
    case ErrorKind::domain: return "domain";
    case ErrorKind::containment_violation: return "containment-violation";
    case ErrorKind::insufficient_pairs: return "insufficient-pairs";
    case ErrorKind::zero_column: return "zero-column";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Rows of `a` indexed by `rows`, in the given order.
template <typename Derived>
Mat<typename Derived::Scalar> select_rows(const Eigen::MatrixBase<Derived>& a, const IndexSet& rows) {
  Mat<typename Derived::Scalar> out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = a.row(rows[i]);
  return out;
}

/// Columns of `a` indexed by `cols`, in the given order.
template <typename Derived>
Mat<typename Derived::Scalar> select_cols(const Eigen::MatrixBase<Derived>& a, const IndexSet& cols) {
  Mat<typename Derived::Scalar> out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = a.col(cols[j]);
  return out;
}

/// Indices of rows whose l2 norm exceeds `tol`.
template <typename Derived>
IndexSet row_support(const Eigen::MatrixBase<Derived>& x, double tol = 0.0) {
  IndexSet s;
  for (Index i = 0; i < x.rows(); ++i)
    if (x.row(i).norm() > tol) s.push_back(i);
  return s;
}

inline IndexSet sorted(IndexSet s) {
  std::sort(s.begin(), s.end());
  return s;
}

/// Sorted set difference a \ b (inputs need not be sorted).
inline IndexSet set_minus(IndexSet a, IndexSet b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool is_subset(IndexSet a, IndexSet b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline IndexSet complement(const IndexSet& s, Index n) {
  IndexSet all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  return set_minus(all, s);
}

/// Ground truth attached to a generated problem.
template <typename Scalar>
struct Truth {
  Mat<Scalar> x0;
  IndexSet omega;
};

/// Y = Phi X0 + W with optional ground truth and sparsity.
template <typename Scalar>
struct RecoveryProblem {
  Mat<Scalar> phi;
  Mat<Scalar> y;
  std::optional<Truth<Scalar>> truth;
  std::optional<Index> k;

  Index m() const { return phi.rows(); }
  Index n() const { return phi.cols(); }
  Index l() const { return y.cols(); }

  void validate() const {
    require(phi.rows() >= 1 && phi.cols() >= 1, ErrorKind::invalid_dimension, "phi must be non-empty");
    require(y.rows() == phi.rows(), ErrorKind::dimension_mismatch, "phi.rows != y.rows");
    require(y.cols() >= 1, ErrorKind::invalid_dimension, "y must have at least one column");
    require(all_finite(phi) && all_finite(y), ErrorKind::invalid_spec, "non-finite entries");
    if (truth) {
      require(truth->x0.rows() == phi.cols() && truth->x0.cols() == y.cols(), ErrorKind::dimension_mismatch,
              "x0 must be n x l");
      require(sorted(truth->omega) == row_support(truth->x0), ErrorKind::invalid_spec,
              "omega must equal supp(x0)");
      if (k) require(static_cast<Index>(truth->omega.size()) == *k, ErrorKind::invalid_spec, "|omega| != k");
    }
  }
};

/// Parameters of the V1 Lambda V2^* row-sparse signal model.
struct SignalSpec {
  Index n = 0;
  Index l = 0;
  Index k = 0;
  Index r = 0;

  void validate() const {
    require(n >= 1 && l >= 1 && k >= 1 && r >= 1, ErrorKind::invalid_spec, "n, l, k, r must be >= 1");
    require(k <= n, ErrorKind::invalid_spec, "k > n");
    require(r <= std::min(k, l), ErrorKind::invalid_spec, "r > min(k, l)");
  }
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace jspursuit
