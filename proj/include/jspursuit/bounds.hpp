#pragma once

// Closed-form bound functions and sample-complexity calculators for OSMP and
// TSMP.

#include "jspursuit/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace jspursuit {

struct BoundFunctions {
  double f1 = 0.0;
  double f2 = 0.0;
  double f = 0.0;
};

inline BoundFunctions eval_bound_functions(double eta, Index k, Index r) {
  require(eta >= 0.0 && eta <= 0.5, ErrorKind::domain, "eval_bound_functions: eta must be in [0, 0.5]");
  require(k >= 1 && r >= 1, ErrorKind::domain, "eval_bound_functions: k, r must be >= 1");
  const double kd = static_cast<double>(k);
  const double rd = static_cast<double>(r);
  BoundFunctions b;
  const double inner = (kd / (kd + rd)) * (2.0 * eta * std::sqrt(rd / kd) + std::sqrt((kd + rd) / kd - 4.0 * eta * eta));
  b.f1 = inner * inner;
  const double denom = std::sqrt((kd / rd) * eta * eta + 2.0) - std::sqrt(kd / rd) * eta;
  b.f2 = 1.0 / (denom * denom);
  b.f = std::min(b.f1, b.f2);
  return b;
}

/// lambda(x) = (x + sqrt(x^2 + 4x)) / (1 - 2 sqrt(x)) on 0 < x < 1/4.
inline double lambda_forward(double x) {
  require(x > 0.0 && x < 0.25, ErrorKind::domain, "lambda: x must be in (0, 1/4)");
  return (x + std::sqrt(x * x + 4.0 * x)) / (1.0 - 2.0 * std::sqrt(x));
}

/// Solves lambda(x) = y on (0, 1/4) by bisection down to machine resolution.
inline double lambda_inverse(double y) {
  require(y > 0.0 && std::isfinite(y), ErrorKind::domain, "lambda_inverse: y must be > 0");
  double lo = 0.0;
  double hi = 0.25;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lambda_forward(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

enum class LambdaDirection { forward, inverse };

inline double lambda_and_inverse(double value, LambdaDirection dir) {
  return dir == LambdaDirection::forward ? lambda_forward(value) : lambda_inverse(value);
}

/// sum_{i=t-k+1}^{t} C(t, i) eps^i, accumulated in log space.
inline double tsmp_fail_probability(Index t, Index k, double eps) {
  require(t > k && k >= 1, ErrorKind::domain, "tsmp_fail_probability: need t > k >= 1");
  require(eps > 0.0 && eps < 1.0, ErrorKind::domain, "tsmp_fail_probability: eps must be in (0, 1)");
  const double td = static_cast<double>(t);
  std::vector<double> logs;
  for (Index i = t - k + 1; i <= t; ++i) {
    const double id = static_cast<double>(i);
    logs.push_back(std::lgamma(td + 1.0) - std::lgamma(id + 1.0) - std::lgamma(td - id + 1.0) + id * std::log(eps));
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - top);
  return std::exp(top) * acc;
}

/// Noise margin c(s, sigma, X, J) = s sigma_|J|(Phi_J) / (2 sigma) - sqrt(|J|) - 1.
inline double noise_margin_c(double s, double noise_sigma, double pool_sigma_min, Index pool_size) {
  require(noise_sigma > 0.0, ErrorKind::domain, "noise_margin_c: sigma must be > 0");
  return s * pool_sigma_min / (2.0 * noise_sigma) - std::sqrt(static_cast<double>(pool_size)) - 1.0;
}

struct BoundInputs {
  Index k = 0;
  Index n = 0;
  Index r = 0;
  double eta = 0.0;
  double epsilon = 0.01;
  std::optional<Index> t;
  std::optional<double> sigma;
  // Inputs of the noise margin c(.): threshold kappa, sigma_min(Phi_J) and |J|.
  std::optional<double> kappa;
  std::optional<double> pool_sigma_min;
  std::optional<Index> pool_size;

  void validate() const {
    require(k >= 1 && r >= 1 && n > k, ErrorKind::domain, "bounds: need k >= 1, r >= 1, n > k");
    require(eta >= 0.0 && eta <= 0.5, ErrorKind::domain, "bounds: eta must be in [0, 0.5]");
    require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::domain, "bounds: epsilon must be in (0, 1)");
    if (t) require(*t > k, ErrorKind::domain, "bounds: t must exceed k");
    if (sigma) require(*sigma > 0.0, ErrorKind::domain, "bounds: sigma must be > 0");
  }
};

struct SampleBounds {
  double z = 0.0;
  double osmp_m = 0.0;
  std::optional<double> tsmp_m;
  std::optional<double> tsmp_fail_prob;
  double gauss_m = 0.0;
  double dft_m = 0.0;
  std::optional<double> c_value;
};

inline SampleBounds sample_bounds(const BoundInputs& in) {
  in.validate();
  const double kd = static_cast<double>(in.k);
  const double nd = static_cast<double>(in.n);
  const double rd = static_cast<double>(in.r);
  const BoundFunctions fb = eval_bound_functions(in.eta, in.k, in.r);
  const double noise = 4.0 * in.eta * (1.0 - in.eta);

  SampleBounds b;
  b.z = std::min((1.0 - fb.f) / kd, (1.0 - noise) / rd);
  // z == 0 (eta = 1/2) makes lambda^{-1}(z) = 0 and the bound infinite.
  const double factor = b.z > 0.0 ? std::max(4.0, 1.0 / lambda_inverse(b.z)) : kInfinity;
  b.osmp_m = kd + factor * std::log(4.0 * kd * kd * nd / in.epsilon);
  if (in.t) {
    b.tsmp_m = kd + static_cast<double>(*in.t) + factor * std::log(4.0 * kd * nd / in.epsilon);
    b.tsmp_fail_prob = tsmp_fail_probability(*in.t, in.k, in.epsilon);
  }

  const double tau_g = std::max(fb.f1, noise);
  const double theta = (1.0 - tau_g) / (1.0 + tau_g);
  const double root = std::sqrt(1.0 + theta) - 1.0;
  b.gauss_m = root > 0.0 ? 2.0 / (root * root) * (kd + 2.0 * std::log(2.0 * (nd - kd) / in.epsilon)) : kInfinity;

  const double tau_d = std::min((1.0 - fb.f1) / (1.0 + fb.f1), (1.0 - noise) / (1.0 + noise));
  b.dft_m = tau_d > 0.0 ? 2.0 * (3.0 + tau_d) * (kd + 1.0) / (3.0 * tau_d * tau_d) *
                              std::log(2.0 * (kd + 1.0) * (nd - kd) / in.epsilon)
                        : kInfinity;

  if (in.sigma && in.kappa && in.pool_sigma_min && in.pool_size)
    b.c_value = noise_margin_c(*in.kappa, *in.sigma, *in.pool_sigma_min, *in.pool_size);
  return b;
}

}  // namespace jspursuit
