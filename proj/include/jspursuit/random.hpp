#pragma once

// Deterministic, order-independent random streams.
//
// A Seed names a (master, stream) pair. Streams are mixed through splitmix64
// so that trial i of a sweep draws the same numbers no matter which thread
// runs it or in what order.

#include "jspursuit/core.hpp"

#include <cstdint>
#include <random>

namespace jspursuit {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  /// Child seed for a named sub-draw (e.g. sensing matrix vs noise).
  constexpr Seed derive(std::uint64_t tag) const noexcept {
    return Seed{splitmix64(master ^ splitmix64(stream)), splitmix64(tag + 0x632BE59BD9B4E019ULL)};
  }

  constexpr std::uint64_t state() const noexcept {
    return splitmix64(splitmix64(master) ^ (stream * 0xD1B54A32D192ED03ULL + 1));
  }

  friend constexpr bool operator==(const Seed&, const Seed&) = default;
};

/// Engine plus the few distributions the generators need.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.state()) {}

  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  /// Scalar with each component ~ N(0, var): the ICN(0, var) entry model.
  template <typename Scalar>
  Scalar icn(double var) {
    const double sd = std::sqrt(var);
    if constexpr (is_complex_v<Scalar>) {
      const double re = normal(0.0, sd);
      const double im = normal(0.0, sd);
      return Scalar(re, im);
    } else {
      return normal(0.0, sd);
    }
  }

  /// Uniform integer in [0, bound).
  Index below(Index bound) {
    return std::uniform_int_distribution<Index>(0, bound - 1)(engine_);
  }

  /// k distinct indices from [0, n), sorted; partial Fisher-Yates.
  IndexSet sample_without_replacement(Index n, Index k) {
    std::vector<Index> pool(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < k; ++i) {
      const Index j = i + below(n - i);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return sorted(std::move(pool));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace jspursuit
