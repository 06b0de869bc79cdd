// Registers a thresholded MUSIC variant next to the built-in solvers and
// writes a small success-rate sweep to stdout as CSV.

#include "jspursuit/jspursuit.hpp"

#include <iostream>

namespace js = jspursuit;

int main() {
  auto registry = js::SolverRegistry<double>::builtin();
  // Any callable with the solver signature can join a sweep. This one reuses
  // MUSIC but refits on twice as many columns and lets the harness keep the
  // k largest rows of X_hat (signal_only = true).
  registry.add(
      "music_refit",
      [](const js::RecoveryProblem<double>& p, js::Index k, const js::PursuitParams& params) {
        const js::Index wide = std::min<js::Index>(2 * k, p.m() - 1);
        auto res = js::music(p, wide, params);
        res.x_hat = js::refit_on_support(p.phi, p.y, res.omega_hat);
        return res;
      },
      true);

  js::ExperimentConfig config;
  config.m = 32;
  config.n = 128;
  config.l = 4;
  config.r = 4;
  config.k_grid = {4, 8, 12, 16};
  config.trials = 50;
  config.seed = 11;
  config.algos = {"tsmp", "music", "music_refit"};
  config.timing = false;

  js::write_csv(std::cout, js::sweep<double>(config, registry));
  return 0;
}
