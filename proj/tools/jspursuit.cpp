// jspursuit: command-line front end for problem generation, solving, Monte
// Carlo sweeps, k95 curves, matrix diagnostics and sample-complexity bounds.
//
// Exit codes: 0 success, 1 solver/runtime failure, 2 configuration error,
// 3 I/O error.

#include "jspursuit/jspursuit.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>

namespace js = jspursuit;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

template <typename Fn>
auto with_field(js::Field field, Fn&& fn) {
  if (field == js::Field::complex) return fn(std::complex<double>{});
  return fn(double{});
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << '\n';
  else
    js::write_json(out, j);
}

json bounds_to_json(const js::SampleBounds& b) {
  json j;
  j["z"] = b.z;
  j["osmp_m"] = js::format_double(b.osmp_m);
  j["gauss_m"] = js::format_double(b.gauss_m);
  j["dft_m"] = js::format_double(b.dft_m);
  if (b.tsmp_m) j["tsmp_m"] = js::format_double(*b.tsmp_m);
  if (b.tsmp_fail_prob) j["tsmp_fail_prob"] = *b.tsmp_fail_prob;
  if (b.c_value) j["c"] = *b.c_value;
  // Numeric copies for consumers that do not want strings; infinity maps to null.
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["numeric"] = {{"osmp_m", num(b.osmp_m)}, {"gauss_m", num(b.gauss_m)}, {"dft_m", num(b.dft_m)}};
  if (b.tsmp_m) j["numeric"]["tsmp_m"] = num(*b.tsmp_m);
  return j;
}

/// Flag overrides applied on top of an optional JSON config file.
struct ConfigFlags {
  std::string config_path;
  std::optional<js::Index> m, n, l, r, trials;
  std::vector<js::Index> k_grid;
  std::optional<std::string> snr, field, model;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> algos;
  std::optional<double> sigma;
  bool no_timing = false;
  bool verbose = false;

  void attach(CLI::App* app, bool with_k_grid) {
    app->add_option("--config", config_path, "JSON experiment config");
    app->add_option("--m", m, "measurements");
    app->add_option("--n", n, "ambient dimension");
    app->add_option("--l", l, "snapshots");
    app->add_option("--r", r, "signal rank");
    if (with_k_grid) app->add_option("--k", k_grid, "sparsity levels")->delimiter(',');
    app->add_option("--snr", snr, "SNR in dB or 'inf'");
    app->add_option("--trials", trials, "Monte Carlo trials per point");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--algos", algos, "solver names")->delimiter(',');
    app->add_option("--field", field, "real or complex");
    app->add_option("--model", model, "gaussian, spherical or partial_dft");
    app->add_option("--sigma", sigma, "Gaussian entry standard deviation");
    app->add_flag("--no-timing", no_timing, "write 0 for runtimes so output is byte-reproducible");
    app->add_flag("--verbose", verbose, "add a mean Frobenius error column");
  }

  js::ExperimentConfig build() const {
    js::ExperimentConfig c;
    if (!config_path.empty()) c = js::config_from_json(js::read_json(config_path));
    if (m) c.m = *m;
    if (n) c.n = *n;
    if (l) c.l = *l;
    if (r) c.r = *r;
    if (trials) c.trials = *trials;
    if (!k_grid.empty()) c.k_grid = k_grid;
    if (snr) c.snr_db = js::parse_double(*snr);
    if (seed) c.seed = *seed;
    if (!algos.empty()) c.algos = algos;
    if (field) c.field = js::parse_field(*field);
    if (model) c.matrix_model = js::parse_matrix_model(*model);
    if (sigma) c.sigma = *sigma;
    if (no_timing) c.timing = false;
    if (verbose) c.verbose = true;
    return c;
  }
};

int classify(const js::Error& e) {
  switch (e.kind()) {
    case js::ErrorKind::io: return kExitIo;
    case js::ErrorKind::degenerate_signal:
    case js::ErrorKind::zero_matrix:
    case js::ErrorKind::rank_deficit:
    case js::ErrorKind::exhausted_candidates:
    case js::ErrorKind::size_guard:
    case js::ErrorKind::containment_violation:
    case js::ErrorKind::insufficient_pairs:
    case js::ErrorKind::zero_column: return kExitRuntime;
    default: return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint sparse recovery toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random problem instance");
  ConfigFlags gen_flags;
  gen_flags.attach(gen, false);
  js::Index gen_k = 10;
  js::Index gen_trial = 0;
  std::string gen_out = "problem";
  gen->add_option("--k", gen_k, "row sparsity");
  gen->add_option("--trial", gen_trial, "trial index (seed stream)");
  gen->add_option("--out", gen_out, "output directory");

  // solve
  auto* solve = app.add_subcommand("solve", "run a solver on a problem manifest");
  std::string solve_problem;
  std::string solve_algo = "tsmp";
  std::optional<js::Index> solve_k;
  std::optional<double> solve_kappa;
  std::optional<js::Index> solve_rank;
  std::string solve_out = "result.json";
  solve->add_option("--problem", solve_problem, "problem.json manifest")->required();
  solve->add_option("--algo", solve_algo, "tsmp, tsmp2, tsmp_qr, osmp, sa_music_osmp, music or somp");
  solve->add_option("--k", solve_k, "row sparsity (defaults to the manifest value)");
  solve->add_option("--kappa", solve_kappa, "threshold for tsmp2");
  solve->add_option("--rank", solve_rank, "fixed subspace rank (default: numerical rank of Y)");
  solve->add_option("--out", solve_out, "result JSON path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "success-rate and error sweep over k");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep, true);
  std::string sweep_out = "results.csv";
  sweep->add_option("--out", sweep_out, "CSV output path");

  // k95
  auto* k95 = app.add_subcommand("k95", "largest k with success rate above 0.95, per l");
  ConfigFlags k95_flags;
  k95_flags.attach(k95, false);
  std::vector<js::Index> k95_l_grid{1, 3, 5, 9, 17, 33};
  std::string k95_algo = "tsmp";
  bool k95_full = false;
  std::string k95_out = "k95.csv";
  std::string k95_summary;
  k95->add_option("--l-grid", k95_l_grid, "snapshot counts")->delimiter(',');
  k95->add_option("--algo", k95_algo, "solver name");
  k95->add_flag("--full-scan", k95_full, "scan every k instead of stopping after 3 misses");
  k95->add_option("--out", k95_out, "CSV of every evaluated (l, k) point");
  k95->add_option("--summary", k95_summary, "JSON summary path (default: <out>.json)");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "recoverability measures of a matrix");
  std::string diag_matrix;
  std::vector<js::Index> diag_delta, diag_gamma, diag_omega;
  std::optional<js::Index> diag_wrip_b, diag_v1;
  js::Index diag_max_n = js::EnumerationBudget{}.max_n;
  std::uint64_t diag_max_subsets = js::EnumerationBudget{}.max_subsets;
  std::string diag_out;
  diag->add_option("--matrix", diag_matrix, "Matrix Market array file")->required();
  diag->add_option("--delta", diag_delta, "LCP index set Delta")->delimiter(',');
  diag->add_option("--gamma", diag_gamma, "LCP index set Gamma")->delimiter(',');
  diag->add_option("--omega", diag_omega, "index set J for WRIP / Omega for the a1..a3 quantities")->delimiter(',');
  diag->add_option("--wrip-b", diag_wrip_b, "WRIP order b");
  diag->add_option("--v1", diag_v1, "v1 for the a1..a3 quantities");
  diag->add_option("--max-n", diag_max_n, "enumeration guard on n");
  diag->add_option("--max-subsets", diag_max_subsets, "enumeration budget");
  diag->add_option("--out", diag_out, "JSON output path (default stdout)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "sample-complexity bounds");
  js::BoundInputs bin;
  std::string bounds_out;
  bounds->add_option("--k", bin.k, "row sparsity")->required();
  bounds->add_option("--n", bin.n, "ambient dimension")->required();
  bounds->add_option("--r", bin.r, "signal rank")->required();
  bounds->add_option("--eta", bin.eta, "subspace perturbation bound in [0, 0.5]")->required();
  bounds->add_option("--epsilon", bin.epsilon, "failure probability");
  bounds->add_option("--t", bin.t, "TSMP pool size");
  bounds->add_option("--sigma", bin.sigma, "noise level");
  bounds->add_option("--kappa", bin.kappa, "threshold s of the noise margin");
  bounds->add_option("--pool-sigma-min", bin.pool_sigma_min, "sigma_min(Phi_J)");
  bounds->add_option("--pool-size", bin.pool_size, "|J|");
  bounds->add_option("--out", bounds_out, "JSON output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      js::ExperimentConfig c = gen_flags.build();
      c.k_grid = {gen_k};
      c.r = std::min(c.r, gen_k);
      c.algos = {"tsmp"};
      c.validate(js::SolverRegistry<double>::builtin());
      const auto pt = js::point_of(c, gen_k);
      const auto manifest = with_field(c.field, [&](auto tag) {
        using S = decltype(tag);
        auto inst = js::make_instance<S>(pt, gen_trial);
        const auto path = js::save_problem(gen_out, inst.problem);
        js::write_mtx(js::fs::path(gen_out) / "w.mtx", inst.w);
        return path;
      });
      std::cout << manifest.string() << '\n';
      return 0;
    }

    if (*solve) {
      const js::Field field = js::manifest_field(solve_problem);
      return with_field(field, [&](auto tag) {
        using S = decltype(tag);
        const auto problem = js::load_problem<S>(solve_problem);
        js::PursuitParams params;
        if (solve_rank) params.rank_policy = js::RankPolicy::fixed(*solve_rank);
        js::RecoveryResult<S> res;
        if (solve_algo == "tsmp2") {
          if (!solve_kappa) throw js::Error(js::ErrorKind::config, "tsmp2 needs --kappa");
          res = js::tsmp2(problem, *solve_kappa, params);
        } else {
          const auto k = solve_k ? solve_k : problem.k;
          if (!k) throw js::Error(js::ErrorKind::config, "--k is required when the manifest has no k");
          const auto registry = js::SolverRegistry<S>::builtin();
          const auto* entry = registry.find(solve_algo);
          if (!entry) throw js::Error(js::ErrorKind::config, "unknown algorithm '" + solve_algo + "'");
          res = entry->solve(problem, *k, params);
        }
        js::save_result(solve_out, solve_algo, res);
        json summary{{"result", solve_out}, {"omega_hat", res.omega_hat}, {"runtime_ms", res.runtime_ms}};
        if (problem.truth) {
          summary["success"] = res.omega_hat == js::sorted(problem.truth->omega);
          summary["l2_err"] = js::singular_values(Eigen::MatrixX<S>(problem.truth->x0 - res.x_hat))(0);
        }
        std::cout << summary.dump() << '\n';
        return 0;
      });
    }

    if (*sweep) {
      const js::ExperimentConfig c = sweep_flags.build();
      const auto rows = with_field(c.field, [&](auto tag) { return js::sweep<decltype(tag)>(c); });
      js::write_csv(rows, sweep_out);
      return 0;
    }

    if (*k95) {
      const js::ExperimentConfig c = k95_flags.build();
      const auto points = with_field(c.field, [&](auto tag) {
        return js::k95<decltype(tag)>(c, k95_l_grid, k95_algo, k95_full);
      });
      std::vector<js::SweepRow> rows;
      json summary = json::array();
      for (const auto& p : points) {
        rows.insert(rows.end(), p.rows.begin(), p.rows.end());
        summary.push_back({{"l", p.l}, {"k95", p.k95}, {"l0_bound", p.l0_bound}, {"algo", k95_algo}, {"m", c.m}, {"n", c.n}});
      }
      js::write_csv(rows, k95_out);
      const std::string summary_path =
          k95_summary.empty() ? js::fs::path(k95_out).replace_extension(".json").string() : k95_summary;
      js::write_json(summary_path, summary);
      std::cout << summary.dump() << '\n';
      return 0;
    }

    if (*diag) {
      const js::EnumerationBudget budget{diag_max_n, diag_max_subsets};
      const auto header = js::peek_mtx_header(diag_matrix);
      const json report = with_field(header.field, [&](auto tag) {
        using S = decltype(tag);
        const auto a = js::read_mtx<S>(js::fs::path(diag_matrix));
        const auto rep = js::measure_report(a, budget, diag_delta, diag_gamma, diag_omega, diag_wrip_b, diag_v1);
        return js::report_to_json(rep);
      });
      emit(report, diag_out);
      return 0;
    }

    if (*bounds) {
      emit(bounds_to_json(js::sample_bounds(bin)), bounds_out);
      return 0;
    }
  } catch (const js::Error& e) {
    std::cerr << "jspursuit: " << e.what() << '\n';
    return classify(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "jspursuit: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "jspursuit: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
