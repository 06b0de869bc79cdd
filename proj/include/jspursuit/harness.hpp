#pragma once

// Monte Carlo driver: per-trial problem generation, solver registry, success
// and error sweeps over k, k_0.95 search over l, and the CSV schema.

#include "jspursuit/baselines.hpp"
#include "jspursuit/io.hpp"
#include "jspursuit/matmodel.hpp"
#include "jspursuit/pursuit.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <map>
#include <thread>

namespace jspursuit {

template <typename Scalar>
using Solver = std::function<RecoveryResult<Scalar>(const RecoveryProblem<Scalar>&, Index, const PursuitParams&)>;

/// Named solvers available to sweeps. Third-party solvers register here;
/// `signal_only` solvers have their support taken as the k largest rows of x_hat.
template <typename Scalar>
class SolverRegistry {
 public:
  struct Entry {
    Solver<Scalar> solve;
    bool signal_only = false;
  };

  static SolverRegistry builtin() {
    SolverRegistry r;
    r.add("tsmp", [](const auto& p, Index k, const auto& prm) { return tsmp1(p, k, prm); });
    r.add("tsmp_qr", [](const auto& p, Index k, const auto& prm) { return tsmp1_qr(p, k, prm); });
    r.add("osmp", [](const auto& p, Index k, const auto& prm) { return osmp(p, k, prm); });
    r.add("sa_music_osmp", [](const auto& p, Index k, const auto& prm) { return sa_music_osmp(p, k, prm); });
    r.add("music", [](const auto& p, Index k, const auto& prm) { return music(p, k, prm); });
    r.add("somp", [](const auto& p, Index k, const auto& prm) { return somp(p, k, prm); });
    return r;
  }

  void add(const std::string& name, Solver<Scalar> solve, bool signal_only = false) {
    entries_[name] = Entry{std::move(solve), signal_only};
  }

  const Entry* find(const std::string& name) const {
    const auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
};

inline MatrixModel parse_matrix_model(const std::string& s) {
  if (s == "gaussian") return MatrixModel::gaussian;
  if (s == "spherical") return MatrixModel::spherical;
  if (s == "partial_dft" || s == "dft") return MatrixModel::partial_dft;
  throw Error(ErrorKind::config, "unknown matrix model '" + s + "'");
}

inline Field parse_field(const std::string& s) {
  if (s == "real") return Field::real;
  if (s == "complex") return Field::complex;
  throw Error(ErrorKind::config, "unknown field '" + s + "'");
}

struct ExperimentConfig {
  Index m = 64;
  Index n = 512;
  Index l = 3;
  Index r = 3;
  std::vector<Index> k_grid{10, 15, 20, 25, 30, 35, 40, 45, 50};
  double snr_db = kInfinity;
  Index trials = 500;
  std::uint64_t seed = 0;
  std::vector<std::string> algos{"tsmp", "osmp", "sa_music_osmp"};
  Field field = Field::real;
  MatrixModel matrix_model = MatrixModel::gaussian;
  double sigma = 1.0;
  /// Record wall-clock runtimes; when false the runtime column is 0 and output is byte-reproducible.
  bool timing = true;
  /// Adds a mean Frobenius-error column to the CSV.
  bool verbose = false;

  bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }

  template <typename Scalar>
  void validate(const SolverRegistry<Scalar>& registry) const {
    require(m >= 2 && n >= 1 && l >= 1 && r >= 1, ErrorKind::config, "m >= 2, n, l, r >= 1 required");
    require(!k_grid.empty(), ErrorKind::config, "k_grid is empty");
    require(trials >= 1, ErrorKind::config, "trials must be >= 1");
    require(sigma > 0.0, ErrorKind::config, "sigma must be > 0");
    require(!std::isnan(snr_db) && snr_db != -kInfinity, ErrorKind::config, "snr_db must be finite or +inf");
    const Index kmin = *std::min_element(k_grid.begin(), k_grid.end());
    require(kmin >= 1, ErrorKind::config, "k values must be >= 1");
    require(*std::max_element(k_grid.begin(), k_grid.end()) <= n, ErrorKind::config, "k exceeds n");
    require(r <= std::min(kmin, l), ErrorKind::config, "r must be <= min(min(k_grid), l)");
    require(!algos.empty(), ErrorKind::config, "no algorithms requested");
    for (const auto& a : algos) require(registry.find(a) != nullptr, ErrorKind::config, "unregistered algorithm '" + a + "'");
    require(matrix_model != MatrixModel::partial_dft || field == Field::complex, ErrorKind::config,
            "partial_dft needs field = complex");
    if (matrix_model == MatrixModel::partial_dft) require(m <= n, ErrorKind::config, "partial_dft needs m <= n");
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["m"] = c.m;
  j["n"] = c.n;
  j["l"] = c.l;
  j["r"] = c.r;
  j["k_grid"] = c.k_grid;
  j["snr_db"] = c.noiseless() ? nlohmann::json("inf") : nlohmann::json(c.snr_db);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["algos"] = c.algos;
  j["field"] = to_string(c.field);
  j["matrix_model"] = to_string(c.matrix_model);
  j["sigma"] = c.sigma;
  j["timing"] = c.timing;
  j["verbose"] = c.verbose;
  return j;
}

/// Missing keys keep their defaults; snr_db accepts a number or "inf".
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c = {}) {
  try {
    if (j.contains("m")) c.m = j["m"].get<Index>();
    if (j.contains("n")) c.n = j["n"].get<Index>();
    if (j.contains("l")) c.l = j["l"].get<Index>();
    if (j.contains("r")) c.r = j["r"].get<Index>();
    if (j.contains("k_grid")) c.k_grid = j["k_grid"].get<std::vector<Index>>();
    if (j.contains("snr_db"))
      c.snr_db = j["snr_db"].is_string() ? parse_double(j["snr_db"].get<std::string>()) : j["snr_db"].get<double>();
    if (j.contains("trials")) c.trials = j["trials"].get<Index>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("algos")) c.algos = j["algos"].get<std::vector<std::string>>();
    if (j.contains("field")) c.field = parse_field(j["field"].get<std::string>());
    if (j.contains("matrix_model")) c.matrix_model = parse_matrix_model(j["matrix_model"].get<std::string>());
    if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
    if (j.contains("timing")) c.timing = j["timing"].get<bool>();
    if (j.contains("verbose")) c.verbose = j["verbose"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  return c;
}

/// One cell of a sweep: a fully specified instance distribution.
struct ConfigPoint {
  Index m = 0;
  Index n = 0;
  Index l = 0;
  Index r = 0;
  Index k = 0;
  double snr_db = kInfinity;
  MatrixModel matrix_model = MatrixModel::gaussian;
  double sigma = 1.0;
  std::uint64_t seed = 0;

  bool noiseless() const { return std::isinf(snr_db) && snr_db > 0; }
};

inline ConfigPoint point_of(const ExperimentConfig& c, Index k) {
  return ConfigPoint{c.m, c.n, c.l, c.r, k, c.snr_db, c.matrix_model, c.sigma, c.seed};
}

template <typename Scalar>
struct TrialInstance {
  RecoveryProblem<Scalar> problem;
  Mat<Scalar> w;
};

/// Draws the instance for trial `trial_index`. The draw depends only on the
/// master seed and the trial index, never on the solver or execution order.
template <typename Scalar>
TrialInstance<Scalar> make_instance(const ConfigPoint& pt, Index trial_index) {
  const Seed trial{pt.seed, static_cast<std::uint64_t>(trial_index)};
  TrialInstance<Scalar> inst;
  inst.problem.phi = gen_phi<Scalar>(pt.matrix_model, pt.m, pt.n, pt.sigma, trial.derive(0));
  inst.problem.truth = gen_signal<Scalar>(SignalSpec{pt.n, pt.l, pt.k, pt.r}, trial.derive(1));
  inst.problem.k = pt.k;
  const Mat<Scalar> y_clean = inst.problem.phi * inst.problem.truth->x0;
  auto noisy = add_noise<Scalar>(y_clean, pt.snr_db, trial.derive(2));
  inst.problem.y = std::move(noisy.y);
  inst.w = std::move(noisy.w);
  return inst;
}

/// Noiseless runs use S_hat = R(Y) at its numerical rank; noisy runs take the top-r directions.
inline PursuitParams params_for(const ConfigPoint& pt) {
  PursuitParams p;
  p.rank_policy = pt.noiseless() ? RankPolicy::automatic() : RankPolicy::fixed(pt.r);
  return p;
}

struct TrialOutcome {
  bool success = false;
  double l2_err = 0.0;
  double fro_err = 0.0;
  double runtime_ms = 0.0;
  std::string error;
};

template <typename Scalar>
TrialOutcome evaluate(const typename SolverRegistry<Scalar>::Entry& entry, const TrialInstance<Scalar>& inst,
                      const ConfigPoint& pt) {
  TrialOutcome out;
  const auto& truth = *inst.problem.truth;
  try {
    RecoveryResult<Scalar> res = entry.solve(inst.problem, pt.k, params_for(pt));
    if (entry.signal_only) {
      std::vector<double> norms;
      const IndexSet all = complement({}, pt.n);
      for (Index i : all) norms.push_back(res.x_hat.row(i).norm());
      IndexSet top = detail::rank_descending(all, norms);
      top.resize(static_cast<std::size_t>(pt.k));
      res.omega_hat = sorted(std::move(top));
    }
    out.success = res.omega_hat == sorted(truth.omega);
    const Mat<Scalar> diff = truth.x0 - res.x_hat;
    out.l2_err = singular_values(diff)(0);
    out.fro_err = diff.norm();
    out.runtime_ms = res.runtime_ms;
  } catch (const std::exception& e) {
    // Solver failures count as unsuccessful trials with X_hat = 0.
    out.success = false;
    out.error = e.what();
    out.l2_err = singular_values(truth.x0)(0);
    out.fro_err = truth.x0.norm();
  }
  return out;
}

template <typename Scalar>
TrialOutcome run_trial(const ConfigPoint& pt, const std::string& algo, Index trial_index,
                       const SolverRegistry<Scalar>& registry = SolverRegistry<Scalar>::builtin()) {
  const auto* entry = registry.find(algo);
  require(entry != nullptr, ErrorKind::config, "unregistered algorithm '" + algo + "'");
  return evaluate<Scalar>(*entry, make_instance<Scalar>(pt, trial_index), pt);
}

/// Worker count: hardware concurrency capped by JSPURSUIT_THREADS.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("JSPURSUIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

/// Runs fn(i) for i in [0, count) on up to worker_count() threads.
inline void parallel_for(Index count, const std::function<void(Index)>& fn) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<Index>(count, 1)));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (Index i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct SweepRow {
  std::string algo;
  Index m = 0;
  Index n = 0;
  Index l = 0;
  Index r = 0;
  Index k = 0;
  double snr_db = kInfinity;
  Index trials = 0;
  Index successes = 0;
  double success_rate = 0.0;
  double mean_l2_err = 0.0;
  double mean_runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> mean_fro_err;
  Index errors = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Runs every requested algorithm on the same `trials` instances of one point.
template <typename Scalar>
std::vector<SweepRow> run_point(const ConfigPoint& pt, Index trials, const std::vector<std::string>& algos,
                                const SolverRegistry<Scalar>& registry, bool timing = true, bool verbose = false) {
  std::vector<const typename SolverRegistry<Scalar>::Entry*> entries;
  for (const auto& a : algos) {
    entries.push_back(registry.find(a));
    require(entries.back() != nullptr, ErrorKind::config, "unregistered algorithm '" + a + "'");
  }
  std::vector<std::vector<TrialOutcome>> outcomes(algos.size(), std::vector<TrialOutcome>(static_cast<std::size_t>(trials)));
  parallel_for(trials, [&](Index t) {
    const auto inst = make_instance<Scalar>(pt, t);
    for (std::size_t a = 0; a < algos.size(); ++a)
      outcomes[a][static_cast<std::size_t>(t)] = evaluate<Scalar>(*entries[a], inst, pt);
  });

  std::vector<SweepRow> rows;
  for (std::size_t a = 0; a < algos.size(); ++a) {
    SweepRow row{algos[a], pt.m, pt.n, pt.l, pt.r, pt.k, pt.snr_db, trials};
    row.seed = pt.seed;
    double l2 = 0.0, fro = 0.0, rt = 0.0;
    for (const auto& o : outcomes[a]) {
      row.successes += o.success ? 1 : 0;
      row.errors += o.error.empty() ? 0 : 1;
      l2 += o.l2_err;
      fro += o.fro_err;
      rt += o.runtime_ms;
    }
    const double td = static_cast<double>(trials);
    row.success_rate = static_cast<double>(row.successes) / td;
    row.mean_l2_err = l2 / td;
    row.mean_runtime_ms = timing ? rt / td : 0.0;
    if (verbose) row.mean_fro_err = fro / td;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// One row per (algo, k), ordered by algo (as listed) then k (as listed).
template <typename Scalar>
std::vector<SweepRow> sweep(const ExperimentConfig& config,
                            const SolverRegistry<Scalar>& registry = SolverRegistry<Scalar>::builtin()) {
  config.validate(registry);
  std::vector<std::vector<SweepRow>> by_k;
  for (Index k : config.k_grid)
    by_k.push_back(run_point<Scalar>(point_of(config, k), config.trials, config.algos, registry, config.timing,
                                     config.verbose));
  std::vector<SweepRow> rows;
  for (std::size_t a = 0; a < config.algos.size(); ++a)
    for (const auto& cell : by_k) rows.push_back(cell[a]);
  return rows;
}

struct K95Point {
  Index l = 0;
  Index k95 = 0;
  double l0_bound = 0.0;         // (m + l - 1) / 2
  std::vector<SweepRow> rows;    // every evaluated k, ascending
};

/// Largest k in 1..m-1 whose success rate exceeds `threshold`, per l (with
/// r = min(l, k)). The ascending scan stops after `stop_after` consecutive
/// sub-threshold k unless full_scan is set.
template <typename Scalar>
std::vector<K95Point> k95(const ExperimentConfig& base, const std::vector<Index>& l_grid, const std::string& algo,
                          bool full_scan = false, double threshold = 0.95, Index stop_after = 3,
                          const SolverRegistry<Scalar>& registry = SolverRegistry<Scalar>::builtin()) {
  require(registry.find(algo) != nullptr, ErrorKind::config, "unregistered algorithm '" + algo + "'");
  require(base.trials >= 1 && base.m >= 2, ErrorKind::config, "k95: trials >= 1 and m >= 2 required");
  std::vector<K95Point> out;
  for (Index l : l_grid) {
    require(l >= 1, ErrorKind::config, "k95: l must be >= 1");
    K95Point p;
    p.l = l;
    p.l0_bound = static_cast<double>(base.m + l - 1) / 2.0;
    Index misses = 0;
    for (Index k = 1; k <= std::min(base.m - 1, base.n); ++k) {
      ConfigPoint pt = point_of(base, k);
      pt.l = l;
      pt.r = std::min(l, k);
      const SweepRow row = run_point<Scalar>(pt, base.trials, {algo}, registry, base.timing, base.verbose).front();
      p.rows.push_back(row);
      if (row.success_rate > threshold) {
        p.k95 = k;
        misses = 0;
      } else if (++misses >= stop_after && !full_scan) {
        break;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline const char* kCsvHeader = "algo,m,n,l,r,k,snr_db,trials,successes,success_rate,mean_l2_err,mean_runtime_ms,seed";

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const bool verbose = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.mean_fro_err.has_value(); });
  os << kCsvHeader << (verbose ? ",mean_fro_err" : "") << '\n';
  for (const auto& r : rows) {
    os << r.algo << ',' << r.m << ',' << r.n << ',' << r.l << ',' << r.r << ',' << r.k << ',' << format_double(r.snr_db)
       << ',' << r.trials << ',' << r.successes << ',' << format_double(r.success_rate) << ','
       << format_double(r.mean_l2_err) << ',' << format_double(r.mean_runtime_ms) << ',' << r.seed;
    if (verbose) os << ',' << format_double(r.mean_fro_err.value_or(0.0));
    os << '\n';
  }
}

inline void write_csv(const std::vector<SweepRow>& rows, const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path.string() + " for writing");
  write_csv(os, rows);
  require(static_cast<bool>(os), ErrorKind::io, "write failed: " + path.string());
}

inline std::vector<SweepRow> read_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::io, "csv: missing header");
  const bool verbose = line == std::string(kCsvHeader) + ",mean_fro_err";
  require(verbose || line == kCsvHeader, ErrorKind::io, "csv: unexpected header '" + line + "'");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    require(f.size() == (verbose ? 14u : 13u), ErrorKind::io, "csv: wrong field count in '" + line + "'");
    auto as_index = [](const std::string& s) { return static_cast<Index>(parse_double(s)); };
    SweepRow r;
    r.algo = f[0];
    r.m = as_index(f[1]);
    r.n = as_index(f[2]);
    r.l = as_index(f[3]);
    r.r = as_index(f[4]);
    r.k = as_index(f[5]);
    r.snr_db = parse_double(f[6]);
    r.trials = as_index(f[7]);
    r.successes = as_index(f[8]);
    r.success_rate = parse_double(f[9]);
    r.mean_l2_err = parse_double(f[10]);
    r.mean_runtime_ms = parse_double(f[11]);
    r.seed = std::stoull(f[12]);
    if (verbose) r.mean_fro_err = parse_double(f[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<SweepRow> read_csv(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path.string());
  return read_csv(is);
}

}  // namespace jspursuit
