#pragma once

// Matrix Market (dense array) files, problem manifests and result JSON.
//
// Indices are 0-based in JSON. Matrix Market array files carry no indices;
// entries are listed column-major, one per line ("re im" for complex).

#include "jspursuit/core.hpp"
#include "jspursuit/diagnostics.hpp"
#include "jspursuit/pursuit.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace jspursuit {

namespace fs = std::filesystem;

/// Shortest round-trip decimal representation, locale-independent.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  if (s == "inf" || s == "+inf" || s == "Infinity") return kInfinity;
  if (s == "-inf") return -kInfinity;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorKind::io,
          "cannot parse number '" + std::string(s) + "'");
  return v;
}

struct MtxHeader {
  Field field = Field::real;
  Index rows = 0;
  Index cols = 0;
};

template <typename Scalar>
void write_mtx(std::ostream& os, const Mat<Scalar>& a) {
  os << "%%MatrixMarket matrix array " << to_string(field_of<Scalar>()) << " general\n";
  os << a.rows() << ' ' << a.cols() << '\n';
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      if constexpr (is_complex_v<Scalar>)
        os << format_double(a(i, j).real()) << ' ' << format_double(a(i, j).imag()) << '\n';
      else
        os << format_double(a(i, j)) << '\n';
    }
}

template <typename Scalar>
void write_mtx(const fs::path& path, const Mat<Scalar>& a) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path.string() + " for writing");
  write_mtx(os, a);
  require(static_cast<bool>(os), ErrorKind::io, "write failed: " + path.string());
}

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline MtxHeader read_mtx_header(std::istream& is, const std::string& name) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::io, name + ": empty file");
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  require(banner == "%%MatrixMarket", ErrorKind::io, name + ": missing %%MatrixMarket banner");
  require(lower(object) == "matrix" && lower(format) == "array", ErrorKind::io,
          name + ": only dense 'matrix array' files are supported");
  require(lower(symmetry) == "general", ErrorKind::io, name + ": only 'general' symmetry is supported");
  MtxHeader h;
  field = lower(field);
  if (field == "real" || field == "integer" || field == "double")
    h.field = Field::real;
  else if (field == "complex")
    h.field = Field::complex;
  else
    throw Error(ErrorKind::io, name + ": unsupported field '" + field + "'");
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ds(line);
    require(static_cast<bool>(ds >> h.rows >> h.cols), ErrorKind::io, name + ": bad size line");
    break;
  }
  require(h.rows >= 1 && h.cols >= 1, ErrorKind::io, name + ": dimensions must be >= 1");
  return h;
}

}  // namespace detail

template <typename Scalar>
Mat<Scalar> read_mtx(std::istream& is, const std::string& name = "<stream>") {
  const MtxHeader h = detail::read_mtx_header(is, name);
  require(is_complex_v<Scalar> || h.field == Field::real, ErrorKind::io,
          name + ": complex file read into a real matrix");
  Mat<Scalar> a(h.rows, h.cols);
  std::string tok_re, tok_im;
  for (Index j = 0; j < h.cols; ++j)
    for (Index i = 0; i < h.rows; ++i) {
      require(static_cast<bool>(is >> tok_re), ErrorKind::io, name + ": truncated entries");
      double re = parse_double(tok_re);
      double im = 0.0;
      if (h.field == Field::complex) {
        require(static_cast<bool>(is >> tok_im), ErrorKind::io, name + ": truncated entries");
        im = parse_double(tok_im);
      }
      if constexpr (is_complex_v<Scalar>)
        a(i, j) = Scalar(re, im);
      else
        a(i, j) = re;
    }
  require(a.allFinite(), ErrorKind::io, name + ": non-finite entries");
  return a;
}

template <typename Scalar>
Mat<Scalar> read_mtx(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path.string());
  return read_mtx<Scalar>(is, path.string());
}

inline MtxHeader peek_mtx_header(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path.string());
  return detail::read_mtx_header(is, path.string());
}

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, path.string() + ": " + e.what());
  }
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  require(static_cast<bool>(os), ErrorKind::io, "write failed: " + path.string());
}

/// Writes phi.mtx, y.mtx, optionally x0.mtx, and problem.json into `dir`.
template <typename Scalar>
fs::path save_problem(const fs::path& dir, const RecoveryProblem<Scalar>& p) {
  fs::create_directories(dir);
  nlohmann::json j;
  write_mtx(dir / "phi.mtx", p.phi);
  write_mtx(dir / "y.mtx", p.y);
  j["phi"] = "phi.mtx";
  j["y"] = "y.mtx";
  if (p.truth) {
    write_mtx(dir / "x0.mtx", p.truth->x0);
    j["x0"] = "x0.mtx";
    j["omega"] = p.truth->omega;
  }
  if (p.k) j["k"] = *p.k;
  const fs::path manifest = dir / "problem.json";
  write_json(manifest, j);
  return manifest;
}

/// Field of the problem's phi file, so callers can dispatch on it.
inline Field manifest_field(const fs::path& manifest) {
  const nlohmann::json j = read_json(manifest);
  require(j.contains("phi") && j["phi"].is_string(), ErrorKind::config, "manifest: missing 'phi'");
  const fs::path base = manifest.parent_path();
  Field f = peek_mtx_header(base / j["phi"].get<std::string>()).field;
  if (j.contains("y") && j["y"].is_string() &&
      peek_mtx_header(base / j["y"].get<std::string>()).field == Field::complex)
    f = Field::complex;
  return f;
}

template <typename Scalar>
RecoveryProblem<Scalar> load_problem(const fs::path& manifest) {
  const nlohmann::json j = read_json(manifest);
  const fs::path base = manifest.parent_path();
  auto path_of = [&](const char* key) {
    require(j.contains(key) && j[key].is_string(), ErrorKind::config,
            "manifest: missing string field '" + std::string(key) + "'");
    return base / j[key].get<std::string>();
  };
  RecoveryProblem<Scalar> p;
  p.phi = read_mtx<Scalar>(path_of("phi"));
  p.y = read_mtx<Scalar>(path_of("y"));
  try {
    if (j.contains("k")) p.k = j["k"].get<Index>();
    if (j.contains("x0")) {
      Truth<Scalar> t;
      t.x0 = read_mtx<Scalar>(path_of("x0"));
      t.omega = j.contains("omega") ? j["omega"].get<IndexSet>() : row_support(t.x0);
      p.truth = std::move(t);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, "manifest: " + std::string(e.what()));
  }
  p.validate();
  return p;
}

/// {algo, omega_hat, omega_c?, zeta, runtime_ms, x_hat} with x_hat written next to `json_path`.
template <typename Scalar>
nlohmann::json result_to_json(const std::string& algo, const RecoveryResult<Scalar>& r, const std::string& x_hat_path) {
  nlohmann::json j;
  j["algo"] = algo;
  j["omega_hat"] = r.omega_hat;
  if (r.omega_c) j["omega_c"] = *r.omega_c;
  j["zeta"] = r.zeta;
  j["runtime_ms"] = r.runtime_ms;
  j["x_hat"] = x_hat_path;
  if (r.rank_deficient) j["rank_deficient"] = true;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

template <typename Scalar>
void save_result(const fs::path& json_path, const std::string& algo, const RecoveryResult<Scalar>& r) {
  const fs::path parent = json_path.parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  const std::string stem = json_path.stem().string() + "_x_hat.mtx";
  write_mtx(parent / stem, r.x_hat);
  write_json(json_path, result_to_json(algo, r, stem));
}

inline nlohmann::json report_to_json(const MeasureReport& r) {
  nlohmann::json j;
  j["krank"] = r.krank;
  j["coherence"] = r.coherence;
  j["exhaustive"] = r.exhaustive;
  if (r.lcp) j["lcp"] = *r.lcp;
  if (r.wrip) j["wrip"] = *r.wrip;
  if (r.theorem3) j["theorem3"] = {{"a1", r.theorem3->a1}, {"a2", r.theorem3->a2}, {"a3", r.theorem3->a3}};
  return j;
}

}  // namespace jspursuit
