#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ring_thermo/canonical.hpp"
#include "ring_thermo/core_model.hpp"
#include "ring_thermo/grand_canonical.hpp"
#include "ring_thermo/numerics.hpp"

namespace ring_thermo {

inline constexpr std::string_view kVersion = "0.1.0";

/// Invalid sweep configuration (CLI exit status 2).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SchemaMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Ensemble { Canonical, Grand };

inline std::string to_string(Ensemble e) {
  return e == Ensemble::Canonical ? "canonical" : "grand";
}

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  std::vector<double> values() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      out[static_cast<std::size_t>(i)] =
          i == points - 1 ? max : min + (max - min) * i / (points - 1);
    return out;
  }
};

/// Column order is fixed; a sweep emits the requested subset in this order.
inline constexpr std::string_view kQuantityOrder = "fuscnj";

struct SweepSpec {
  Ensemble ensemble = Ensemble::Canonical;
  Variant variant = Variant::Anisotropic;
  std::vector<double> strengths{0.0, 0.3, 0.6, 0.9, 1.2};
  Grid t_grid{0.01, 1.0, 100};
  std::optional<Grid> r0_grid;
  double fixed_T = 0.4;
  double mu = 0.1;
  UnitMode unit_mode = UnitMode::Dimensionless;
  double omega = 1.0;
  double mass = kElectronMass;
  double radius_nm = 50.0;
  Backend backend = Backend::DirectSum;
  /// Empty means every quantity the ensemble provides.
  std::string quantities;
  std::string output_path;
  TruncationPolicy policy;
  unsigned workers = 0;

  std::string columns() const {
    const std::string_view available = ensemble == Ensemble::Canonical ? "fuscj" : "fuscnj";
    std::string out;
    for (char q : kQuantityOrder) {
      const bool wanted = quantities.empty() ? available.find(q) != std::string_view::npos
                                             : quantities.find(q) != std::string::npos;
      if (wanted) out += q;
    }
    return out;
  }

  void validate() const {
    if (strengths.empty()) throw SpecError("strengths must not be empty");
    for (double s : strengths)
      if (!(s >= 0.0) || !std::isfinite(s)) throw SpecError("strengths must be non-negative");
    auto check_grid = [](const Grid& g, const char* what) {
      if (!(g.min > 0.0) || !std::isfinite(g.max) || !(g.max > g.min))
        throw SpecError(std::string(what) + " grid needs 0 < min < max");
      if (g.points < 2) throw SpecError(std::string(what) + " grid needs at least 2 points");
    };
    if (r0_grid) {
      check_grid(*r0_grid, "r0");
      if (!(fixed_T > 0.0)) throw SpecError("fixed-T must be positive");
    } else {
      check_grid(t_grid, "temperature");
    }
    if (!std::isfinite(mu)) throw SpecError("mu must be finite");
    if (unit_mode == UnitMode::Dimensionless && !(omega > 0.0))
      throw SpecError("omega must be positive");
    if (unit_mode == UnitMode::Physical && (!(mass > 0.0) || !(radius_nm > 0.0)))
      throw SpecError("mass and radius-nm must be positive");
    for (char q : quantities)
      if (kQuantityOrder.find(q) == std::string_view::npos)
        throw SpecError(std::string("unknown quantity '") + q + "'");
    if (ensemble == Ensemble::Canonical && quantities.find('n') != std::string::npos)
      throw SpecError("quantity 'n' is only defined for the grand ensemble");
    if (ensemble == Ensemble::Grand && backend == Backend::EulerMaclaurin)
      throw SpecError("the euler-maclaurin backend only applies to the canonical ensemble");
    try {
      policy.validate();
    } catch (const std::invalid_argument& e) {
      throw SpecError(e.what());
    }
  }

  /// Temperature warnings carried into the output metadata.
  std::vector<std::string> warnings() const {
    const double top = r0_grid ? fixed_T : t_grid.max;
    if (top > kValidityTmax)
      return {"temperatures above 1 eV lie outside the checked convergence window"};
    return {};
  }
};

struct SweepRow {
  double strength;
  double grid;
  std::vector<double> values;
  std::optional<std::string> error;
};

struct SweepResult {
  SweepSpec spec;
  std::string columns;
  std::vector<SweepRow> rows;

  bool has_failures() const {
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.error.has_value(); });
  }
};

/// Model at one grid point; radius sweeps rescale omega and m r0 with r0.
inline RingModel sweep_model(const SweepSpec& spec, std::optional<double> r0) {
  if (spec.unit_mode == UnitMode::Physical)
    return RingModel::physical(spec.mass, r0.value_or(spec.radius_nm));
  const double r = r0.value_or(1.0);
  return RingModel::dimensionless(spec.omega / (r * r), 1.0, r);
}

inline std::vector<double> evaluate_point(const SweepSpec& spec, const std::string& columns,
                                          double strength, double grid_value) {
  const auto coupling = Coupling::make(spec.variant, strength);
  const bool radius = spec.r0_grid.has_value();
  const auto model = sweep_model(spec, radius ? std::optional<double>(grid_value) : std::nullopt);
  const double t = radius ? spec.fixed_T : grid_value;
  std::vector<double> out;
  out.reserve(columns.size());
  if (spec.ensemble == Ensemble::Canonical) {
    const auto st = canonical_evaluate(model, coupling, t, spec.backend, spec.policy);
    for (char q : columns) {
      switch (q) {
        case 'f': out.push_back(st.f); break;
        case 'u': out.push_back(st.u); break;
        case 's': out.push_back(st.s_entropy); break;
        case 'c': out.push_back(st.c); break;
        case 'j': out.push_back(st.j_z); break;
      }
    }
  } else {
    const auto st = grand_evaluate(model, coupling, t, spec.mu, spec.policy);
    for (char q : columns) {
      switch (q) {
        case 'f': out.push_back(st.phi); break;
        case 'u': out.push_back(st.u_total); break;
        case 's': out.push_back(st.s_total); break;
        case 'c': out.push_back(st.c_total); break;
        case 'n': out.push_back(st.n_mean); break;
        case 'j': out.push_back(st.j_z); break;
      }
    }
  }
  for (double v : out)
    if (!std::isfinite(v)) throw std::runtime_error("non-finite value");
  return out;
}

/// Evaluates every (strength, grid) point. Rows are strength-major with the
/// grid ascending; numerical failures are recorded on the row, not thrown.
inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result{spec, spec.columns(), {}};
  const auto grid = spec.r0_grid ? spec.r0_grid->values() : spec.t_grid.values();
  for (double s : spec.strengths)
    for (double g : grid) result.rows.push_back(SweepRow{s, g, {}, std::nullopt});

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) {
      auto& row = result.rows[i];
      try {
        row.values = evaluate_point(spec, result.columns, row.strength, row.grid);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(result.rows.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  return result;
}

/// Shortest text that reads back as the same double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_csv(const SweepResult& result) {
  const auto& spec = result.spec;
  std::ostringstream os;
  os << "# ring-thermo v" << kVersion << '\n';
  os << "# ensemble=" << to_string(spec.ensemble) << '\n';
  os << "# variant=" << to_string(spec.variant) << '\n';
  os << "# strengths=";
  for (std::size_t i = 0; i < spec.strengths.size(); ++i)
    os << (i ? "," : "") << format_double(spec.strengths[i]);
  os << '\n';
  if (spec.r0_grid) {
    os << "# grid=r0\n";
    os << "# r0_sweep=" << format_double(spec.r0_grid->min) << ','
       << format_double(spec.r0_grid->max) << ',' << spec.r0_grid->points << '\n';
    os << "# fixed_T=" << format_double(spec.fixed_T) << '\n';
  } else {
    os << "# grid=T\n";
    os << "# t_grid=" << format_double(spec.t_grid.min) << ',' << format_double(spec.t_grid.max)
       << ',' << spec.t_grid.points << '\n';
  }
  if (spec.ensemble == Ensemble::Grand) os << "# mu=" << format_double(spec.mu) << '\n';
  os << "# unit_mode=" << to_string(spec.unit_mode) << '\n';
  if (spec.unit_mode == UnitMode::Dimensionless) {
    os << "# omega=" << format_double(spec.omega) << '\n';
  } else {
    os << "# mass=" << format_double(spec.mass) << '\n';
    os << "# radius_nm=" << format_double(spec.radius_nm) << '\n';
  }
  os << "# backend=" << to_string(spec.backend) << '\n';
  for (const auto& w : spec.warnings()) os << "# warning=" << w << '\n';
  os << "strength,grid";
  for (char q : result.columns) os << ',' << q;
  os << '\n';
  for (const auto& row : result.rows) {
    os << format_double(row.strength) << ',' << format_double(row.grid);
    for (std::size_t k = 0; k < result.columns.size(); ++k)
      os << ',' << (row.error ? std::string("ERROR") : format_double(row.values[k]));
    os << '\n';
  }
  return os.str();
}

inline void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << format_csv(result);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Reading datasets back and comparing them.

/// A parsed CSV; ERROR cells are stored as NaN.
struct Dataset {
  std::vector<std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw SchemaMismatch("no column '" + std::string(name) + "'");
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
  }
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

/// Whole-string decimal parse; subnormals are accepted.
inline std::optional<double> to_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return std::nullopt;
  return v;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline Dataset parse_csv(std::istream& in, const std::string& name = "<stream>") {
  Dataset ds;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      ds.metadata.push_back(line);
      continue;
    }
    auto cells = detail::split(line, ',');
    if (ds.columns.empty()) {
      ds.columns = std::move(cells);
      continue;
    }
    if (cells.size() != ds.columns.size())
      throw SchemaMismatch(name + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(ds.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (c == "ERROR") {
        row.push_back(std::nan(""));
        continue;
      }
      const auto v = detail::to_double(c);
      if (!v) throw SchemaMismatch(name + ": cannot parse cell '" + c + "'");
      row.push_back(*v);
    }
    ds.rows.push_back(std::move(row));
  }
  if (ds.columns.empty()) throw SchemaMismatch(name + ": no column header");
  return ds;
}

inline Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_csv(in, path);
}

struct ColumnDeviation {
  std::string name;
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool pass = true;
};

struct CompareReport {
  std::vector<ColumnDeviation> columns;
  bool pass = true;
};

/// Cellwise |a - b| <= atol + rtol |b|; two ERROR cells count as equal.
inline CompareReport compare_datasets(const Dataset& a, const Dataset& b, double rtol, double atol) {
  if (a.columns != b.columns) throw SchemaMismatch("column headers differ");
  if (a.rows.size() != b.rows.size())
    throw SchemaMismatch("row counts differ: " + std::to_string(a.rows.size()) + " vs " +
                         std::to_string(b.rows.size()));
  CompareReport report;
  for (std::size_t k = 0; k < a.columns.size(); ++k) {
    ColumnDeviation dev{a.columns[k]};
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      const double x = a.rows[i][k];
      const double y = b.rows[i][k];
      if (std::isnan(x) || std::isnan(y)) {
        if (std::isnan(x) != std::isnan(y)) {
          dev.pass = false;
          dev.max_abs = std::numeric_limits<double>::infinity();
        }
        continue;
      }
      const double d = std::abs(x - y);
      dev.max_abs = std::max(dev.max_abs, d);
      if (y != 0.0) dev.max_rel = std::max(dev.max_rel, d / std::abs(y));
      else if (d > 0.0) dev.max_rel = std::numeric_limits<double>::infinity();
      if (d > atol + rtol * std::abs(y)) dev.pass = false;
    }
    report.pass = report.pass && dev.pass;
    report.columns.push_back(dev);
  }
  return report;
}

inline CompareReport compare_datasets(const std::string& path_a, const std::string& path_b,
                                      double rtol, double atol) {
  return compare_datasets(read_csv(path_a), read_csv(path_b), rtol, atol);
}

// ---------------------------------------------------------------------------
// Flat key = value configuration. Keys are the CLI flag names without the
// leading dashes; '_' and '-' are interchangeable.

inline std::string normalize_key(std::string key) {
  key = detail::trim(std::move(key));
  while (!key.empty() && key.front() == '-') key.erase(key.begin());
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& value) {
  if (const auto v = to_double(trim(value))) return *v;
  throw SpecError("'" + key + "': not a number: '" + value + "'");
}

inline long parse_integer(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e15)
    throw SpecError("'" + key + "': expected an integer, got '" + value + "'");
  return static_cast<long>(v);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& cell : split(value, ',')) {
    const auto t = trim(cell);
    if (!t.empty()) out.push_back(parse_number(key, t));
  }
  return out;
}

}  // namespace detail

inline void apply_setting(SweepSpec& spec, const std::string& raw_key, const std::string& raw_value) {
  const auto key = normalize_key(raw_key);
  const auto value = detail::trim(raw_value);
  using detail::parse_integer;
  using detail::parse_number;
  if (key == "ensemble") {
    if (value == "canonical") spec.ensemble = Ensemble::Canonical;
    else if (value == "grand" || value == "grand-canonical") spec.ensemble = Ensemble::Grand;
    else throw SpecError("ensemble must be canonical or grand");
  } else if (key == "variant") {
    if (value == "anisotropic") spec.variant = Variant::Anisotropic;
    else if (value == "isotropic") spec.variant = Variant::Isotropic;
    else throw SpecError("variant must be anisotropic or isotropic");
  } else if (key == "strengths") {
    spec.strengths = detail::parse_list(key, value);
  } else if (key == "t-min") {
    spec.t_grid.min = parse_number(key, value);
  } else if (key == "t-max") {
    spec.t_grid.max = parse_number(key, value);
  } else if (key == "t-points") {
    spec.t_grid.points = static_cast<int>(parse_integer(key, value));
  } else if (key == "r0-sweep") {
    const auto v = detail::parse_list(key, value);
    if (v.size() != 3 || v[2] != std::floor(v[2]))
      throw SpecError("r0-sweep expects min,max,points");
    spec.r0_grid = Grid{v[0], v[1], static_cast<int>(v[2])};
  } else if (key == "fixed-T" || key == "fixed-t") {
    spec.fixed_T = parse_number(key, value);
  } else if (key == "mu") {
    spec.mu = parse_number(key, value);
  } else if (key == "omega") {
    spec.omega = parse_number(key, value);
    spec.unit_mode = UnitMode::Dimensionless;
  } else if (key == "mass") {
    spec.mass = parse_number(key, value);
    spec.unit_mode = UnitMode::Physical;
  } else if (key == "radius-nm") {
    spec.radius_nm = parse_number(key, value);
    spec.unit_mode = UnitMode::Physical;
  } else if (key == "unit-mode") {
    if (value == "physical") spec.unit_mode = UnitMode::Physical;
    else if (value == "dimensionless") spec.unit_mode = UnitMode::Dimensionless;
    else throw SpecError("unit-mode must be physical or dimensionless");
  } else if (key == "backend") {
    if (value == "direct") spec.backend = Backend::DirectSum;
    else if (value == "em" || value == "euler-maclaurin") spec.backend = Backend::EulerMaclaurin;
    else throw SpecError("backend must be direct or em");
  } else if (key == "quantities") {
    std::string q;
    for (const auto& cell : detail::split(value, ',')) {
      const auto t = detail::trim(cell);
      if (t == "phi") q += 'f';
      else if (t.size() == 1) q += t;
      else if (!t.empty()) throw SpecError("unknown quantity '" + t + "'");
    }
    if (q.empty()) throw SpecError("quantities must not be empty");
    spec.quantities = q;
  } else if (key == "out") {
    spec.output_path = value;
  } else if (key == "workers") {
    spec.workers = static_cast<unsigned>(std::max(0L, parse_integer(key, value)));
  } else if (key == "n-max") {
    spec.policy.n_max = parse_integer(key, value);
    spec.policy.n_min = std::min(spec.policy.n_min, spec.policy.n_max);
  } else if (key == "n-min") {
    spec.policy.n_min = parse_integer(key, value);
  } else if (key == "tail-tol") {
    spec.policy.tail_tol = parse_number(key, value);
  } else {
    throw SpecError("unknown setting '" + key + "'");
  }
}

inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in,
                                                                     const std::string& name) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError(name + ":" + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(normalize_key(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline SweepSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open config '" + path + "'");
  SweepSpec spec;
  for (const auto& [k, v] : parse_config(in, path)) apply_setting(spec, k, v);
  return spec;
}

}  // namespace ring_thermo
