#include "nlslab/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef NLSLAB_VERSION
#define NLSLAB_VERSION "0.0.0"
#endif

namespace nlslab {

namespace fs = std::filesystem;

void LabConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::usage, "config: " + what);
  };
  need(grid.n_points >= 256, "grid.n_points must be at least 256");
  need(grid.r_max >= 20, "grid.r_max must be at least 20");
  need(grid.stencil_order == 2 || grid.stencil_order == 4, "grid.stencil_order must be 2 or 4");
  need(tolerances.shoot_tol > 0 && tolerances.eig_tol > 0 && tolerances.newton_tol > 0 &&
           tolerances.mass_budget > 0 && tolerances.energy_budget > 0,
       "tolerances must be positive");
  need(evolution.dt > 0, "evolution.dt must be positive");
  need(evolution.record_stride >= 1, "evolution.record_stride must be positive");
  need(evolution.blowup_factor > 1, "evolution.blowup_factor must exceed 1");
  need(evolution.n_points >= 256, "evolution.n_points must be at least 256");
  need(evolution.horizon_forward > 0 && evolution.horizon_backward > 0,
       "evolution horizons must be positive");
  need(evolution.profile_level > 0 && evolution.profile_order >= 1,
       "evolution profile settings invalid");
  parse_time_scheme(evolution.scheme);
}

void to_json(json& j, const LabConfig& c) {
  j = json{
      {"grid", {{"n_points", c.grid.n_points}, {"r_max", c.grid.r_max},
                {"stencil_order", c.grid.stencil_order}}},
      {"tolerances", {{"shoot_tol", c.tolerances.shoot_tol}, {"eig_tol", c.tolerances.eig_tol},
                      {"newton_tol", c.tolerances.newton_tol},
                      {"mass_budget", c.tolerances.mass_budget},
                      {"energy_budget", c.tolerances.energy_budget}}},
      {"evolution", {{"dt", c.evolution.dt}, {"record_stride", c.evolution.record_stride},
                     {"blowup_factor", c.evolution.blowup_factor},
                     {"n_points", c.evolution.n_points}, {"scheme", c.evolution.scheme},
                     {"horizon_forward", c.evolution.horizon_forward},
                     {"horizon_backward", c.evolution.horizon_backward},
                     {"profile_level", c.evolution.profile_level},
                     {"profile_order", c.evolution.profile_order}}},
      {"paths", {{"golden_constants", c.paths.golden_constants},
                 {"output_dir", c.paths.output_dir}}},
      {"seed", c.seed},
      {"sweep", c.sweep},
  };
}

namespace {

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::usage, std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw Error(ErrorKind::usage, "unknown config key '" + where + it.key() + "'");
  }
}

}  // namespace

LabConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::usage, "config must be a JSON object");
  reject_unknown(j, {"grid", "tolerances", "evolution", "paths", "seed", "sweep"}, "");
  LabConfig c;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    reject_unknown(g, {"n_points", "r_max", "stencil_order"}, "grid.");
    take(g, "n_points", c.grid.n_points);
    take(g, "r_max", c.grid.r_max);
    take(g, "stencil_order", c.grid.stencil_order);
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    reject_unknown(t, {"shoot_tol", "eig_tol", "newton_tol", "mass_budget", "energy_budget"},
                   "tolerances.");
    take(t, "shoot_tol", c.tolerances.shoot_tol);
    take(t, "eig_tol", c.tolerances.eig_tol);
    take(t, "newton_tol", c.tolerances.newton_tol);
    take(t, "mass_budget", c.tolerances.mass_budget);
    take(t, "energy_budget", c.tolerances.energy_budget);
  }
  if (j.contains("evolution")) {
    const auto& e = j["evolution"];
    reject_unknown(e, {"dt", "record_stride", "blowup_factor", "n_points", "scheme",
                       "horizon_forward", "horizon_backward", "profile_level", "profile_order"},
                   "evolution.");
    take(e, "dt", c.evolution.dt);
    take(e, "record_stride", c.evolution.record_stride);
    take(e, "blowup_factor", c.evolution.blowup_factor);
    take(e, "n_points", c.evolution.n_points);
    take(e, "scheme", c.evolution.scheme);
    take(e, "horizon_forward", c.evolution.horizon_forward);
    take(e, "horizon_backward", c.evolution.horizon_backward);
    take(e, "profile_level", c.evolution.profile_level);
    take(e, "profile_order", c.evolution.profile_order);
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    reject_unknown(p, {"golden_constants", "output_dir"}, "paths.");
    take(p, "golden_constants", c.paths.golden_constants);
    take(p, "output_dir", c.paths.output_dir);
  }
  take(j, "seed", c.seed);
  if (j.contains("sweep")) c.sweep = j["sweep"];
  c.validate();
  return c;
}

std::optional<std::string> config_path_from_env() {
  const char* p = std::getenv("NLS_LAB_CONFIG");
  if (p && *p) return std::string(p);
  return std::nullopt;
}

LabConfig load_config(const std::optional<std::string>& path) {
  auto p = path ? path : config_path_from_env();
  if (!p) {
    LabConfig c;
    c.validate();
    return c;
  }
  std::ifstream in(*p);
  if (!in) throw Error(ErrorKind::usage, "cannot open config '" + *p + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::usage, "config '" + *p + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const LabConfig& c) {
  const std::string s = json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string code_version() { return NLSLAB_VERSION; }

EvolveOptions evolve_options(const LabConfig& c) {
  EvolveOptions o;
  o.dt = c.evolution.dt;
  o.record_stride = c.evolution.record_stride;
  o.blowup_factor = c.evolution.blowup_factor;
  o.scheme = parse_time_scheme(c.evolution.scheme);
  o.mass_budget = c.tolerances.mass_budget;
  o.energy_budget = c.tolerances.energy_budget;
  return o;
}

fs::path golden_path(const LabConfig& c) {
  fs::path p(c.paths.golden_constants);
#ifdef NLSLAB_SOURCE_DIR
  if (p.is_relative() && !fs::exists(p) && fs::exists(fs::path(NLSLAB_SOURCE_DIR) / p))
    return fs::path(NLSLAB_SOURCE_DIR) / p;
#endif
  return p;
}

GoldenConstants load_golden(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::io, "golden constants file '" + p.string() + "' not found");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::io, "golden constants file is not valid JSON: " + std::string(e.what()));
  }
  auto get = [&](const char* key) {
    if (!j.contains(key) || !j[key].contains("value") || !j[key].contains("provenance"))
      throw Error(ErrorKind::structural, std::string("golden constant '") + key +
                                             "' needs a value and a provenance note");
    GoldenValue v;
    v.value = j[key]["value"].get<double>();
    v.provenance = j[key]["provenance"].get<std::string>();
    if (v.provenance.find("oracle") == std::string::npos)
      throw Error(ErrorKind::structural,
                  std::string("provenance of '") + key + "' does not name an oracle script");
    return v;
  };
  return {get("q0"), get("m_Q"), get("e0")};
}

json envelope(const LabConfig& c, json payload) {
  payload["config_hash"] = config_hash(c);
  payload["code_version"] = code_version();
  return payload;
}

void write_json(const fs::path& p, const json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + p.string() + "'");
  out << j.dump(2) << "\n";
}

void write_csv(const fs::path& p, const std::vector<CsvColumn>& cols, const std::string& comment) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + p.string() + "'");
  if (!comment.empty()) {
    std::stringstream cs(comment);
    for (std::string line; std::getline(cs, line);) out << "# " << line << "\n";
  }
  size_t rows = 0;
  for (size_t k = 0; k < cols.size(); ++k) {
    out << (k ? "," : "") << cols[k].name;
    rows = std::max(rows, cols[k].values.size());
  }
  out << "\n" << std::setprecision(17);
  for (size_t i = 0; i < rows; ++i) {
    for (size_t k = 0; k < cols.size(); ++k) {
      if (k) out << ',';
      if (i < cols[k].values.size()) out << cols[k].values[i];
    }
    out << "\n";
  }
}

std::vector<CsvColumn> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + p.string() + "'");
  std::string line;
  std::vector<CsvColumn> cols;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (cols.empty()) {
      while (std::getline(ss, cell, ',')) cols.push_back({cell, {}});
      continue;
    }
    size_t k = 0;
    while (std::getline(ss, cell, ',') && k < cols.size()) {
      try {
        cols[k++].values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::io, "non-numeric cell '" + cell + "' in " + p.string());
      }
    }
  }
  if (cols.empty()) throw Error(ErrorKind::io, "empty CSV '" + p.string() + "'");
  return cols;
}

std::vector<CsvColumn> trace_columns(const EvolutionTrace& tr) {
  std::vector<CsvColumn> cols = {
      {"t", tr.times},           {"mass", tr.mass_series}, {"energy", tr.energy_series},
      {"grad", tr.grad_series},  {"delta", tr.delta_series}, {"pot", tr.pot_series},
  };
  if (!tr.dist_series.empty()) cols.push_back({"dist", tr.dist_series});
  std::vector<double> lv(tr.level_series.begin(), tr.level_series.end());
  cols.push_back({"level", lv});
  return cols;
}

std::string csv_stamp(const LabConfig& c) {
  return "config_hash=" + config_hash(c) + " code_version=" + code_version();
}

void write_field_csv(const fs::path& p, const RadialField& u, const std::string& comment) {
  write_csv(p, {{"r", u.grid->nodes()}, {"re", u.re}, {"im", u.im}}, comment);
}

RadialField read_field_csv(const fs::path& p, GridPtr grid) {
  auto cols = read_csv(p);
  if (cols.size() < 3 || cols[0].name != "r")
    throw Error(ErrorKind::io, "field CSV needs columns r,re,im");
  const auto& r = cols[0].values;
  if (static_cast<int>(r.size()) != grid->n_points() ||
      std::abs(r.back() - grid->r_max()) > 1e-9 * grid->r_max())
    throw Error(ErrorKind::structural, "field CSV grid does not match the configured grid");
  return RadialField(grid, cols[1].values, cols[2].values);
}

}  // namespace nlslab

namespace nlslab {

namespace {

fs::path trace_json_path(const fs::path& p) {
  return fs::is_directory(p) ? p / "trace.json" : p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + p.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::io, "'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

void write_trace_dir(const fs::path& dir, const EvolutionTrace& tr, const LabConfig& c) {
  fs::create_directories(dir / "snapshots");
  json snaps = json::array();
  int k = 0;
  for (const auto& [t, u] : tr.snapshots) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05d.csv", k++);
    write_field_csv(dir / "snapshots" / name, u, csv_stamp(c));
    snaps.push_back({{"t", t}, {"file", std::string("snapshots/") + name}});
  }
  write_csv(dir / "trace.csv", trace_columns(tr), csv_stamp(c));
  const auto& g = *tr.snapshots.begin()->second.grid;
  json j{{"t0", tr.t0}, {"t1", tr.t1}, {"dt", tr.dt},
         {"n_points", g.n_points()}, {"r_max", g.r_max()},
         {"steps", tr.steps}, {"substeps", tr.substeps},
         {"mass_drift", tr.mass_drift}, {"energy_drift", tr.energy_drift},
         {"energy_drift_resolved", tr.energy_drift_resolved},
         {"drift_flagged", tr.drift_flagged}, {"warnings", tr.warnings},
         {"series", "trace.csv"}, {"snapshots", snaps}};
  if (tr.blowup)
    j["blowup"] = {{"detected_at", tr.blowup->detected_at}, {"reason", to_string(tr.blowup->reason)}};
  else
    j["blowup"] = nullptr;
  write_json(dir / "trace.json", envelope(c, j));
}

std::pair<int, double> trace_grid(const fs::path& p) {
  json j = read_json(trace_json_path(p));
  return {j.at("n_points").get<int>(), j.at("r_max").get<double>()};
}

EvolutionTrace read_trace_dir(const fs::path& p, GridPtr grid) {
  const fs::path jp = trace_json_path(p);
  const fs::path dir = jp.parent_path();
  json j = read_json(jp);
  EvolutionTrace tr;
  try {
    tr.t0 = j.at("t0");
    tr.t1 = j.at("t1");
    tr.dt = j.at("dt");
    tr.steps = j.value("steps", 0L);
    tr.substeps = j.value("substeps", 0L);
    tr.mass_drift = j.value("mass_drift", 0.0);
    tr.energy_drift = j.value("energy_drift", 0.0);
    tr.energy_drift_resolved = j.value("energy_drift_resolved", 0.0);
    tr.warnings = j.value("warnings", std::vector<std::string>{});
    if (j.contains("blowup") && !j["blowup"].is_null()) {
      BlowupRecord b;
      b.detected_at = j["blowup"].at("detected_at");
      const std::string why = j["blowup"].at("reason");
      b.reason = why == "nan" ? BlowupReason::nan
                 : why == "unresolved" ? BlowupReason::unresolved
                                       : BlowupReason::grad_explosion;
      tr.blowup = b;
    }
    for (const auto& s : j.at("snapshots"))
      tr.snapshots.emplace(s.at("t").get<double>(),
                           read_field_csv(dir / s.at("file").get<std::string>(), grid));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, "malformed trace metadata: " + std::string(e.what()));
  }
  auto cols = read_csv(dir / j.value("series", std::string("trace.csv")));
  auto col = [&](const std::string& name) -> std::vector<double> {
    for (auto& c : cols)
      if (c.name == name) return c.values;
    throw Error(ErrorKind::io, "trace CSV lacks column '" + name + "'");
  };
  tr.times = col("t");
  tr.mass_series = col("mass");
  tr.energy_series = col("energy");
  tr.grad_series = col("grad");
  tr.delta_series = col("delta");
  tr.pot_series = col("pot");
  for (auto& c : cols)
    if (c.name == "dist") tr.dist_series = c.values;
  for (double v : col("level")) tr.level_series.push_back(static_cast<int>(v));
  if (tr.snapshots.empty()) throw Error(ErrorKind::insufficient_data, "trace has no snapshots");
  return tr;
}

}  // namespace nlslab
