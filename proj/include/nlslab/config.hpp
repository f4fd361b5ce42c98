#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlslab/evolve.hpp"

namespace nlslab {

using json = nlohmann::json;

struct GridConfig {
  int n_points = 4096;
  double r_max = 30.0;
  int stencil_order = 4;
};

struct Tolerances {
  double shoot_tol = 1e-12;
  double eig_tol = 1e-13;
  double newton_tol = 1e-13;
  double mass_budget = 1e-8;
  double energy_budget = 1e-7;
};

struct EvolutionConfig {
  double dt = 1e-4;
  int record_stride = 10;
  double blowup_factor = 10.0;
  int n_points = 1024;             // evolution grid; static checks use grid.n_points
  std::string scheme = "implicit_cn";
  double horizon_forward = 8.0;    // in units of 1/e0
  double horizon_backward = 20.0;
  double profile_level = 1e-2;     // |A| e^{-e0 t0}
  int profile_order = 3;
};

struct Paths {
  std::string golden_constants = "data/golden_constants.json";
  std::string output_dir = "out";
};

struct LabConfig {
  GridConfig grid;
  Tolerances tolerances;
  EvolutionConfig evolution;
  Paths paths;
  std::uint64_t seed = 7;
  json sweep = json::object();  // classify sweep description, see configs/default.json

  void validate() const;
};

void to_json(json& j, const LabConfig& c);
LabConfig config_from_json(const json& j);

// --config path, else NLS_LAB_CONFIG, else defaults
LabConfig load_config(const std::optional<std::string>& path);
std::optional<std::string> config_path_from_env();

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits
std::string config_hash(const LabConfig& c);
std::string code_version();

EvolveOptions evolve_options(const LabConfig& c);

struct GoldenValue {
  double value = 0;
  std::string provenance;
};

struct GoldenConstants {
  GoldenValue q0, m_q, e0;
};

// paths.golden_constants as given, else relative to the source tree the library was built from
std::filesystem::path golden_path(const LabConfig& c);

// Each entry must carry a provenance note naming its oracle script.
GoldenConstants load_golden(const std::filesystem::path& p);

// {config_hash, code_version} plus the payload fields
json envelope(const LabConfig& c, json payload);

void write_json(const std::filesystem::path& p, const json& j);

struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

// Each line of `comment` is written as a leading "# " line.
void write_csv(const std::filesystem::path& p, const std::vector<CsvColumn>& cols,
               const std::string& comment = {});
// "config_hash=<hash> code_version=<version>", the header line every CSV output carries
std::string csv_stamp(const LabConfig& c);
std::vector<CsvColumn> read_csv(const std::filesystem::path& p);

std::vector<CsvColumn> trace_columns(const EvolutionTrace& tr);
void write_field_csv(const std::filesystem::path& p, const RadialField& u,
                     const std::string& comment = {});
RadialField read_field_csv(const std::filesystem::path& p, GridPtr grid);

// Run directory layout: trace.json (metadata and snapshot index), trace.csv,
// snapshots/snap_NNNNN.csv.
void write_trace_dir(const std::filesystem::path& dir, const EvolutionTrace& tr, const LabConfig& c);
// Accepts the directory or its trace.json; the grid must match the one the run used.
EvolutionTrace read_trace_dir(const std::filesystem::path& p, GridPtr grid);
// Grid parameters recorded in a run directory.
std::pair<int, double> trace_grid(const std::filesystem::path& p);

}  // namespace nlslab
