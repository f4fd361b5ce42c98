#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/config.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

enum class Side { subcritical, critical, supercritical };
enum class Outcome { converges_to_Q_orbit, scatter_proxy, blowup, undetermined };

std::string to_string(Side s);
std::string to_string(Outcome o);

struct DataSpec {
  enum class Kind { profile, scaled_orbit, perturbed };
  Kind kind = Kind::profile;
  double a = 1.0;                 // profile amplitude A
  int order = 3;                  // profile order k
  std::optional<double> t0;       // default: |A| e^{-e0 t0} = level
  double level = 1e-2;
  double theta = 0.0;             // scaled_orbit phase
  std::uint64_t seed = 7;         // perturbed
  double amplitude = 1e-3;        // perturbed, relative H1 size
  bool restore = true;            // pull M, E back onto the threshold exactly

  std::string label() const;
};

DataSpec data_spec_from_json(const json& j);
json to_json(const DataSpec& d);

struct PreparedData {
  RadialField u0;
  double t0 = 0;
  double mass_defect = 0;    // M/M[Q] - 1 after preparation
  double energy_defect = 0;  // E/E[Q] - 1 after preparation
};

// mu u(nu r) with M = M[Q] and E = E[Q] on the grid; the root nearest nu = 1.
RadialField restore_threshold(const RadialField& u, const GroundState& gs, double tol = 1e-13);

PreparedData prepare_threshold_data(const DataSpec& spec, const GroundState& gs,
                                    const SpectralData& sd, const LinearizedPair& lp);

struct ClassifyOptions {
  EvolveOptions evolve;
  double horizon_forward = 8.0;   // units of 1/e0
  double horizon_backward = 20.0;
  double side_floor = 1e-7;       // on | ||grad u|| - ||grad Q|| |
  double orbit_tol = 1e-5;
  double rate_fraction = 0.8;     // converging needs rate <= -0.8 e0
  double min_r2 = 0.99;
  double min_decay = 10.0;        // the fitted window must shrink the distance this much
  double scatter_drop = 100.0;
  double h1_bound = 4.0;          // times ||Q||_H1^2
  double delta_floor = 1e-2;      // times ||grad Q||^2, over the second half of the run
};

ClassifyOptions classify_options(const LabConfig& c);

struct DirectionResult {
  Outcome outcome = Outcome::undetermined;
  EvolutionTrace trace;
  std::optional<RateFit> dist_fit;
  double pot_drop = 1.0;
  double min_dist = 0;
  double max_h1sq = 0;
  SeparationVerdict separation;
  std::string note;
};

struct Verdict {
  Side side = Side::critical;
  Outcome forward = Outcome::undetermined;
  Outcome backward = Outcome::undetermined;
  std::map<std::string, double> rates;
  std::vector<std::string> evidence;
  std::vector<std::string> notes;
};

json to_json(const Verdict& v);

struct Classification {
  Verdict verdict;
  DirectionResult forward, backward;
};

Side side_of(const RadialField& u0, const GroundState& gs, double floor = 1e-7);

Classification classify_trajectory(const RadialField& u0, double t0, const GroundState& gs,
                                   const SpectralData& sd, const ClassifyOptions& opts);

struct UniquenessReport {
  int samples = 0;
  double sup_diff = 0;
  double final_diff = 0;
  double tolerance = 0;
  bool aligned = false;
};

// Compares u_a(t) with e^{i phase} u_b(t + shift) on common snapshot times.
UniquenessReport uniqueness_probe(const EvolutionTrace& a, const EvolutionTrace& b, double shift,
                                  double phase, double tolerance = 1e-4);

// U^A(t) = e^{-is} U^{A_ref}(t + s) for A, A_ref of one sign
double amplitude_shift(double a, double a_ref, double e0);

struct SweepCell {
  std::string id;
  DataSpec data;
  double dt = 0;
  std::optional<Verdict> verdict;
  std::string error;
  double seconds = 0;
  bool separation_held = true;
  double energy_drift = 0, mass_drift = 0;
};

struct SweepReport {
  std::vector<SweepCell> cells;
  bool side_matches_sign = true;  // profile cells: side follows sign(A)
  bool ladder_stable = true;      // verdicts agree across the two finest dt
  bool separation_held = true;
  int failures = 0;
};

struct SweepPlan {
  std::vector<DataSpec> data;
  std::vector<double> dt_ladder;
  int workers = 1;
};

SweepPlan sweep_plan(const LabConfig& c);

// Runs every (data, dt) cell with a bounded worker pool. With a nonempty out_dir,
// writes per-cell trace CSVs and manifest.json there.
SweepReport sweep(const SweepPlan& plan, const LabConfig& cfg, const GroundState& gs,
                  const SpectralData& sd, const LinearizedPair& lp,
                  const std::filesystem::path& out_dir = {});

}  // namespace nlslab
