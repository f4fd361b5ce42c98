#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/banded.hpp"
#include "nlslab/ground_state.hpp"

namespace nlslab {

enum class BlowupReason { grad_explosion, nan, unresolved };
std::string to_string(BlowupReason r);

// implicit_cn: fully implicit Crank-Nicolson, conserves discrete mass and energy
// and keeps the discrete ground state exactly stationary.
// strang: nonlinear phase half steps around a linear Crank-Nicolson step.
enum class TimeScheme { implicit_cn, strang };
std::string to_string(TimeScheme s);
TimeScheme parse_time_scheme(const std::string& s);

struct BlowupRecord {
  double detected_at = 0;
  BlowupReason reason = BlowupReason::grad_explosion;
};

struct ModulationSample {
  double t, theta, alpha, h_h1, delta;
  bool valid;
};

struct ModeSample {
  double t, alpha_plus, alpha_minus, beta0;
};

struct EvolutionTrace {
  double t0 = 0, t1 = 0, dt = 0;
  std::vector<double> times;
  std::vector<double> mass_series;
  std::vector<double> energy_series;
  std::vector<double> grad_series;   // int |grad u|^2
  std::vector<double> delta_series;
  std::vector<double> pot_series;    // int |u|^4
  std::vector<double> dist_series;   // H1 distance to the e^{it}Q orbit
  std::vector<int> level_series;     // substep refinement level in force
  std::optional<BlowupRecord> blowup;
  std::map<double, RadialField> snapshots;
  std::vector<ModulationSample> modulation_series;
  std::vector<ModeSample> mode_series;
  std::vector<std::string> warnings;

  // max relative drift divided by max(elapsed, 1)
  double mass_drift = 0;
  double energy_drift = 0;
  // same, restricted to records before any substep refinement
  double energy_drift_resolved = 0;
  bool drift_flagged = false;
  long steps = 0;
  long substeps = 0;

  const RadialField& final_state() const { return snapshots.rbegin()->second; }
};

using Observer = std::function<void(double t, const RadialField& u)>;

struct EvolveOptions {
  double dt = 1e-4;
  TimeScheme scheme = TimeScheme::implicit_cn;
  double implicit_tol = 1e-14;
  int implicit_max_iter = 40;
  int record_stride = 10;
  double blowup_factor = 10.0;
  // substeps double each time max|u|^2 exceeds refine_ratio^k times its initial value
  double refine_ratio = 2.0;
  int max_refine_level = 14;
  double cfl_safety = 10.0;
  double mass_budget = 1e-8;
  double energy_budget = 1e-7;
  bool track_distance = true;
  bool snapshot_records = false;
  std::vector<double> snapshot_times;
  Observer observer;
};

// i u_t + Lap u + |u|^2 u = 0 from t0 to t1. The final state is always stored as a snapshot.
EvolutionTrace integrate(const RadialField& u0, double t0, double t1, const GroundState& gs,
                         const EvolveOptions& opts);

struct OrbitDistance {
  double dist_h1 = 0;
  double theta_star = 0;
};

OrbitDistance distance_to_orbit(const RadialField& u, double t, const GroundState& gs);

struct RateFit {
  double rate = 0;
  double intercept = 0;
  double r_squared = 0;
  int samples = 0;
};

// Least-squares slope of log(value) against t over [t_lo, t_hi].
RateFit exp_rate_fit(const std::vector<double>& t, const std::vector<double>& value,
                     double t_lo = -1e300, double t_hi = 1e300, int min_samples = 8);

struct SeparationVerdict {
  bool invariant_held = true;
  int side = 0;  // +1 above, -1 below, 0 never above the floor
  std::optional<double> first_violation;
};

SeparationVerdict gradient_separation_monitor(const EvolutionTrace& trace, const GroundState& gs,
                                              double floor = 1e-7);

}  // namespace nlslab
