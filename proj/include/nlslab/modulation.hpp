#pragma once

#include <optional>
#include <vector>

#include "nlslab/evolve.hpp"

namespace nlslab {

// e^{-i(theta+t)} u = (1 + alpha) Q + h with Im int Q h = 0 and int Lap Q Re h = 0.
struct ModulationFrame {
  double t = 0;
  double theta = 0;
  double alpha = 0;
  RadialField h;
  double h_h1 = 0;
  double q_h1 = 0;  // int Q Re h
  double delta = 0;
  bool valid = false;
};

double default_delta0(const GroundState& gs);

ModulationFrame fit_frame(const RadialField& u, double t, const GroundState& gs, double delta0);

// Frames at every snapshot, theta unwrapped onto a continuous branch.
std::vector<ModulationFrame> frame_series(const EvolutionTrace& trace, const GroundState& gs,
                                          double delta0);

struct ComparabilityReport {
  int valid_frames = 0;
  int used_frames = 0;
  bool ill_conditioned = false;
  double alpha_min = 0, alpha_max = 0;  // |alpha| / delta
  double h_min = 0, h_max = 0;          // ||h||_H1 / delta
  double qh_min = 0, qh_max = 0;        // |int Q h1| / delta
  // |alpha|/delta at the smallest usable delta, and the small-alpha limit 1/(2 ||grad Q||^2)
  double alpha_ratio_small = 0;
  double alpha_ratio_limit = 0;
  double delta_small = 0;
  // max |theta'| / delta from centered differences between valid frames
  double theta_rate_max = 0;
};

ComparabilityReport comparability_report(const std::vector<ModulationFrame>& frames,
                                         const GroundState& gs, double floor = 1e-9);

}  // namespace nlslab
