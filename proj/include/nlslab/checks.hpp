#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlslab/config.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0;
  double bound = 0;
  std::string detail;
};

json to_json(const CheckResult& c);

// Ground state, linearized pair and eigenpair on one grid.
struct StaticSetup {
  GroundState gs;
  LinearizedPair lp;
  SpectralData sd;
};

StaticSetup build_static(int n_points, double r_max, const Tolerances& tol);

std::vector<CheckResult> check_pohozhaev(const GroundState& gs, double tol = 1e-6);
CheckResult check_phi_q(const GroundState& gs, const LinearizedPair& lp, double tol = 1e-6);
// L-Q, L+Q + 2Q^3, L+Q~ + 2Q against 10 h^2 ||Q||
std::vector<CheckResult> check_operator_identities(const GroundState& gs, const LinearizedPair& lp);
std::vector<CheckResult> check_eigenpair(const SpectralData& sd, double tol = 1e-8);
std::vector<CheckResult> check_coercivity(const LinearizedPair& lp, const SpectralData& sd);
std::vector<CheckResult> check_golden(const GroundState& gs, const SpectralData& sd,
                                      const GoldenConstants& golden);

struct SlopeFit {
  RateFit fit;
  double expected = 0;
  std::vector<double> times, residuals;
};

// log residual of Q + V_k against t over t where A e^{-e0 t} runs from level_hi to level_lo
SlopeFit profile_residual_slope(const ProfileExpansion& pe, const GroundState& gs,
                                const LinearizedPair& lp, double level_hi = 1e-2,
                                double level_lo = 1e-3, int samples = 9);

// Fast invariant suite behind the selftest subcommand.
std::vector<CheckResult> selftest_suite(const LabConfig& cfg);

}  // namespace nlslab
