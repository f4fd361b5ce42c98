#pragma once

#include <optional>
#include <vector>

#include "nlslab/evolve.hpp"

namespace nlslab {

// Radial cutoff: phi = r^2 on [0,1], phi = 0 beyond support(), 0 <= phi, phi'' <= 2.
// phi'' = 2 - eta on the bridge, eta a C3 bump at r = 1 plus a C3 step to 2,
// so phi is C5 and Lap^2 phi is continuous.
class CutoffShape {
 public:
  CutoffShape(double bump_width = 0.25, double step_width = 0.5);
  // d-th derivative, d = 0..4
  double eval(double s, int d = 0) const;
  double laplacian(double s) const;     // phi'' + 2 phi'/s
  double bilaplacian(double s) const;   // phi'''' + 4 phi'''/s
  double support() const { return l_; }

 private:
  struct Piece {
    double lo, hi;
    double origin;          // expansion point
    std::vector<double> c;  // phi on [lo, hi] as a polynomial in s - origin
  };
  double l_;
  std::vector<Piece> pieces_;
};

struct CutoffProfile {
  double radius_scale = 0;
  double support = 0;
  // samples at r_i / R
  std::vector<double> phi, phi_first, phi_second, phi_laplacian, phi_bilaplacian;
};

CutoffProfile make_cutoff(const RadialGrid& g, double radius_scale, const CutoffShape& shape = {});

// int |x|^2 |u|^2
double variance(const RadialField& u);
// fraction of the variance carried by the outer tenth of the grid
double variance_tail_fraction(const RadialField& u);
// 4 Im int x . grad u conj(u)
double variance_rate(const RadialField& u);

double localized_variance(const RadialField& u, const CutoffProfile& c);
double localized_rate(const RadialField& u, const CutoffProfile& c);
// A_R(u)
double localized_remainder(const RadialField& u, const CutoffProfile& c);

struct VirialSample {
  double t = 0;
  double y = 0, y_rate = 0, y_accel_fd = 0;
  double drive = 0;  // 4 (||grad Q||^2 - ||grad u||^2); equals -4 delta on the supercritical side
  double delta = 0;
  double y_r = 0, y_r_rate = 0, y_r_accel_fd = 0, a_r = 0;
  bool has_fd = false;
  int level = 0;
};

struct VirialReport {
  bool applicable = true;
  std::string reason;
  int samples = 0;
  double max_mismatch = 0;        // |FD(y') - drive| / (4 delta)
  double max_local_mismatch = 0;  // |FD(y_R') - drive - A_R| / (4 delta + |A_R|)
  double max_a_r = 0;
  double tail_fraction = 0;
  bool tail_warning = false;
  bool sign_ok = true;            // y'' < 0 and y' of one sign on the supercritical side
  std::vector<VirialSample> series;
};

struct VirialOptions {
  std::optional<double> radius_scale;
  bool resolved_only = true;  // skip samples recorded after substep refinement began
  double tail_tolerance = 1e-6;
};

// Uses the trace snapshots (integrate with snapshot_records = true); y'' by a
// 5-point central difference of y' samples.
VirialReport virial_identity_check(const EvolutionTrace& trace, const GroundState& gs,
                                   const VirialOptions& opts = {});

struct CauchySchwarzReport {
  double lhs = 0, rhs_factor = 0, ratio = 0, delta = 0;
};

// lhs = |Im int 2 r (d_r f) conj f|^2, rhs_factor = delta^2 int 4 r^2 |f|^2
CauchySchwarzReport cauchy_schwarz_check(const RadialField& f, const GroundState& gs,
                                         double tol = 1e-6);

// e^{i lambda r^2} mu Q(nu r) with M = M[Q], E = E[Q]; branch +1 has nu > 1.
RadialField chirp_family_member(const GroundState& gs, double lambda, int branch);

struct CauchySchwarzSweep {
  std::vector<double> lambdas;
  std::vector<int> branches;
  std::vector<CauchySchwarzReport> reports;
  double max_ratio = 0;
  double order = 0;  // slope of log lhs against log delta
};

CauchySchwarzSweep cauchy_schwarz_sweep(const GroundState& gs, const std::vector<double>& lambdas);

}  // namespace nlslab
