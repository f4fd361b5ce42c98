#pragma once

#include "nlslab/grid.hpp"

namespace nlslab {

struct GroundState {
  RadialField q;
  double mass = 0;
  double grad_sq = 0;
  double l4_4 = 0;
  double energy = 0;
  double c_gn = 0;
  double q0 = 0;
  double shoot_height = 0;  // bisection result before the discrete polish
  double shoot_tol = 0;
  double residual = 0;      // || -Q + Lap Q + Q^3 ||_2
  int newton_iterations = 0;

  const RadialGrid& grid() const { return *q.grid; }
};

struct ShootOptions {
  double tol = 1e-12;
  double bracket_lo = 1.0;
  double bracket_hi = 10.0;
  bool polish = true;     // Newton on the discrete equation after grafting
  double newton_tol = 1e-13;
};

// Outcome of a single outward integration from Q(0) = a.
enum class ShotKind { crosses_zero, turns_upward, neither };

struct Shot {
  ShotKind kind;
  double event_radius;
  std::vector<double> q;  // samples up to the event (remaining entries zero)
  std::vector<double> dq;
};

Shot shoot(const RadialGrid& g, double a);

GroundState solve_ground_state(GridPtr grid, const ShootOptions& opts = {});
GroundState solve_ground_state(GridPtr grid, double tol);

double mass(const RadialField& u);
double energy(const RadialField& u);
double gn_constant(const GroundState& gs);
double delta(const RadialField& u, const GroundState& gs);
// || -Q + Lap Q + Q^3 ||_2 for a real field
double ground_residual(const RadialField& q);

// mu * u(nu r), interpolated back onto the grid.
RadialField dilate(const RadialField& u, double mu, double nu);
// lambda u(lambda x) with lambda = M[u]/M[Q]
RadialField rescale_to_threshold(const RadialField& u, const GroundState& gs);

}  // namespace nlslab
