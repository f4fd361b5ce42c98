#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nlslab/banded.hpp"
#include "nlslab/ground_state.hpp"

namespace nlslab {

// L+ = -Lap + 1 - 3Q^2 and L- = -Lap + 1 - Q^2, both in field form and as
// symmetric banded matrices on the interior g-unknowns.
struct LinearizedPair {
  GridPtr grid;
  RadialField q;
  std::vector<double> v_plus;   // 1 - 3Q^2
  std::vector<double> v_minus;  // 1 - Q^2
  SymBand minus_lap;            // -D
  SymBand l_plus;
  SymBand l_minus;

  std::vector<double> apply_plus(std::span<const double> f) const;
  std::vector<double> apply_minus(std::span<const double> f) const;
  // calL h = (-L- h2, L+ h1) on (Re, Im)
  RadialField apply_block(const RadialField& h) const;
};

LinearizedPair assemble(const GroundState& gs);

// Factorized (calL - shift) on interleaved (h1, h2) g-unknowns.
BandLU<double> block_resolvent(const LinearizedPair& lp, double shift);

struct SpectralData {
  double e0 = 0;
  RadialField y1;  // Re Y+
  RadialField y2;  // Im Y+
  double b_norm = 0;  // B(Y+, Y-) before normalization
  int sign = 1;       // flip applied to enforce int grad Q . grad y1 > 0
  double residual_plus = 0;   // ||L+ y1 - e0 y2|| / (||y1|| + ||y2||)
  double residual_minus = 0;  // ||L- y2 + e0 y1|| / (||y1|| + ||y2||)
  double lapq_y1_ratio = 0;   // |int Lap Q y1| / (||Lap Q|| ||y1||)
  double coarse_e0 = 0;
  int coarse_negative_count = 0;
  double spectrum_floor = 0;  // smallest L-L+ eigenvalue above the kernel (coarse)
  int iterations = 0;

  RadialField y_plus() const;   // y1 + i y2, eigenvalue +e0
  RadialField y_minus() const;  // -y1 + i y2 = -conj(Y+), eigenvalue -e0
};

struct EigenOptions {
  int coarse_points = 385;
  double tol = 1e-13;
  int max_iterations = 60;
};

SpectralData solve_eigenpair(const LinearizedPair& lp, const EigenOptions& opts = {});

double phi(const RadialField& h, const LinearizedPair& lp);
double bilinear(const RadialField& g, const RadialField& h, const LinearizedPair& lp);
// int Q |h|^2 h1 + 1/4 int |h|^4, valid when Q + h keeps the mass and energy of Q.
double phi_from_constraints(const RadialField& h, const GroundState& gs, double tol = 1e-8);

enum class ConstraintSet { none, g_perp, g_perp_prime };

struct CoercivityResult {
  double minimum = 0;
  double min_real_block = 0;  // h1 block (L+)
  double min_imag_block = 0;  // h2 block (L-)
  bool positive = false;
  int bisection_steps = 0;
};

CoercivityResult coercivity_minimum(const LinearizedPair& lp, const SpectralData& sd,
                                    ConstraintSet which);

struct ModeProjection {
  double alpha_plus = 0;
  double alpha_minus = 0;
  double beta0 = 0;
  RadialField v_perp;
};

ModeProjection project_modes(const RadialField& v, const SpectralData& sd,
                             const LinearizedPair& lp, const GroundState& gs);

struct ModeResidualSample {
  double t = 0;
  double alpha_plus = 0;
  double alpha_minus = 0;
  double res_minus = 0;  // alpha-' - e0 alpha-
  double res_plus = 0;   // alpha+' + e0 alpha+
  double dphi = 0;       // d/dt Phi(v)
  double forcing_minus = 0;  // B(g, Y+), when g is supplied
  double forcing_plus = 0;   // B(g, Y-)
};

std::vector<ModeResidualSample> mode_ode_residuals(const std::vector<double>& times,
                                                   const std::vector<RadialField>& v,
                                                   const std::vector<RadialField>& g,
                                                   const SpectralData& sd,
                                                   const LinearizedPair& lp);

struct GagliardoReport {
  int samples = 0;
  double min_coefficient = 0;
  double min_relative = 0;  // min coefficient / ||h||_{H1}^2
  bool passed = false;
  std::vector<double> coefficients;
};

// Phi(h) - (int Q h1)^2 / (2 int Q^2), the second-order coefficient of the
// Gagliardo-Nirenberg deficit along h with int grad Q . grad h1 = 0.
double gagliardo_coefficient(const RadialField& h, const LinearizedPair& lp,
                             const GroundState& gs);
// Projects h1 so that int grad Q . grad h1 = 0.
RadialField gagliardo_constrain(RadialField h, const GroundState& gs);
GagliardoReport gagliardo_quadratic_check(const LinearizedPair& lp, const GroundState& gs,
                                          int samples = 100, std::uint64_t seed = 1);

// Q + r dQ/dr
RadialField q_tilde(const GroundState& gs);

// Smooth, rapidly decaying random radial field for property checks.
RadialField random_smooth_field(GridPtr grid, std::mt19937_64& rng, bool complex_valued = true);

// Dense references on the interior g-unknowns (small grids only).
Eigen::MatrixXd dense(const SymBand& a);
// Eigenvalues of the 2m x 2m block operator [[0, -L-], [L+, 0]]
Eigen::VectorXcd dense_block_spectrum(const LinearizedPair& lp);
// Constrained minimum of the Rayleigh quotient by dense generalized eigensolve.
double dense_coercivity_minimum(const LinearizedPair& lp, const SpectralData& sd,
                                ConstraintSet which);

}  // namespace nlslab
