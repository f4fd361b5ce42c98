#pragma once

#include <vector>

#include "nlslab/linearized.hpp"

namespace nlslab {

// V_k^A(t) = sum_{j=1..k} e^{-j e0 t} Z_j^A
struct ProfileExpansion {
  double a_param = 0;
  int order = 0;
  double e0 = 0;
  GridPtr grid;
  std::vector<RadialField> z;    // z[j-1] = Z_j
  std::vector<double> rcond;     // resolvent condition estimates, j = 2..k
};

struct ProfileOptions {
  int max_order = 6;
  double min_rcond = 1e-12;
};

// R(h) = iQ(2|h|^2 + h^2) + i|h|^2 h
RadialField nonlinearity(const RadialField& h, const RadialField& q);

ProfileExpansion build_profiles(double a, int k, const SpectralData& sd, const LinearizedPair& lp,
                                const GroundState& gs, const ProfileOptions& opts = {});

RadialField evaluate_v(const ProfileExpansion& pe, double t);
RadialField evaluate_dvdt(const ProfileExpansion& pe, double t);
// Q + V_k(t0), profile frame; the lab-frame solution carries e^{i t0}.
RadialField approximate_initial_data(const ProfileExpansion& pe, double t0, const GroundState& gs);
// || dV/dt + calL V - R(V) ||_2
double pde_residual(const ProfileExpansion& pe, double t, const GroundState& gs,
                    const LinearizedPair& lp);

// t1 = -t0 - log(A)/e0
double time_shift_relation(double a, double t0, double e0);
// t0 with |A| e^{-e0 t0} = level
double profile_start_time(double a, double e0, double level = 1e-2);

}  // namespace nlslab
