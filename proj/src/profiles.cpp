#include "nlslab/profiles.hpp"

#include <cmath>

namespace nlslab {

RadialField nonlinearity(const RadialField& h, const RadialField& q) {
  check_same_grid(h, q);
  RadialField out(h.grid);
  const cplx i1(0.0, 1.0);
  for (int k = 0; k < h.size(); ++k) {
    cplx z = h.at(k);
    double a2 = std::norm(z);
    out.set(k, i1 * (q.re[k] * (2.0 * a2 + z * z) + a2 * z));
  }
  return out;
}

ProfileExpansion build_profiles(double a, int k, const SpectralData& sd, const LinearizedPair& lp,
                                const GroundState& gs, const ProfileOptions& opts) {
  if (k < 1) throw Error(ErrorKind::usage, "profile order must be at least 1");
  if (k > opts.max_order)
    throw Error(ErrorKind::usage, "profile order " + std::to_string(k) + " exceeds the cap " +
                                      std::to_string(opts.max_order));
  const auto& g = *lp.grid;
  const int n = g.n_points();
  const int m = g.interior();
  ProfileExpansion pe;
  pe.a_param = a;
  pe.order = k;
  pe.e0 = sd.e0;
  pe.grid = lp.grid;
  RadialField z1 = sd.y_plus();
  z1 *= a;
  pe.z.push_back(std::move(z1));
  const cplx i1(0.0, 1.0);
  for (int j = 2; j <= k; ++j) {
    // coefficient of e^{-j e0 t} in R(V_{j-1})
    std::vector<cplx> u(n, 0.0);
    for (int p = 1; p < j; ++p) {
      const auto& za = pe.z[p - 1];
      const auto& zb = pe.z[j - p - 1];
      for (int i = 0; i < n; ++i) {
        cplx x = za.at(i), y = zb.at(i);
        u[i] += gs.q.re[i] * (2.0 * x * std::conj(y) + x * y);
      }
      for (int c = 1; p + c < j; ++c) {
        const auto& zc = pe.z[j - p - c - 1];
        const auto& zm = pe.z[c - 1];
        for (int i = 0; i < n; ++i) u[i] += za.at(i) * std::conj(zm.at(i)) * zc.at(i);
      }
    }
    std::vector<double> rhs(2 * m);
    for (int q = 0; q < m; ++q) {
      cplx v = i1 * u[q + 1] * g.node(q + 1);
      rhs[2 * q] = v.real();
      rhs[2 * q + 1] = v.imag();
    }
    auto lu = block_resolvent(lp, j * sd.e0);
    pe.rcond.push_back(lu.rcond());
    if (lu.rcond() < opts.min_rcond)
      throw Error(ErrorKind::resolvent,
                  "resolvent at " + std::to_string(j) + " e0 is ill-conditioned");
    lu.solve(rhs);
    std::vector<double> gr(m), gi(m);
    for (int q = 0; q < m; ++q) {
      gr[q] = rhs[2 * q];
      gi[q] = rhs[2 * q + 1];
    }
    pe.z.emplace_back(lp.grid, from_g(g, gr), from_g(g, gi));
  }
  return pe;
}

RadialField evaluate_v(const ProfileExpansion& pe, double t) {
  RadialField v(pe.grid);
  for (int j = 1; j <= pe.order; ++j) {
    double w = std::exp(-j * pe.e0 * t);
    const auto& z = pe.z[j - 1];
    for (int i = 0; i < v.size(); ++i) {
      v.re[i] += w * z.re[i];
      v.im[i] += w * z.im[i];
    }
  }
  return v;
}

RadialField evaluate_dvdt(const ProfileExpansion& pe, double t) {
  RadialField v(pe.grid);
  for (int j = 1; j <= pe.order; ++j) {
    double w = -j * pe.e0 * std::exp(-j * pe.e0 * t);
    const auto& z = pe.z[j - 1];
    for (int i = 0; i < v.size(); ++i) {
      v.re[i] += w * z.re[i];
      v.im[i] += w * z.im[i];
    }
  }
  return v;
}

RadialField approximate_initial_data(const ProfileExpansion& pe, double t0, const GroundState& gs) {
  return gs.q + evaluate_v(pe, t0);
}

double pde_residual(const ProfileExpansion& pe, double t, const GroundState& gs,
                    const LinearizedPair& lp) {
  RadialField v = evaluate_v(pe, t);
  RadialField res = evaluate_dvdt(pe, t) + lp.apply_block(v);
  res -= nonlinearity(v, gs.q);
  res.re.back() = res.im.back() = 0.0;
  return l2_norm(res);
}

double time_shift_relation(double a, double t0, double e0) {
  if (!(a > 0)) throw Error(ErrorKind::domain, "time shift needs A > 0");
  return -t0 - std::log(a) / e0;
}

double profile_start_time(double a, double e0, double level) {
  if (a == 0) return 0.0;
  return std::log(std::abs(a) / level) / e0;
}

}  // namespace nlslab
