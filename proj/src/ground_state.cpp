#include "nlslab/ground_state.hpp"

#include <algorithm>
#include <cmath>

#include "nlslab/banded.hpp"

namespace nlslab {

namespace {

inline double accel(double r, double q, double p) {
  if (r == 0.0) return (q - q * q * q) / 3.0;
  return -2.0 * p / r + q - q * q * q;
}

}  // namespace

Shot shoot(const RadialGrid& g, double a) {
  const int n = g.n_points();
  const double h = g.spacing();
  Shot s{ShotKind::neither, g.r_max(), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  double q = a, p = 0.0;
  s.q[0] = q;
  for (int i = 0; i + 1 < n; ++i) {
    const double r = g.node(i);
    const double k1q = p, k1p = accel(r, q, p);
    const double k2q = p + 0.5 * h * k1p, k2p = accel(r + 0.5 * h, q + 0.5 * h * k1q, k2q);
    const double k3q = p + 0.5 * h * k2p, k3p = accel(r + 0.5 * h, q + 0.5 * h * k2q, k3q);
    const double k4q = p + h * k3p, k4p = accel(r + h, q + h * k3q, k4q);
    q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    s.q[i + 1] = q;
    s.dq[i + 1] = p;
    if (!std::isfinite(q) || q < 0.0) {
      s.kind = ShotKind::crosses_zero;
      s.event_radius = g.node(i + 1);
      return s;
    }
    if (p > 0.0) {
      s.kind = ShotKind::turns_upward;
      s.event_radius = g.node(i + 1);
      return s;
    }
  }
  return s;
}

double ground_residual(const RadialField& q) {
  auto lap = laplacian(q);
  std::vector<double> res(q.size());
  for (int i = 0; i < q.size(); ++i) {
    double v = q.re[i];
    res[i] = -v + lap.re[i] + v * v * v;
    res[i] *= res[i];
  }
  res.back() = 0.0;
  return std::sqrt(integrate(*q.grid, res));
}

GroundState solve_ground_state(GridPtr grid, double tol) {
  ShootOptions o;
  o.tol = tol;
  return solve_ground_state(std::move(grid), o);
}

GroundState solve_ground_state(GridPtr grid, const ShootOptions& opts) {
  const auto& g = *grid;
  if (!(opts.tol > 0)) throw Error(ErrorKind::usage, "shooting tolerance must be positive");
  auto too_large = [&](double a) { return shoot(g, a).kind == ShotKind::crosses_zero; };
  double lo = opts.bracket_lo, hi = opts.bracket_hi;
  if (too_large(lo) || !too_large(hi))
    throw Error(ErrorKind::solver, "no shooting bracket in [" + std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
  while (hi - lo > opts.tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (too_large(mid) ? hi : lo) = mid;
  }
  const double a = 0.5 * (lo + hi);
  Shot s = shoot(g, lo);

  // Graft c e^{-r}/r before the tail loses precision.
  const int n = g.n_points();
  double r_ev = s.kind == ShotKind::neither ? g.r_max() : s.event_radius;
  double r_match = std::max(3.0, r_ev - 3.0);
  double w_lo = std::max(2.0, r_match - 3.0);
  double acc = 0.0;
  int cnt = 0;
  for (int i = 1; i < n; ++i) {
    double r = g.node(i);
    if (r < w_lo || r > r_match) continue;
    if (s.q[i] <= 0) continue;
    acc += std::log(s.q[i] * r) + r;
    ++cnt;
  }
  if (cnt == 0) throw Error(ErrorKind::solver, "no samples in the tail matching window");
  const double c = std::exp(acc / cnt);
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) {
    double r = g.node(i);
    q[i] = r <= r_match ? s.q[i] : c * std::exp(-r) / r;
  }
  q[n - 1] = 0.0;

  GroundState gs;
  gs.shoot_height = a;
  gs.shoot_tol = opts.tol;

  if (opts.polish) {
    // Newton on (-D + 1) g - g^3 / r^2 = 0 in g-space.
    const int m = g.interior();
    const SymBand mlap = minus_laplacian_g(g);
    std::vector<double> gv = to_g(g, q);
    const double scale = *std::max_element(gv.begin(), gv.end());
    int it = 0;
    for (; it < 40; ++it) {
      std::vector<double> f = mlap.apply(gv);
      std::vector<double> jd(m);
      for (int k = 0; k < m; ++k) {
        double r = g.node(k + 1);
        double qq = gv[k] / r;
        f[k] += gv[k] - gv[k] * qq * qq;
        jd[k] = 1.0 - 3.0 * qq * qq;
      }
      auto lu = to_band_lu(add_diagonal(mlap, jd));
      lu.factor();
      lu.solve(f);
      double step = 0.0;
      for (int k = 0; k < m; ++k) {
        gv[k] -= f[k];
        step = std::max(step, std::abs(f[k]));
      }
      if (step < opts.newton_tol * scale) {
        ++it;
        break;
      }
    }
    gs.newton_iterations = it;
    q = from_g(g, gv);
  }

  gs.q = real_field(grid, q);
  for (int i = 0; i + 1 < n; ++i)
    if (!(q[i] > 0.0)) throw Error(ErrorKind::accuracy, "ground state is not positive");
  Norms nr = norms(gs.q);
  gs.mass = nr.l2sq;
  gs.grad_sq = nr.grad_l2sq;
  gs.l4_4 = nr.l4_4;
  gs.energy = 0.5 * gs.grad_sq - 0.25 * gs.l4_4;
  gs.c_gn = gn_constant(gs);
  gs.q0 = q[0];
  gs.residual = ground_residual(gs.q);
  const double h = g.spacing();
  if (gs.residual > 10.0 * h * h * std::sqrt(gs.mass))
    throw Error(ErrorKind::accuracy, "ground state residual above bound");
  return gs;
}

double mass(const RadialField& u) { return norms(u).l2sq; }

double energy(const RadialField& u) {
  Norms n = norms(u);
  return 0.5 * n.grad_l2sq - 0.25 * n.l4_4;
}

double gn_constant(const GroundState& gs) {
  return gs.l4_4 / (std::pow(gs.grad_sq, 1.5) * std::sqrt(gs.mass));
}

double delta(const RadialField& u, const GroundState& gs) {
  return std::abs(gs.grad_sq - norms(u).grad_l2sq);
}

RadialField dilate(const RadialField& u, double mu, double nu) {
  check_field(u);
  const auto& g = *u.grid;
  if (!(nu > 0)) throw Error(ErrorKind::domain, "dilation factor must be positive");
  if (nu > 1.0 && nu * g.spacing() > 0.05)
    throw Error(ErrorKind::resolution, "dilation under-resolves the field on this grid");
  if (nu < 1.0) {
    // mass of u that would be pushed past r_max
    std::vector<double> tail(u.size(), 0.0);
    for (int i = 0; i < u.size(); ++i)
      if (g.node(i) > nu * g.r_max()) tail[i] = std::norm(u.at(i));
    double tot = mass(u);
    if (tot > 0 && integrate(g, tail) > 1e-12 * tot)
      throw Error(ErrorKind::resolution, "dilation pushes mass beyond r_max");
  }
  RadialField out(u.grid);
  for (int i = 0; i + 1 < u.size(); ++i) {
    double x = nu * g.node(i);
    out.re[i] = mu * interpolate(g, u.re, x);
    out.im[i] = mu * interpolate(g, u.im, x);
  }
  return out;
}

RadialField rescale_to_threshold(const RadialField& u, const GroundState& gs) {
  double m = mass(u);
  if (!(m > 0)) throw Error(ErrorKind::domain, "rescaling needs positive mass");
  double lambda = m / gs.mass;
  if (std::abs(lambda - 1.0) < 1e-15) return u;
  return dilate(u, lambda, lambda);
}

}  // namespace nlslab
