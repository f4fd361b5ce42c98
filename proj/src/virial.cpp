#include "nlslab/virial.hpp"

#include <algorithm>
#include <cmath>

#include "nlslab/ground_state.hpp"

namespace nlslab {

namespace {

using Poly = std::vector<double>;

double polyval(const Poly& p, double x) {
  double v = 0.0;
  for (size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v;
}

Poly polyder(const Poly& p) {
  Poly d;
  for (size_t k = 1; k < p.size(); ++k) d.push_back(k * p[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

Poly polyint(const Poly& p, double c0) {
  Poly q{c0};
  for (size_t k = 0; k < p.size(); ++k) q.push_back(p[k] / (k + 1));
  return q;
}

// coefficients of (x / w)^k expansions
Poly scaled(Poly p, double w) {
  double f = 1.0;
  for (auto& c : p) {
    c /= f;
    f *= w;
  }
  return p;
}

Poly sub(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (size_t k = 0; k < b.size(); ++k) a[k] -= b[k];
  return a;
}

}  // namespace

CutoffShape::CutoffShape(double w, double ws) {
  if (!(w > 0) || !(ws > 0)) throw Error(ErrorKind::usage, "cutoff widths must be positive");
  // L from the two moment conditions phi(L) = phi'(L) = 0; 5/36 = int (1-u) S(u) du
  const double b = 2.0 + w + ws;
  const double c = ws * (1.0 + 0.5 * w) + 2.0 * (5.0 / 36.0) * ws * ws;
  l_ = 0.5 * (b + std::sqrt(b * b - 4.0 * c));
  const double a = l_ - ws;
  if (a < 1.0 + w) throw Error(ErrorKind::usage, "cutoff bump and step overlap");
  // bump (x(1-x))^4 has unit-interval mass 1/630
  const double amp = (2.0 * l_ - ws) * 630.0 / w;

  pieces_.push_back({0.0, 1.0, 0.0, {0.0, 0.0, 1.0}});
  // eta on each bridge piece, in the local variable x = s - lo
  std::vector<std::pair<double, Poly>> eta = {
      {1.0 + w, scaled({0.0, 0.0, 0.0, 0.0, amp, -4.0 * amp, 6.0 * amp, -4.0 * amp, amp}, w)},
      {a, {0.0}},
      {l_, scaled({0.0, 0.0, 0.0, 0.0, 70.0, -168.0, 140.0, -40.0}, ws)},
  };
  double lo = 1.0, val = 1.0, slope = 2.0;
  for (size_t k = 0; k < eta.size(); ++k) {
    const auto& [hi, e] = eta[k];
    Poly d2 = sub({2.0}, e);
    Poly d1 = polyint(d2, slope);
    Poly d0 = polyint(d1, val);
    if (k + 1 == eta.size()) {
      // anchor the last piece at L so phi(L) = phi'(L) = 0 hold exactly; the
      // carried constants differ from these only by round-off
      d1 = polyint(d2, 0.0);
      d1[0] = -polyval(d1, hi - lo);
      d0 = polyint(d1, 0.0);
      d0[0] = -polyval(d0, hi - lo);
      // re-expand about L: 2 - eta has a fourth-order zero at L, so phi ~ (L - s)^6 and the
      // lower Taylor coefficients vanish exactly
      Poly at_l(d0.size());
      Poly dk = d0;
      double fact = 1.0;
      for (size_t j = 0; j < d0.size(); ++j) {
        if (j > 0) fact *= static_cast<double>(j);
        at_l[j] = j < 6 ? 0.0 : polyval(dk, hi - lo) / fact;
        dk = polyder(dk);
      }
      pieces_.push_back({lo, hi, hi, at_l});
      break;
    }
    pieces_.push_back({lo, hi, lo, d0});
    val = polyval(d0, hi - lo);
    slope = polyval(d1, hi - lo);
    lo = hi;
  }
}

double CutoffShape::eval(double s, int d) const {
  s = std::abs(s);
  if (s >= l_) return 0.0;
  for (const auto& p : pieces_) {
    if (s > p.hi) continue;
    Poly c = p.c;
    for (int k = 0; k < d; ++k) c = polyder(c);
    return polyval(c, s - p.origin);
  }
  return 0.0;
}

double CutoffShape::laplacian(double s) const {
  if (s <= 1.0) return 6.0;
  return eval(s, 2) + 2.0 * eval(s, 1) / s;
}

double CutoffShape::bilaplacian(double s) const {
  if (s <= 1.0) return 0.0;
  return eval(s, 4) + 4.0 * eval(s, 3) / s;
}

CutoffProfile make_cutoff(const RadialGrid& g, double radius_scale, const CutoffShape& shape) {
  if (!(radius_scale > 0)) throw Error(ErrorKind::usage, "radius scale must be positive");
  if (shape.support() * radius_scale > g.r_max())
    throw Error(ErrorKind::cutoff_unresolved,
                "cutoff support " + std::to_string(shape.support() * radius_scale) +
                    " exceeds r_max");
  CutoffProfile c;
  c.radius_scale = radius_scale;
  c.support = shape.support() * radius_scale;
  const int n = g.n_points();
  c.phi.resize(n);
  c.phi_first.resize(n);
  c.phi_second.resize(n);
  c.phi_laplacian.resize(n);
  c.phi_bilaplacian.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = g.node(i) / radius_scale;
    c.phi[i] = shape.eval(s, 0);
    c.phi_first[i] = shape.eval(s, 1);
    c.phi_second[i] = shape.eval(s, 2);
    c.phi_laplacian[i] = shape.laplacian(s);
    c.phi_bilaplacian[i] = shape.bilaplacian(s);
  }
  return c;
}

namespace {

// Im(conj(u) d_r u) and |d_r u|^2 at each node
struct RadialFlux {
  std::vector<double> im_flux, grad2, abs2;
};

RadialFlux flux(const RadialField& u) {
  RadialField du = derivative(u);
  RadialFlux f;
  const int n = u.size();
  f.im_flux.resize(n);
  f.grad2.resize(n);
  f.abs2.resize(n);
  for (int i = 0; i < n; ++i) {
    f.im_flux[i] = u.re[i] * du.im[i] - u.im[i] * du.re[i];
    f.grad2[i] = du.re[i] * du.re[i] + du.im[i] * du.im[i];
    f.abs2[i] = u.re[i] * u.re[i] + u.im[i] * u.im[i];
  }
  return f;
}

void check_profile(const RadialField& u, const CutoffProfile& c) {
  if (static_cast<int>(c.phi.size()) != u.size())
    throw Error(ErrorKind::structural, "cutoff sampled on a different grid");
}

}  // namespace

double variance(const RadialField& u) {
  const auto& g = *u.grid;
  std::vector<double> v(u.size());
  for (int i = 0; i < u.size(); ++i) v[i] = g.node(i) * g.node(i) * std::norm(u.at(i));
  return integrate(g, v);
}

double variance_tail_fraction(const RadialField& u) {
  const auto& g = *u.grid;
  const double total = variance(u);
  if (total <= 0) return 0.0;
  const double cut = 0.9 * g.r_max();
  std::vector<double> v(u.size(), 0.0);
  for (int i = 0; i < u.size(); ++i)
    if (g.node(i) >= cut) v[i] = g.node(i) * g.node(i) * std::norm(u.at(i));
  return integrate(g, v) / total;
}

double variance_rate(const RadialField& u) {
  const auto& g = *u.grid;
  auto f = flux(u);
  for (int i = 0; i < u.size(); ++i) f.im_flux[i] *= g.node(i);
  return 4.0 * integrate(g, f.im_flux);
}

double localized_variance(const RadialField& u, const CutoffProfile& c) {
  check_profile(u, c);
  const auto& g = *u.grid;
  const double r2 = c.radius_scale * c.radius_scale;
  std::vector<double> v(u.size());
  for (int i = 0; i < u.size(); ++i) v[i] = r2 * c.phi[i] * std::norm(u.at(i));
  return integrate(g, v);
}

double localized_rate(const RadialField& u, const CutoffProfile& c) {
  check_profile(u, c);
  auto f = flux(u);
  for (int i = 0; i < u.size(); ++i) f.im_flux[i] *= c.phi_first[i];
  return 2.0 * c.radius_scale * integrate(*u.grid, f.im_flux);
}

double localized_remainder(const RadialField& u, const CutoffProfile& c) {
  check_profile(u, c);
  auto f = flux(u);
  const double ir2 = 1.0 / (c.radius_scale * c.radius_scale);
  std::vector<double> v(u.size());
  for (int i = 0; i < u.size(); ++i)
    v[i] = 4.0 * (c.phi_second[i] - 2.0) * f.grad2[i] -
           (c.phi_laplacian[i] - 6.0) * f.abs2[i] * f.abs2[i] -
           ir2 * c.phi_bilaplacian[i] * f.abs2[i];
  return integrate(*u.grid, v);
}

VirialReport virial_identity_check(const EvolutionTrace& trace, const GroundState& gs,
                                   const VirialOptions& opts) {
  VirialReport rep;
  if (trace.snapshots.size() < 5)
    throw Error(ErrorKind::insufficient_data, "virial check needs at least 5 snapshots");
  const auto& u0 = trace.snapshots.count(trace.t0) ? trace.snapshots.at(trace.t0)
                   : trace.dt > 0                 ? trace.snapshots.begin()->second
                                                  : trace.snapshots.rbegin()->second;
  if (!(norms(u0).grad_l2sq > gs.grad_sq)) {
    rep.applicable = false;
    rep.reason = "initial data not on the supercritical side";
  }
  std::optional<CutoffProfile> cut;
  if (opts.radius_scale) cut = make_cutoff(*u0.grid, *opts.radius_scale);

  // first time refinement was in force, in trace order
  std::optional<double> t_refined;
  for (size_t i = 0; i < trace.times.size() && i < trace.level_series.size(); ++i)
    if (trace.level_series[i] > 0) {
      t_refined = trace.times[i];
      break;
    }
  auto after_refinement = [&](double t) {
    if (!t_refined) return false;
    return trace.dt > 0 ? t >= *t_refined - 1e-12 : t <= *t_refined + 1e-12;
  };

  std::vector<VirialSample>& s = rep.series;
  for (const auto& [t, u] : trace.snapshots) {
    VirialSample v;
    v.t = t;
    Norms nr = norms(u);
    v.y = variance(u);
    v.y_rate = variance_rate(u);
    v.drive = 4.0 * (gs.grad_sq - nr.grad_l2sq);
    v.delta = std::abs(gs.grad_sq - nr.grad_l2sq);
    v.level = after_refinement(t) ? 1 : 0;
    rep.tail_fraction = std::max(rep.tail_fraction, variance_tail_fraction(u));
    if (cut) {
      v.y_r = localized_variance(u, *cut);
      v.y_r_rate = localized_rate(u, *cut);
      v.a_r = localized_remainder(u, *cut);
      rep.max_a_r = std::max(rep.max_a_r, std::abs(v.a_r));
    }
    s.push_back(v);
  }
  rep.tail_warning = rep.tail_fraction > opts.tail_tolerance;

  // 5-point differences where the stencil is uniform
  std::vector<double> dts;
  for (size_t i = 1; i < s.size(); ++i) dts.push_back(s[i].t - s[i - 1].t);
  std::vector<double> sorted(dts);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double step = sorted[sorted.size() / 2];
  int rate_sign = 0;
  for (size_t i = 2; i + 2 < s.size(); ++i) {
    bool uniform = true;
    for (int j = -2; j <= 1; ++j)
      if (std::abs(s[i + j + 1].t - s[i + j].t - step) > 1e-6 * std::abs(step)) uniform = false;
    if (!uniform) continue;
    bool resolved = true;
    for (int j = -2; j <= 2; ++j)
      if (s[i + j].level > 0) resolved = false;
    if (opts.resolved_only && !resolved) continue;
    auto fd = [&](double VirialSample::*m) {
      return (-(s[i + 2].*m) + 8.0 * (s[i + 1].*m) - 8.0 * (s[i - 1].*m) + (s[i - 2].*m)) /
             (12.0 * step);
    };
    auto& v = s[i];
    v.has_fd = true;
    v.y_accel_fd = fd(&VirialSample::y_rate);
    ++rep.samples;
    if (v.delta > 0)
      rep.max_mismatch = std::max(rep.max_mismatch, std::abs(v.y_accel_fd - v.drive) / (4.0 * v.delta));
    if (cut) {
      v.y_r_accel_fd = fd(&VirialSample::y_r_rate);
      double scale = 4.0 * v.delta + std::abs(v.a_r);
      if (scale > 0)
        rep.max_local_mismatch = std::max(
            rep.max_local_mismatch, std::abs(v.y_r_accel_fd - v.drive - v.a_r) / scale);
    }
    if (rep.applicable) {
      if (v.y_accel_fd >= 0) rep.sign_ok = false;
      int sg = v.y_rate > 0 ? 1 : (v.y_rate < 0 ? -1 : 0);
      if (rate_sign == 0) rate_sign = sg;
      else if (sg != 0 && sg != rate_sign) rep.sign_ok = false;
    }
  }
  if (rep.samples == 0)
    throw Error(ErrorKind::insufficient_data, "no uniformly spaced resolved samples for y''");
  return rep;
}

CauchySchwarzReport cauchy_schwarz_check(const RadialField& f, const GroundState& gs, double tol) {
  check_same_grid(f, gs.q);
  const double m = mass(f), e = energy(f);
  if (std::abs(m - gs.mass) > tol * gs.mass || std::abs(e - gs.energy) > tol * std::abs(gs.energy))
    throw Error(ErrorKind::precondition, "field is not at the mass-energy threshold");
  const auto& g = *f.grid;
  auto fl = flux(f);
  std::vector<double> a(f.size()), b(f.size());
  for (int i = 0; i < f.size(); ++i) {
    a[i] = 2.0 * g.node(i) * fl.im_flux[i];
    b[i] = 4.0 * g.node(i) * g.node(i) * fl.abs2[i];
  }
  CauchySchwarzReport r;
  double im = integrate(g, a);
  r.lhs = im * im;
  r.delta = delta(f, gs);
  r.rhs_factor = r.delta * r.delta * integrate(g, b);
  r.ratio = r.rhs_factor > 0 ? r.lhs / r.rhs_factor : 0.0;
  return r;
}

RadialField chirp_family_member(const GroundState& gs, double lambda, int branch) {
  if (branch != 1 && branch != -1) throw Error(ErrorKind::usage, "branch must be +1 or -1");
  const double v = variance(gs.q) / gs.mass;
  auto analytic = [&](double nu) {
    return 1.5 * nu * nu - nu * nu * nu + 2.0 * lambda * lambda * v / (nu * nu) - 0.5;
  };
  // bracket the root nearest nu = 1 on the requested side
  double lo = 1.0, hi = 1.0;
  const double stepnu = 1e-3 * branch;
  double fprev = analytic(1.0);
  if (lambda == 0.0) {
    lo = hi = 1.0;
  } else {
    bool found = false;
    for (int k = 1; k < 900; ++k) {
      double nu = 1.0 + k * stepnu;
      double fv = analytic(nu);
      if ((fv > 0) != (fprev > 0)) {
        lo = nu - stepnu;
        hi = nu;
        found = true;
        break;
      }
      fprev = fv;
    }
    if (!found) throw Error(ErrorKind::preparation, "no threshold member for this chirp");
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if ((analytic(mid) > 0) == (analytic(lo) > 0)) lo = mid;
      else hi = mid;
    }
  }
  auto member = [&](double nu) {
    RadialField f = dilate(gs.q, 1.0, nu);
    f *= std::sqrt(gs.mass / mass(f));
    const auto& g = *f.grid;
    for (int i = 0; i < f.size(); ++i)
      f.set(i, f.re[i] * std::exp(cplx(0.0, lambda * g.node(i) * g.node(i))));
    return f;
  };
  // secant on the discrete energy
  double n0 = 0.5 * (lo + hi), n1 = n0 * (1.0 + 1e-5 * branch);
  RadialField f0 = member(n0);
  double e0 = energy(f0) - gs.energy;
  if (lambda == 0.0) return f0;
  for (int it = 0; it < 30; ++it) {
    RadialField f1 = member(n1);
    double e1 = energy(f1) - gs.energy;
    if (std::abs(e1) <= 1e-13 * std::abs(gs.energy)) return f1;
    if (e1 == e0) break;
    double n2 = n1 - e1 * (n1 - n0) / (e1 - e0);
    n0 = n1;
    e0 = e1;
    n1 = n2;
  }
  RadialField f = member(n1);
  if (std::abs(energy(f) - gs.energy) > 1e-9 * std::abs(gs.energy))
    throw Error(ErrorKind::preparation, "chirp member energy did not converge");
  return f;
}

CauchySchwarzSweep cauchy_schwarz_sweep(const GroundState& gs, const std::vector<double>& lambdas) {
  CauchySchwarzSweep sw;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double l : lambdas) {
    if (l == 0.0) continue;
    for (int b : {1, -1}) {
      RadialField f = chirp_family_member(gs, l, b);
      auto r = cauchy_schwarz_check(f, gs);
      sw.lambdas.push_back(l);
      sw.branches.push_back(b);
      sw.reports.push_back(r);
      sw.max_ratio = std::max(sw.max_ratio, r.ratio);
      if (r.lhs > 0 && r.delta > 0) {
        double x = std::log(r.delta), y = std::log(r.lhs);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
      }
    }
  }
  if (n >= 2) {
    double vx = sxx - sx * sx / n;
    if (vx > 0) sw.order = (sxy - sx * sy / n) / vx;
  }
  return sw;
}

}  // namespace nlslab
