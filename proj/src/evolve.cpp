#include "nlslab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlslab {

std::string to_string(BlowupReason r) {
  switch (r) {
    case BlowupReason::grad_explosion: return "grad_explosion";
    case BlowupReason::nan: return "nan";
    case BlowupReason::unresolved: return "unresolved";
  }
  return "unknown";
}

std::string to_string(TimeScheme s) {
  return s == TimeScheme::strang ? "strang" : "implicit_cn";
}

TimeScheme parse_time_scheme(const std::string& s) {
  if (s == "strang") return TimeScheme::strang;
  if (s == "implicit_cn") return TimeScheme::implicit_cn;
  throw Error(ErrorKind::usage, "unknown time scheme '" + s + "'");
}

namespace {

class Stepper {
 public:
  Stepper(const RadialGrid& g, double dt, TimeScheme scheme, double tol, int max_iter,
          int max_level)
      : g_(g), dt_(dt), scheme_(scheme), tol_(tol), max_iter_(max_iter), max_level_(max_level),
        mlap_(minus_laplacian_g(g)) {
    inv_r2_.resize(g.interior());
    for (int k = 0; k < g.interior(); ++k) inv_r2_[k] = 1.0 / (g.node(k + 1) * g.node(k + 1));
  }

  // One macro step of size dt made of 2^level substeps.
  void step(std::vector<cplx>& u, int level) {
    const int s = 1 << level;
    const double tau = dt_ / s;
    auto& lu = factor(level, tau);
    if (scheme_ == TimeScheme::implicit_cn) {
      for (int k = 0; k < s; ++k) implicit_substep(u, level);
      return;
    }
    nonlinear(u, 0.5 * tau);
    for (int k = 0; k < s; ++k) {
      linear(u, lu, tau);
      nonlinear(u, k + 1 < s ? tau : 0.5 * tau);
    }
  }

  double max_abs2(const std::vector<cplx>& u) const {
    double m = 0.0;
    for (size_t k = 0; k < u.size(); ++k) m = std::max(m, std::norm(u[k]) * inv_r2_[k]);
    return m;
  }

  // A substep whose fixed-point iteration stalls is redone as two half substeps.
  void implicit_substep(std::vector<cplx>& u, int level) {
    if (level > max_level_)
      throw Error(ErrorKind::solver, "implicit Crank-Nicolson iteration did not converge");
    const double tau = dt_ / (1 << level);
    if (implicit(u, factor(level, tau), tau)) return;
    ++retries_;
    implicit_substep(u, level + 1);
    implicit_substep(u, level + 1);
  }

  long retries() const { return retries_; }

 private:
  // (I + i tau/2 A) u+ = (I - i tau/2 A) u + i tau (|u+|^2 + |u|^2)/2 (u+ + u)/2,
  // solved by fixed-point iteration from a Strang predictor; u is untouched on failure
  bool implicit(std::vector<cplx>& u, const BandLU<cplx>& lu, double tau) {
    const size_t m = u.size();
    explicit_rhs(u, tau, base_);
    next_ = u;
    nonlinear(next_, 0.5 * tau);
    linear(next_, lu, tau);
    nonlinear(next_, 0.5 * tau);
    const cplx c(0.0, 0.5 * tau);
    for (int it = 0;; ++it) {
      work_ = base_;
      for (size_t k = 0; k < m; ++k) {
        double w = 0.5 * (std::norm(next_[k]) + std::norm(u[k])) * inv_r2_[k];
        work_[k] += c * w * (next_[k] + u[k]);
      }
      lu.solve(work_);
      double diff = 0.0, scale = 0.0;
      for (size_t k = 0; k < m; ++k) {
        diff = std::max(diff, std::abs(work_[k] - next_[k]));
        scale = std::max(scale, std::abs(work_[k]));
      }
      next_.swap(work_);
      if (diff <= tol_ * std::max(scale, 1e-300)) break;
      if (it + 1 >= max_iter_ || !std::isfinite(diff)) return false;
    }
    u.swap(next_);
    return true;
  }

  void explicit_rhs(const std::vector<cplx>& u, double tau, std::vector<cplx>& rhs) const {
    const int m = static_cast<int>(u.size());
    const cplx c(0.0, 0.5 * tau);
    rhs = u;
    for (int i = 0; i < m; ++i) rhs[i] -= c * mlap_.bands[0][i] * u[i];
    for (int k = 1; k <= mlap_.p; ++k) {
      const auto& b = mlap_.bands[k];
      for (int i = 0; i + k < m; ++i) {
        rhs[i] -= c * b[i] * u[i + k];
        rhs[i + k] -= c * b[i] * u[i];
      }
    }
  }

  void nonlinear(std::vector<cplx>& u, double tau) const {
    for (size_t k = 0; k < u.size(); ++k) {
      double a = std::norm(u[k]) * inv_r2_[k] * tau;
      u[k] *= cplx(std::cos(a), std::sin(a));
    }
  }

  void linear(std::vector<cplx>& u, const BandLU<cplx>& lu, double tau) const {
    // (I + i tau/2 A) u+ = (I - i tau/2 A) u, A = -D
    std::vector<cplx> rhs;
    explicit_rhs(u, tau, rhs);
    lu.solve(rhs);
    u.swap(rhs);
  }

  BandLU<cplx>& factor(int level, double tau) {
    auto it = cache_.find(level);
    if (it != cache_.end()) return it->second;
    const int m = mlap_.n, p = mlap_.p;
    BandLU<cplx> lu(m, p, p);
    const cplx c(0.0, 0.5 * tau);
    for (int i = 0; i < m; ++i) lu.set(i, i, 1.0 + c * mlap_.bands[0][i]);
    for (int k = 1; k <= p; ++k)
      for (int i = 0; i + k < m; ++i) {
        lu.set(i, i + k, c * mlap_.bands[k][i]);
        lu.set(i + k, i, c * mlap_.bands[k][i]);
      }
    lu.factor();
    return cache_.emplace(level, std::move(lu)).first->second;
  }

  const RadialGrid& g_;
  double dt_;
  TimeScheme scheme_;
  double tol_;
  int max_iter_;
  int max_level_;
  long retries_ = 0;
  std::vector<cplx> base_, next_, work_;
  SymBand mlap_;
  std::vector<double> inv_r2_;
  std::map<int, BandLU<cplx>> cache_;
};

std::vector<cplx> field_to_g(const RadialField& u) {
  const auto& g = *u.grid;
  std::vector<cplx> out(g.interior());
  for (int k = 0; k < g.interior(); ++k) out[k] = g.node(k + 1) * u.at(k + 1);
  return out;
}

RadialField g_to_field(const GridPtr& grid, const std::vector<cplx>& v) {
  const auto& g = *grid;
  std::vector<double> re(v.size()), im(v.size());
  for (size_t k = 0; k < v.size(); ++k) {
    re[k] = v[k].real();
    im[k] = v[k].imag();
  }
  return RadialField(grid, from_g(g, re), from_g(g, im));
}

}  // namespace

EvolutionTrace integrate(const RadialField& u0, double t0, double t1, const GroundState& gs,
                         const EvolveOptions& opts) {
  check_same_grid(u0, gs.q);
  const auto& g = *u0.grid;
  if (opts.dt == 0.0 || !std::isfinite(opts.dt)) throw Error(ErrorKind::usage, "dt must be nonzero");
  if (t1 != t0 && (t1 - t0) * opts.dt < 0)
    throw Error(ErrorKind::usage, "dt sign does not match the integration direction");
  if (opts.record_stride < 1) throw Error(ErrorKind::usage, "record_stride must be positive");

  EvolutionTrace tr;
  tr.t0 = t0;
  tr.t1 = t1;
  const long nsteps = t1 == t0 ? 0 : static_cast<long>(std::ceil(std::abs(t1 - t0) / std::abs(opts.dt) - 1e-9));
  const double dt = nsteps > 0 ? (t1 - t0) / nsteps : opts.dt;
  tr.dt = dt;
  const double h = g.spacing();
  if (std::abs(dt) > opts.cfl_safety * h * h)
    tr.warnings.push_back("dt exceeds cfl_safety * spacing^2; Crank-Nicolson is stable but "
                          "high modes are phase-distorted");

  Stepper stepper(g, dt, opts.scheme, opts.implicit_tol, opts.implicit_max_iter,
                  opts.max_refine_level + 6);
  std::vector<cplx> u = field_to_g(u0);
  const double amp0 = std::max(stepper.max_abs2(u), 1e-300);
  const double grad_limit = opts.blowup_factor * opts.blowup_factor * gs.grad_sq;

  std::vector<double> snaps(opts.snapshot_times);
  std::sort(snaps.begin(), snaps.end());
  if (dt < 0) std::reverse(snaps.begin(), snaps.end());
  size_t next_snap = 0;

  double m0 = 0, e0 = 0;
  int level = 0;
  bool refined_yet = false;
  auto record = [&](double t, const RadialField& f) -> bool {
    Norms nr = norms(f);
    double e = 0.5 * nr.grad_l2sq - 0.25 * nr.l4_4;
    if (tr.times.empty()) {
      m0 = nr.l2sq;
      e0 = e;
    }
    tr.times.push_back(t);
    tr.mass_series.push_back(nr.l2sq);
    tr.energy_series.push_back(e);
    tr.grad_series.push_back(nr.grad_l2sq);
    tr.delta_series.push_back(std::abs(gs.grad_sq - nr.grad_l2sq));
    tr.pot_series.push_back(nr.l4_4);
    tr.level_series.push_back(level);
    if (opts.track_distance) tr.dist_series.push_back(distance_to_orbit(f, t, gs).dist_h1);
    if (opts.snapshot_records) tr.snapshots[t] = f;
    if (opts.observer) opts.observer(t, f);

    double el = std::max(std::abs(t - t0), 1.0);
    if (m0 > 0) tr.mass_drift = std::max(tr.mass_drift, std::abs(nr.l2sq - m0) / m0 / el);
    if (e0 != 0) {
      double d = std::abs(e - e0) / std::abs(e0) / el;
      tr.energy_drift = std::max(tr.energy_drift, d);
      if (!refined_yet) tr.energy_drift_resolved = std::max(tr.energy_drift_resolved, d);
    }
    if (!std::isfinite(nr.l2sq) || !std::isfinite(nr.grad_l2sq)) {
      tr.blowup = BlowupRecord{t, BlowupReason::nan};
      return false;
    }
    if (nr.grad_l2sq > grad_limit) {
      tr.blowup = BlowupRecord{t, BlowupReason::grad_explosion};
      return false;
    }
    return true;
  };
  auto maybe_snapshot = [&](double t, long step) {
    while (next_snap < snaps.size()) {
      double ts = snaps[next_snap];
      bool passed = dt > 0 ? ts <= t + 0.5 * dt : ts >= t + 0.5 * dt;
      if (!passed) break;
      if (step == 0 || std::abs(ts - t) <= 0.5 * std::abs(dt) + 1e-12)
        tr.snapshots[t] = g_to_field(u0.grid, u);
      ++next_snap;
    }
  };

  bool alive = record(t0, u0);
  maybe_snapshot(t0, 0);
  double t = t0;
  long k = 0;
  for (; alive && k < nsteps; ++k) {
    double amp = stepper.max_abs2(u);
    if (!std::isfinite(amp)) {
      tr.blowup = BlowupRecord{t, BlowupReason::nan};
      alive = false;
      break;
    }
    level = amp <= opts.refine_ratio * amp0
                ? 0
                : static_cast<int>(std::ceil(std::log2(amp / (opts.refine_ratio * amp0))));
    if (level > opts.max_refine_level) {
      tr.blowup = BlowupRecord{t, BlowupReason::unresolved};
      alive = false;
      break;
    }
    if (level > 0) refined_yet = true;
    stepper.step(u, level);
    tr.substeps += 1L << level;
    t = t0 + (k + 1) * dt;
    maybe_snapshot(t, k + 1);
    if ((k + 1) % opts.record_stride == 0 || k + 1 == nsteps) {
      alive = record(t, g_to_field(u0.grid, u));
    }
  }
  tr.steps = k;
  if (stepper.retries() > 0)
    tr.warnings.push_back("implicit iteration stalled " + std::to_string(stepper.retries()) +
                          " times; those substeps were halved");
  tr.snapshots[t] = g_to_field(u0.grid, u);
  tr.drift_flagged = tr.mass_drift > opts.mass_budget || tr.energy_drift_resolved > opts.energy_budget;
  return tr;
}

OrbitDistance distance_to_orbit(const RadialField& u, double t, const GroundState& gs) {
  check_same_grid(u, gs.q);
  const cplx z = inner_c(u, gs.q) + dirichlet_c(u, gs.q);
  const cplx zl2 = inner_c(u, gs.q);
  // f(theta) = -Re(e^{-i(t+theta)} z), the theta-dependent part of the squared distance
  auto f = [&](double th) { return -(std::exp(cplx(0.0, -(t + th))) * z).real(); };
  double seed = std::abs(zl2) > 0 ? std::arg(zl2) - t : -t;
  double a = seed - 1.0, b = seed + 1.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-7) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  double th = 0.5 * (a + b);
  // Newton polish on f'(theta) = -Im(e^{-i(t+theta)} z)
  for (int i = 0; i < 4 && std::abs(z) > 0; ++i) {
    cplx w = std::exp(cplx(0.0, -(t + th))) * z;
    if (w.real() <= 0) break;
    th -= -w.imag() / w.real();
  }
  th = std::remainder(th, 2.0 * std::numbers::pi);
  RadialField diff = u;
  const cplx ph = std::exp(cplx(0.0, t + th));
  for (int i = 0; i < diff.size(); ++i) diff.set(i, diff.at(i) - ph * gs.q.re[i]);
  return {h1_norm(diff), th};
}

RateFit exp_rate_fit(const std::vector<double>& t, const std::vector<double>& value, double t_lo,
                     double t_hi, int min_samples) {
  if (t.size() != value.size()) throw Error(ErrorKind::structural, "series length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(value[i] > 0)) throw Error(ErrorKind::domain, "rate fit needs positive values");
    double x = t[i], y = std::log(value[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n < min_samples)
    throw Error(ErrorKind::insufficient_data, "rate fit window has " + std::to_string(n) + " samples");
  RateFit out;
  out.samples = n;
  double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  if (vx <= 0) throw Error(ErrorKind::insufficient_data, "rate fit window has no time extent");
  out.rate = cxy / vx;
  out.intercept = (sy - out.rate * sx) / n;
  out.r_squared = vy <= 1e-300 * std::max(1.0, syy) ? 1.0 : cxy * cxy / (vx * vy);
  return out;
}

SeparationVerdict gradient_separation_monitor(const EvolutionTrace& trace, const GroundState& gs,
                                              double floor) {
  SeparationVerdict v;
  const double ref = std::sqrt(gs.grad_sq);
  for (size_t i = 0; i < trace.times.size(); ++i) {
    double s = std::sqrt(trace.grad_series[i]) - ref;
    if (std::abs(s) <= floor) continue;
    int sg = s > 0 ? 1 : -1;
    if (v.side == 0) {
      v.side = sg;
    } else if (sg != v.side && v.invariant_held) {
      v.invariant_held = false;
      v.first_violation = trace.times[i];
    }
  }
  return v;
}

}  // namespace nlslab
