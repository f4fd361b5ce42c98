#include "nlslab/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlslab {

double default_delta0(const GroundState& gs) { return 0.1 * gs.grad_sq; }

ModulationFrame fit_frame(const RadialField& u, double t, const GroundState& gs, double delta0) {
  check_same_grid(u, gs.q);
  ModulationFrame fr;
  fr.t = t;
  fr.delta = delta(u, gs);
  fr.valid = fr.delta < delta0;
  const cplx z = inner_c(u, gs.q);
  if (std::abs(z) <= 1e-300) throw Error(ErrorKind::degenerate_input, "u has no projection on Q");
  // J(theta) = Im(e^{-i(theta+t)} z); roots are arg z - t mod pi, take the one with Re > 0
  double th = std::arg(z) - t;
  const double scale = std::abs(z);
  int it = 0;
  for (; it < 50; ++it) {
    cplx w = std::exp(cplx(0.0, -(th + t))) * z;
    if (std::abs(w.imag()) <= 1e-15 * scale) break;
    if (w.real() <= 0) throw Error(ErrorKind::degenerate_input, "negative real projection on Q");
    th += w.imag() / w.real();
  }
  if (it == 50) throw Error(ErrorKind::fit, "modulation phase did not converge");
  th = std::remainder(th, 2.0 * std::numbers::pi);
  fr.theta = th;

  RadialField w = u;
  w *= std::exp(cplx(0.0, -(th + t)));
  fr.alpha = dirichlet(w, gs.q) / gs.grad_sq - 1.0;
  fr.h = w;
  for (int i = 0; i < w.size(); ++i) fr.h.re[i] -= (1.0 + fr.alpha) * gs.q.re[i];
  fr.h_h1 = h1_norm(fr.h);
  fr.q_h1 = inner(real_field(fr.h.grid, fr.h.re), gs.q);
  return fr;
}

std::vector<ModulationFrame> frame_series(const EvolutionTrace& trace, const GroundState& gs,
                                          double delta0) {
  std::vector<ModulationFrame> out;
  out.reserve(trace.snapshots.size());
  for (const auto& [t, u] : trace.snapshots) out.push_back(fit_frame(u, t, gs, delta0));
  // snapshots are keyed by time; for backward runs walk in trace order
  if (trace.dt < 0) std::reverse(out.begin(), out.end());
  const double two_pi = 2.0 * std::numbers::pi;
  for (size_t i = 1; i < out.size(); ++i) {
    double prev = out[i - 1].theta;
    out[i].theta = prev + std::remainder(out[i].theta - prev, two_pi);
  }
  return out;
}

ComparabilityReport comparability_report(const std::vector<ModulationFrame>& frames,
                                         const GroundState& gs, double floor) {
  ComparabilityReport r;
  r.alpha_ratio_limit = 1.0 / (2.0 * gs.grad_sq);
  std::vector<const ModulationFrame*> valid;
  for (const auto& f : frames)
    if (f.valid) valid.push_back(&f);
  r.valid_frames = static_cast<int>(valid.size());
  if (r.valid_frames < 5)
    throw Error(ErrorKind::insufficient_data,
                "comparability needs at least 5 valid frames, got " + std::to_string(r.valid_frames));
  const double inf = std::numeric_limits<double>::infinity();
  r.alpha_min = r.h_min = r.qh_min = inf;
  r.alpha_max = r.h_max = r.qh_max = 0;
  r.delta_small = inf;
  for (const auto* f : valid) {
    if (f->delta <= floor) continue;
    ++r.used_frames;
    double a = std::abs(f->alpha) / f->delta;
    double hh = f->h_h1 / f->delta;
    double qh = std::abs(f->q_h1) / f->delta;
    r.alpha_min = std::min(r.alpha_min, a);
    r.alpha_max = std::max(r.alpha_max, a);
    r.h_min = std::min(r.h_min, hh);
    r.h_max = std::max(r.h_max, hh);
    r.qh_min = std::min(r.qh_min, qh);
    r.qh_max = std::max(r.qh_max, qh);
    if (f->delta < r.delta_small) {
      r.delta_small = f->delta;
      r.alpha_ratio_small = a;
    }
  }
  if (r.used_frames == 0) {
    r.ill_conditioned = true;
    r.alpha_min = r.h_min = r.qh_min = 0;
    r.delta_small = 0;
    return r;
  }
  for (size_t i = 1; i + 1 < valid.size(); ++i) {
    const auto *a = valid[i - 1], *b = valid[i], *c = valid[i + 1];
    if (b->delta <= floor || c->t == a->t) continue;
    double d = (c->theta - a->theta) / (c->t - a->t);
    r.theta_rate_max = std::max(r.theta_rate_max, std::abs(d) / b->delta);
  }
  return r;
}

}  // namespace nlslab
