// End-to-end acceptance run: one line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nlslab/checks.hpp"
#include "nlslab/classify.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/virial.hpp"

using namespace nlslab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int id, const std::string& name, bool pass, const char* fmt, ...)
    __attribute__((format(printf, 4, 5)));

void report(int id, const std::string& name, bool pass, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  lines.push_back({id, name, pass, buf});
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), buf);
  std::fflush(stdout);
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, "exception: %s", e.what());
  }
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// conservation bookkeeping over every run made below
struct Drift {
  double mass = 0, energy = 0;
  int runs = 0;
  void add(const EvolutionTrace& tr) {
    mass = std::max(mass, tr.mass_drift);
    energy = std::max(energy, tr.energy_drift_resolved);
    ++runs;
  }
} drift;

// distance fit from t0 down to the point where the distance first reaches 10x its floor
RateFit decay_fit(const EvolutionTrace& tr) {
  size_t imin = std::min_element(tr.dist_series.begin(), tr.dist_series.end()) - tr.dist_series.begin();
  double floor = tr.dist_series[imin];
  std::vector<double> t, d;
  for (size_t i = 0; i <= imin && tr.dist_series[i] >= 10.0 * floor; ++i) {
    t.push_back(std::abs(tr.times[i] - tr.t0));
    d.push_back(tr.dist_series[i]);
  }
  return exp_rate_fit(t, d);
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = Clock::now();
  LabConfig cfg = load_config(argc > 1 ? std::optional<std::string>(argv[1]) : config_path_from_env());
  const Tolerances& tol = cfg.tolerances;
  const int n_static = cfg.grid.n_points, n_evo = cfg.evolution.n_points;
  const double dt_ref = cfg.evolution.dt;

  auto t_static = Clock::now();
  StaticSetup fine = build_static(n_static, cfg.grid.r_max, tol);
  const double static_secs = seconds_since(t_static);
  StaticSetup half = build_static(n_static / 2, cfg.grid.r_max, tol);
  const GroundState& gs = fine.gs;

  guarded(1, "pohozhaev", [&] {
    auto t = Clock::now();
    GroundState g = solve_ground_state(make_grid(n_static, cfg.grid.r_max), tol.shoot_tol);
    double secs = seconds_since(t);
    double a = std::abs(g.l4_4 / g.mass - 4.0), b = std::abs(g.grad_sq / g.mass - 3.0);
    report(1, "pohozhaev", a < 1e-6 && b < 1e-6 && secs < 10.0,
           "|L4/M-4| %.2e  |G/M-3| %.2e  %.2fs (n=%d)", a, b, secs, n_static);
  });

  guarded(2, "linearized_energy_of_Q", [&] {
    auto c = check_phi_q(gs, fine.lp);
    report(2, "linearized_energy_of_Q", c.passed, "|Phi(Q)+4M|/4M %.2e", c.value);
  });

  guarded(3, "operator_identities", [&] {
    auto cs = check_operator_identities(gs, fine.lp);
    bool ok = std::all_of(cs.begin(), cs.end(), [](auto& c) { return c.passed; });
    report(3, "operator_identities", ok, "L-Q %.2e  L+Q+2Q^3 %.2e  L+Q~+2Q %.2e  bound %.2e",
           cs[0].value, cs[1].value, cs[2].value, cs[0].bound);
  });

  guarded(4, "eigenpair", [&] {
    const auto& sd = fine.sd;
    auto golden = load_golden(golden_path(cfg));
    double og = rel(sd.e0, golden.e0.value), rf = rel(sd.e0, half.sd.e0);
    bool ok = sd.residual_plus < 1e-8 && sd.residual_minus < 1e-8 && og < 1e-4 && rf < 1e-4 &&
              sd.lapq_y1_ratio > 1e-3;
    report(4, "eigenpair", ok,
           "e0 %.8f  res %.1e/%.1e  vs oracle %.1e  n/2 %.1e  |<LapQ,y1>| %.3f  static %.2fs",
           sd.e0, sd.residual_plus, sd.residual_minus, og, rf, sd.lapq_y1_ratio, static_secs);
  });

  guarded(5, "coercivity", [&] {
    auto f = check_coercivity(fine.lp, fine.sd), h = check_coercivity(half.lp, half.sd);
    double s1 = rel(h[1].value, f[1].value), s2 = rel(h[2].value, f[2].value);
    bool ok = f[0].passed && f[1].passed && f[2].passed && s1 < 0.05 && s2 < 0.05;
    report(5, "coercivity", ok, "G-perp %.5f (n/2 %.1e)  G'-perp %.5f (n/2 %.1e)  free %.3f",
           f[1].value, s1, f[2].value, s2, f[0].value);
  });

  guarded(6, "profile_residual_ladder", [&] {
    bool ok = true;
    std::string msg;
    for (int k = 1; k <= 3; ++k) {
      auto t = Clock::now();
      auto pe = build_profiles(1.0, k, fine.sd, fine.lp, gs);
      auto s = profile_residual_slope(pe, gs, fine.lp);
      double secs = seconds_since(t), err = std::abs(s.fit.rate / s.expected - 1.0);
      ok = ok && err < 0.05 && secs < 60.0;
      char buf[96];
      std::snprintf(buf, sizeof buf, "k=%d slope/-(k+1)e0 %.4f (%.1fs)  ", k, s.fit.rate / s.expected, secs);
      msg += buf;
    }
    report(6, "profile_residual_ladder", ok, "%s", msg.c_str());
  });

  // evolution grid: U^{+-1} from profile data, both directions, snapshots on every record
  ShootOptions so;
  so.tol = tol.shoot_tol;
  GroundState ge = solve_ground_state(make_grid(n_evo, cfg.grid.r_max), so);
  LinearizedPair lpe = assemble(ge);
  SpectralData sde = solve_eigenpair(lpe);
  ClassifyOptions co = classify_options(cfg);
  co.evolve.dt = dt_ref;
  co.evolve.snapshot_records = true;

  struct Run {
    double a;
    PreparedData pd;
    Classification c;
  };
  std::vector<Run> runs;
  guarded(7, "special_solution_convergence", [&] {
    std::string msg;
    bool ok = true;
    for (double a : {1.0, -1.0}) {
      DataSpec d;
      d.a = a;
      d.level = cfg.evolution.profile_level;
      d.order = cfg.evolution.profile_order;
      Run r{a, prepare_threshold_data(d, ge, sde, lpe), {}};
      r.c = classify_trajectory(r.pd.u0, r.pd.t0, ge, sde, co);
      drift.add(r.c.forward.trace);
      drift.add(r.c.backward.trace);
      auto fit = decay_fit(r.c.forward.trace);
      double ratio = -fit.rate / sde.e0;
      ok = ok && std::abs(ratio - 1.0) < 0.10 && fit.r_squared > 0.99;
      char buf[128];
      std::snprintf(buf, sizeof buf, "A=%+g rate/e0 %.4f r2 %.6f  ", a, ratio, fit.r_squared);
      msg += buf;
      runs.push_back(std::move(r));
    }
    report(7, "special_solution_convergence", ok, "%s", msg.c_str());
  });

  guarded(8, "Q_plus_minus_asymmetry", [&] {
    if (runs.size() != 2) throw Error(ErrorKind::insufficient_data, "convergence runs missing");
    const auto& plus = runs[0].c.backward.trace;
    const auto& minus = runs[1].c.backward;
    double limit = runs[0].pd.t0 - 6.0 / sde.e0;
    bool plus_ok = plus.blowup && plus.blowup->detected_at >= limit;
    double qh = ge.mass + ge.grad_sq;
    bool minus_ok = !minus.trace.blowup && minus.pot_drop >= 100.0 && minus.max_h1sq <= 4.0 * qh;
    report(8, "Q_plus_minus_asymmetry", plus_ok && minus_ok,
           "A=+1 blow-up at t=%.4f (limit %.4f)  A=-1 pot drop %.1fx  max H1^2/H1^2(Q) %.3f",
           plus.blowup ? plus.blowup->detected_at : NAN, limit, minus.pot_drop, minus.max_h1sq / qh);
  });

  guarded(9, "gradient_separation", [&] {
    SweepPlan plan = sweep_plan(cfg);
    auto rep = sweep(plan, cfg, ge, sde, lpe, {});
    int checked = 0;
    for (const auto& c : rep.cells)
      if (c.verdict && c.verdict->side != Side::critical) ++checked;
    std::string verdicts;
    for (const auto& c : rep.cells)
      if (c.verdict)
        verdicts += " " + c.id + "=" + to_string(c.verdict->side)[0] + "/" +
                    to_string(c.verdict->forward).substr(0, 4) + "/" +
                    to_string(c.verdict->backward).substr(0, 4);
    for (const auto& c : rep.cells) {
      drift.mass = std::max(drift.mass, c.mass_drift);
      drift.energy = std::max(drift.energy, c.energy_drift);
      drift.runs += c.verdict ? 2 : 0;
    }
    bool ok = rep.separation_held && rep.failures == 0 && checked > 0;
    report(9, "gradient_separation", ok, "%zu cells, %d non-critical, failures %d, sides %s, ladder %s;%s",
           rep.cells.size(), checked, rep.failures, rep.side_matches_sign ? "ok" : "WRONG",
           rep.ladder_stable ? "stable" : "unstable", verdicts.c_str());
  });

  guarded(10, "virial_identity", [&] {
    // supercritical finite-variance run: U^{+1} backward until blow-up
    auto backward = [&](double dt, const std::vector<double>& snaps) {
      EvolveOptions o = evolve_options(cfg);
      o.dt = -dt;
      o.track_distance = false;
      if (snaps.empty()) {
        o.snapshot_records = true;
        o.record_stride = std::max(1, static_cast<int>(std::lround(1e-3 / dt)));
      }
      o.snapshot_times = snaps;
      auto tr = integrate(runs.at(0).pd.u0, runs[0].pd.t0, runs[0].pd.t0 - 6.0 / sde.e0, ge, o);
      return tr;
    };
    auto ref = backward(dt_ref, {});
    drift.add(ref);
    VirialOptions vo;
    vo.radius_scale = 5.0;
    auto r5 = virial_identity_check(ref, ge, vo);
    vo.radius_scale = 8.0;
    auto r8 = virial_identity_check(ref, ge, vo);

    // dt ladder on a common snapshot grid: the FD truncation is shared, so differences
    // between successive levels isolate the time-stepping error
    const double spacing = 8e-3, t0 = runs[0].pd.t0;
    std::vector<double> snaps;
    for (int j = 0; j < 60; ++j) snaps.push_back(t0 - j * spacing);
    std::vector<std::map<double, double>> err;
    std::vector<double> mism;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      auto tr = backward(dt, snaps);
      auto rep = virial_identity_check(tr, ge, {});
      mism.push_back(rep.max_mismatch);
      std::map<double, double> e;
      for (const auto& s : rep.series)
        if (s.has_fd) e[std::round(s.t / spacing)] = (s.y_accel_fd - s.drive) / (4.0 * s.delta);
      err.push_back(e);
    }
    auto diff = [&](const auto& a, const auto& b) {
      double m = 0;
      for (auto& [k, v] : a)
        if (b.count(k)) m = std::max(m, std::abs(v - b.at(k)));
      return m;
    };
    double d1 = diff(err[0], err[1]), d2 = diff(err[1], err[2]), ratio = d1 / d2;
    bool ok = r5.max_mismatch < 1e-2 && r5.sign_ok && ratio > 3.0 && ratio < 5.5 &&
              r5.max_local_mismatch < 1e-2 && r8.max_local_mismatch < 1e-2;
    report(10, "virial_identity", ok,
           "mismatch %.2e (dt %g, %d samples)  halving ratio %.2f  local R=5 %.2e R=8 %.2e  ladder %.1e/%.1e/%.1e",
           r5.max_mismatch, dt_ref, r5.samples, ratio, r5.max_local_mismatch, r8.max_local_mismatch,
           mism[0], mism[1], mism[2]);
  });

  guarded(11, "modulation_laws", [&] {
    // synthetic frames
    double worst = 0;
    for (double th : {-2.5, -0.3, 0.7, 3.0})
      for (double al : {-1e-2, -1e-4, 3e-5, 2e-3}) {
        double t = 0.37;
        RadialField u = ge.q;
        u *= cplx(1.0 + al) * std::exp(cplx(0.0, t + th));
        auto f = fit_frame(u, t, ge, default_delta0(ge));
        double dth = std::remainder(f.theta - th, 2 * M_PI);
        worst = std::max({worst, std::abs(dth), std::abs(f.alpha - al)});
      }
    // Q^- run at two time steps
    const auto& tr = runs.at(1).c.forward.trace;
    auto rep = comparability_report(frame_series(tr, ge, default_delta0(ge)), ge);
    ClassifyOptions c2 = co;
    c2.evolve.dt = 2.0 * dt_ref;
    c2.evolve.record_stride = std::max(1, co.evolve.record_stride / 2);
    EvolveOptions fo = c2.evolve;
    auto tr2 = integrate(runs[1].pd.u0, runs[1].pd.t0, tr.t1, ge, fo);
    drift.add(tr2);
    auto rep2 = comparability_report(frame_series(tr2, ge, default_delta0(ge)), ge);
    double lim = std::abs(rep.alpha_ratio_small / rep.alpha_ratio_limit - 1.0);
    double stab = rel(rep2.theta_rate_max, rep.theta_rate_max);
    bool ok = worst < 1e-10 && lim < 0.05 && std::isfinite(rep.theta_rate_max) && stab < 0.25;
    report(11, "modulation_laws", ok,
           "synthetic err %.1e  |alpha|/delta vs limit %.2e (delta %.1e)  |theta'|/delta max %.4f, 2dt %.4f",
           worst, lim, rep.delta_small, rep.theta_rate_max, rep2.theta_rate_max);
  });

  guarded(12, "mode_odes", [&] {
    std::string msg;
    bool ok = true;
    for (const auto& r : runs) {
      const auto& tr = r.c.forward.trace;
      std::vector<double> ts;
      std::vector<RadialField> vs;
      for (const auto& [t, u] : tr.snapshots) {
        RadialField v = u;
        v *= std::exp(cplx(0.0, -t));
        ts.push_back(t);
        vs.push_back(v - ge.q);
      }
      auto ms = mode_ode_residuals(ts, vs, {}, sde, lpe);
      std::vector<double> tt, rm, rp;
      for (const auto& s : ms) {
        tt.push_back(s.t);
        rm.push_back(std::abs(s.res_minus));
        rp.push_back(std::abs(s.res_plus));
      }
      double lo = r.pd.t0, hi = r.pd.t0 + 2.0 / sde.e0;
      auto fm = exp_rate_fit(tt, rm, lo, hi), fp = exp_rate_fit(tt, rp, lo, hi);
      ok = ok && -fm.rate >= 1.5 * sde.e0 && -fp.rate >= 1.5 * sde.e0;
      char buf[128];
      std::snprintf(buf, sizeof buf, "A=%+g rates/e0 %.2f %.2f  ", r.a, -fm.rate / sde.e0, -fp.rate / sde.e0);
      msg += buf;
    }
    report(12, "mode_odes", ok, "%s", msg.c_str());
  });

  guarded(13, "cauchy_schwarz_inequality", [&] {
    std::vector<double> lam = {-0.1, -0.05, -0.02, -0.01, -0.005, 0.005, 0.01, 0.02, 0.05, 0.1};
    auto a = cauchy_schwarz_sweep(gs, lam), b = cauchy_schwarz_sweep(half.gs, lam);
    double f = std::max(a.max_ratio, b.max_ratio) / std::min(a.max_ratio, b.max_ratio);
    bool ok = std::isfinite(a.max_ratio) && f < 2.0 && a.order >= 1.9 && b.order >= 1.9;
    report(13, "cauchy_schwarz_inequality", ok, "max ratio %.4g (n/2 %.4g, factor %.2f)  order %.3f / %.3f",
           a.max_ratio, b.max_ratio, f, a.order, b.order);
  });

  report(14, "conservation", drift.runs > 0 && drift.mass < tol.mass_budget && drift.energy < tol.energy_budget,
         "%d runs  max mass drift %.2e  max energy drift %.2e (per unit time, resolved part)",
         drift.runs, drift.mass, drift.energy);

  int failed = 0;
  for (const auto& l : lines) failed += !l.pass;
  std::printf("%d/%zu criteria passed in %.1fs\n", static_cast<int>(lines.size()) - failed, lines.size(),
              seconds_since(start));
  return failed == 0 ? 0 : 1;
}
