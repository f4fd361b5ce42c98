#include "nlslab/classify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace nlslab {

namespace fs = std::filesystem;

std::string to_string(Side s) {
  switch (s) {
    case Side::subcritical: return "subcritical";
    case Side::critical: return "critical";
    case Side::supercritical: return "supercritical";
  }
  return "unknown";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::converges_to_Q_orbit: return "converges_to_Q_orbit";
    case Outcome::scatter_proxy: return "scatter_proxy";
    case Outcome::blowup: return "blowup";
    case Outcome::undetermined: return "undetermined";
  }
  return "unknown";
}

std::string DataSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::profile:
      os << "profile_A" << (a > 0 ? "+" : "") << a << "_k" << order << "_lvl" << level;
      if (t0) os << "_t" << *t0;
      break;
    case Kind::scaled_orbit: os << "orbit_theta" << theta; break;
    case Kind::perturbed: os << "perturbed_seed" << seed << "_amp" << amplitude; break;
  }
  return os.str();
}

DataSpec data_spec_from_json(const json& j) {
  DataSpec d;
  const std::string kind = j.value("kind", std::string("profile"));
  if (kind == "profile") d.kind = DataSpec::Kind::profile;
  else if (kind == "scaled_orbit") d.kind = DataSpec::Kind::scaled_orbit;
  else if (kind == "perturbed") d.kind = DataSpec::Kind::perturbed;
  else throw Error(ErrorKind::usage, "unknown data kind '" + kind + "'");
  d.a = j.value("A", d.a);
  d.order = j.value("k", d.order);
  if (j.contains("t0")) d.t0 = j["t0"].get<double>();
  d.level = j.value("level", d.level);
  d.theta = j.value("theta", d.theta);
  d.seed = j.value("seed", d.seed);
  d.amplitude = j.value("amplitude", d.amplitude);
  d.restore = j.value("restore", d.restore);
  if (d.kind == DataSpec::Kind::profile && d.a == 0)
    throw Error(ErrorKind::usage, "profile data needs A != 0");
  return d;
}

json to_json(const DataSpec& d) {
  json j;
  switch (d.kind) {
    case DataSpec::Kind::profile:
      j = {{"kind", "profile"}, {"A", d.a}, {"k", d.order}, {"level", d.level}};
      if (d.t0) j["t0"] = *d.t0;
      break;
    case DataSpec::Kind::scaled_orbit: j = {{"kind", "scaled_orbit"}, {"theta", d.theta}}; break;
    case DataSpec::Kind::perturbed:
      j = {{"kind", "perturbed"}, {"seed", d.seed}, {"amplitude", d.amplitude}};
      break;
  }
  j["restore"] = d.restore;
  return j;
}

RadialField restore_threshold(const RadialField& u, const GroundState& gs, double tol) {
  check_same_grid(u, gs.q);
  auto on_mass = [&](RadialField f) {
    double m = mass(f);
    if (!(m > 0)) throw Error(ErrorKind::preparation, "cannot restore the threshold of a zero field");
    f *= std::sqrt(gs.mass / m);
    return f;
  };
  RadialField f = on_mass(u);
  if (std::abs(energy(f) - gs.energy) <= tol * std::abs(gs.energy)) return f;

  // continuum scaling: M fixed by mu^2 = s nu^3, E(nu) = a nu^2 - b nu^3
  Norms nr = norms(u);
  const double s = gs.mass / nr.l2sq;
  const double a = 0.5 * s * nr.grad_l2sq, b = 0.25 * s * s * nr.l4_4;
  auto fe = [&](double nu) { return a * nu * nu - b * nu * nu * nu - gs.energy; };
  const double top = 2.0 * a / (3.0 * b);
  if (!(fe(top) >= 0)) throw Error(ErrorKind::preparation, "threshold energy not reachable by scaling");
  auto bisect = [&](double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if ((fe(mid) >= 0) == (fe(lo) >= 0)) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  double hi = top;
  while (fe(hi) >= 0) hi *= 2.0;
  const double r1 = bisect(1e-6 * top, top), r2 = bisect(top, hi);
  double nu = std::abs(r1 - 1.0) < std::abs(r2 - 1.0) ? r1 : r2;

  auto member = [&](double v) { return on_mass(dilate(u, 1.0, v)); };
  double n0 = nu, n1 = nu * (1.0 + 1e-6 * (nu < top ? -1.0 : 1.0));
  double e0 = energy(member(n0)) - gs.energy;
  for (int it = 0; it < 40; ++it) {
    RadialField g1 = member(n1);
    double e1 = energy(g1) - gs.energy;
    if (std::abs(e1) <= tol * std::abs(gs.energy)) return g1;
    if (e1 == e0) break;
    double n2 = n1 - e1 * (n1 - n0) / (e1 - e0);
    n0 = n1;
    e0 = e1;
    n1 = n2;
  }
  RadialField g1 = member(n1);
  if (std::abs(energy(g1) - gs.energy) > 1e-8 * std::abs(gs.energy))
    throw Error(ErrorKind::preparation, "threshold restoration did not converge");
  return g1;
}

PreparedData prepare_threshold_data(const DataSpec& spec, const GroundState& gs,
                                    const SpectralData& sd, const LinearizedPair& lp) {
  PreparedData pd;
  switch (spec.kind) {
    case DataSpec::Kind::profile: {
      auto pe = build_profiles(spec.a, spec.order, sd, lp, gs);
      pd.t0 = spec.t0 ? *spec.t0 : profile_start_time(spec.a, sd.e0, spec.level);
      pd.u0 = approximate_initial_data(pe, pd.t0, gs);
      if (spec.restore) pd.u0 = restore_threshold(pd.u0, gs);
      pd.u0 *= std::exp(cplx(0.0, pd.t0));
      break;
    }
    case DataSpec::Kind::scaled_orbit:
      pd.u0 = gs.q;
      pd.u0 *= std::exp(cplx(0.0, spec.theta));
      break;
    case DataSpec::Kind::perturbed: {
      std::mt19937_64 rng(spec.seed);
      RadialField p = random_smooth_field(gs.q.grid, rng, true);
      RadialField u = gs.q + (spec.amplitude * h1_norm(gs.q) / h1_norm(p)) * p;
      u = rescale_to_threshold(u, gs);
      pd.u0 = restore_threshold(u, gs);
      break;
    }
  }
  pd.mass_defect = mass(pd.u0) / gs.mass - 1.0;
  pd.energy_defect = energy(pd.u0) / gs.energy - 1.0;
  return pd;
}

ClassifyOptions classify_options(const LabConfig& c) {
  ClassifyOptions o;
  o.evolve = evolve_options(c);
  o.horizon_forward = c.evolution.horizon_forward;
  o.horizon_backward = c.evolution.horizon_backward;
  return o;
}

Side side_of(const RadialField& u0, const GroundState& gs, double floor) {
  double d = std::sqrt(norms(u0).grad_l2sq) - std::sqrt(gs.grad_sq);
  if (std::abs(d) <= floor) return Side::critical;
  return d > 0 ? Side::supercritical : Side::subcritical;
}

namespace {

DirectionResult analyze(EvolutionTrace tr, double t0, double e0, const GroundState& gs,
                        const ClassifyOptions& o, bool critical) {
  DirectionResult r;
  r.separation = gradient_separation_monitor(tr, gs, o.side_floor);
  const size_t n = tr.times.size();
  for (size_t i = 0; i < n; ++i)
    r.max_h1sq = std::max(r.max_h1sq, tr.mass_series[i] + tr.grad_series[i]);
  if (n > 0 && tr.pot_series.back() > 0) r.pot_drop = tr.pot_series.front() / tr.pot_series.back();
  size_t imin = 0;
  if (!tr.dist_series.empty()) {
    imin = std::min_element(tr.dist_series.begin(), tr.dist_series.end()) - tr.dist_series.begin();
    r.min_dist = tr.dist_series[imin];
  }

  if (tr.blowup) {
    r.outcome = Outcome::blowup;
    r.note = "blow-up detected (" + to_string(tr.blowup->reason) + ") at t = " +
             std::to_string(tr.blowup->detected_at);
  } else if (critical) {
    double mx = tr.dist_series.empty() ? 0.0
                                       : *std::max_element(tr.dist_series.begin(), tr.dist_series.end());
    r.outcome = mx <= o.orbit_tol ? Outcome::converges_to_Q_orbit : Outcome::undetermined;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", mx);
    r.note = std::string("on-threshold data; max distance to the orbit ") + buf;
  } else {
    // convergence: exponential decay of the orbit distance down to its floor
    std::vector<double> el, dv;
    for (size_t i = 0; i <= imin && i < tr.dist_series.size(); ++i) {
      if (tr.dist_series[i] < 10.0 * r.min_dist) break;
      el.push_back(std::abs(tr.times[i] - t0));
      dv.push_back(tr.dist_series[i]);
    }
    if (el.size() >= 8 && dv.front() > 0) {
      try {
        r.dist_fit = exp_rate_fit(el, dv);
      } catch (const Error&) {
      }
    }
    const double pot_ok = r.pot_drop >= o.scatter_drop;
    double min_delta_late = std::numeric_limits<double>::infinity();
    for (size_t i = n / 2; i < n; ++i) min_delta_late = std::min(min_delta_late, tr.delta_series[i]);
    const double q_h1sq = gs.mass + gs.grad_sq;
    if (r.dist_fit && r.dist_fit->rate <= -o.rate_fraction * e0 && r.dist_fit->r_squared > o.min_r2 &&
        dv.front() / dv.back() >= o.min_decay) {
      r.outcome = Outcome::converges_to_Q_orbit;
    } else if (pot_ok && r.max_h1sq <= o.h1_bound * q_h1sq && min_delta_late >= o.delta_floor * gs.grad_sq) {
      r.outcome = Outcome::scatter_proxy;
      r.note = "scattering certified by proxy only: potential energy fell by " +
               std::to_string(r.pot_drop) + "x with bounded H1 norm";
    }
  }
  r.trace = std::move(tr);
  return r;
}

}  // namespace

Classification classify_trajectory(const RadialField& u0, double t0, const GroundState& gs,
                                   const SpectralData& sd, const ClassifyOptions& opts) {
  Classification c;
  Verdict& v = c.verdict;
  v.side = side_of(u0, gs, opts.side_floor);
  const bool critical = v.side == Side::critical;
  const double m = mass(u0), e = energy(u0);
  if (std::abs(m * e - gs.mass * gs.energy) > 1e-6 * std::abs(gs.mass * gs.energy))
    v.notes.push_back("data is not at the mass-energy threshold; the threshold dichotomy does not apply");

  EvolveOptions fo = opts.evolve;
  fo.dt = std::abs(fo.dt);
  fo.track_distance = true;
  EvolveOptions bo = fo;
  bo.dt = -fo.dt;
  c.forward = analyze(integrate(u0, t0, t0 + opts.horizon_forward / sd.e0, gs, fo), t0, sd.e0, gs,
                      opts, critical);
  // on the orbit itself round-off grows like exp(e0 |t|), so keep critical runs short
  const double back = critical ? std::min(opts.horizon_backward, opts.horizon_forward) : opts.horizon_backward;
  c.backward = analyze(integrate(u0, t0, t0 - back / sd.e0, gs, bo), t0, sd.e0,
                       gs, opts, critical);
  v.forward = c.forward.outcome;
  v.backward = c.backward.outcome;
  v.rates["e0"] = sd.e0;
  for (auto* d : {&c.forward, &c.backward}) {
    const std::string pre = d == &c.forward ? "forward_" : "backward_";
    if (d->dist_fit) {
      v.rates[pre + "dist_rate"] = d->dist_fit->rate;
      v.rates[pre + "dist_r2"] = d->dist_fit->r_squared;
    }
    v.rates[pre + "pot_drop"] = d->pot_drop;
    v.rates[pre + "min_dist"] = d->min_dist;
    if (!d->note.empty()) v.notes.push_back(pre + d->note);
    if (!d->separation.invariant_held)
      v.notes.push_back(pre + "gradient side changed at t = " +
                        std::to_string(*d->separation.first_violation));
  }
  return c;
}

json to_json(const Verdict& v) {
  return json{{"side", to_string(v.side)}, {"forward", to_string(v.forward)},
              {"backward", to_string(v.backward)}, {"rates", v.rates},
              {"evidence", v.evidence}, {"notes", v.notes}};
}

UniquenessReport uniqueness_probe(const EvolutionTrace& a, const EvolutionTrace& b, double shift,
                                  double phase, double tolerance) {
  UniquenessReport r;
  r.tolerance = tolerance;
  const double eps = 1e-6 * std::max(std::abs(b.dt), 1e-12);
  const cplx ph = std::exp(cplx(0.0, phase));
  double last_t = -1e300;
  for (const auto& [t, ua] : a.snapshots) {
    double tb = t + shift;
    auto it = b.snapshots.lower_bound(tb - eps);
    if (it == b.snapshots.end() || std::abs(it->first - tb) > eps) continue;
    check_same_grid(ua, it->second);
    RadialField ub = it->second;
    ub *= ph;
    double d = h1_norm(ua - ub);
    r.sup_diff = std::max(r.sup_diff, d);
    if (t > last_t) {
      last_t = t;
      r.final_diff = d;
    }
    ++r.samples;
  }
  if (r.samples < 3)
    throw Error(ErrorKind::insufficient_data, "traces overlap on fewer than 3 snapshot times");
  r.aligned = r.sup_diff <= tolerance;
  return r;
}

double amplitude_shift(double a, double a_ref, double e0) {
  if (!(a * a_ref > 0)) throw Error(ErrorKind::domain, "amplitudes of opposite sign are not related by a time shift");
  return std::log(a_ref / a) / e0;
}

SweepPlan sweep_plan(const LabConfig& c) {
  SweepPlan p;
  const json& s = c.sweep;
  p.workers = s.value("workers", static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (p.workers < 1) throw Error(ErrorKind::usage, "sweep.workers must be positive");
  if (s.contains("dt_ladder")) {
    p.dt_ladder = s["dt_ladder"].get<std::vector<double>>();
  } else {
    p.dt_ladder = {2.0 * c.evolution.dt, c.evolution.dt};
  }
  for (double d : p.dt_ladder)
    if (!(d > 0)) throw Error(ErrorKind::usage, "sweep.dt_ladder entries must be positive");
  if (s.contains("cells")) {
    for (const auto& cell : s["cells"]) p.data.push_back(data_spec_from_json(cell));
  } else {
    DataSpec plus, minus, orbit, pert;
    plus.a = 1.0;
    minus.a = -1.0;
    plus.level = minus.level = c.evolution.profile_level;
    plus.order = minus.order = c.evolution.profile_order;
    orbit.kind = DataSpec::Kind::scaled_orbit;
    orbit.theta = 1.2;
    pert.kind = DataSpec::Kind::perturbed;
    pert.seed = c.seed;
    p.data = {plus, minus, orbit, pert};
  }
  return p;
}

SweepReport sweep(const SweepPlan& plan, const LabConfig& cfg, const GroundState& gs,
                  const SpectralData& sd, const LinearizedPair& lp, const fs::path& out_dir) {
  SweepReport rep;
  for (const auto& d : plan.data)
    for (double dt : plan.dt_ladder) {
      SweepCell c;
      c.data = d;
      c.dt = dt;
      std::ostringstream id;
      id << d.label() << "_dt" << dt;
      c.id = id.str();
      rep.cells.push_back(c);
    }
  if (!out_dir.empty()) fs::create_directories(out_dir / "cells");

  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next++; i < rep.cells.size(); i = next++) {
      auto& cell = rep.cells[i];
      auto start = std::chrono::steady_clock::now();
      try {
        auto pd = prepare_threshold_data(cell.data, gs, sd, lp);
        ClassifyOptions o = classify_options(cfg);
        o.evolve.dt = cell.dt;
        auto res = classify_trajectory(pd.u0, pd.t0, gs, sd, o);
        cell.separation_held = res.forward.separation.invariant_held &&
                               res.backward.separation.invariant_held;
        cell.energy_drift = std::max(res.forward.trace.energy_drift_resolved,
                                     res.backward.trace.energy_drift_resolved);
        cell.mass_drift = std::max(res.forward.trace.mass_drift, res.backward.trace.mass_drift);
        if (!out_dir.empty()) {
          for (auto* d : {&res.forward, &res.backward}) {
            std::string name = cell.id + (d == &res.forward ? "_fwd.csv" : "_bwd.csv");
            write_csv(out_dir / "cells" / name, trace_columns(d->trace), csv_stamp(cfg));
            res.verdict.evidence.push_back("cells/" + name);
          }
        }
        cell.verdict = res.verdict;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int nw = std::max(1, std::min<int>(plan.workers, static_cast<int>(rep.cells.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::map<std::string, std::vector<const SweepCell*>> by_data;
  for (const auto& c : rep.cells) {
    if (!c.error.empty() || !c.verdict) {
      ++rep.failures;
      continue;
    }
    by_data[c.data.label()].push_back(&c);
    if (c.data.kind == DataSpec::Kind::profile) {
      Side want = c.data.a > 0 ? Side::supercritical : Side::subcritical;
      if (c.verdict->side != want) rep.side_matches_sign = false;
    }
    if (c.verdict->side != Side::critical && !c.separation_held) rep.separation_held = false;
  }
  for (auto& [label, cells] : by_data) {
    if (cells.size() < 2) continue;
    auto sorted = cells;
    std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->dt < y->dt; });
    const auto &v0 = *sorted[0]->verdict, &v1 = *sorted[1]->verdict;
    if (v0.side != v1.side || v0.forward != v1.forward || v0.backward != v1.backward)
      rep.ladder_stable = false;
  }

  if (!out_dir.empty()) {
    json cells = json::array();
    for (const auto& c : rep.cells) {
      json jc{{"id", c.id}, {"data", to_json(c.data)}, {"dt", c.dt},
              {"separation_held", c.separation_held}, {"energy_drift", c.energy_drift},
              {"mass_drift", c.mass_drift}};
      if (c.verdict) jc["verdict"] = to_json(*c.verdict);
      if (!c.error.empty()) jc["error"] = c.error;
      cells.push_back(jc);
    }
    json m{{"cells", cells},
           {"side_matches_sign", rep.side_matches_sign},
           {"ladder_stable", rep.ladder_stable},
           {"separation_held", rep.separation_held},
           {"failures", rep.failures},
           {"grid", {{"n_points", gs.grid().n_points()}, {"r_max", gs.grid().r_max()}}},
           {"e0", sd.e0},
           {"scattering_note", "scatter_proxy is a finite-horizon proxy: potential-energy collapse with bounded H1 norm"}};
    write_json(out_dir / "manifest.json", envelope(cfg, m));
  }
  return rep;
}

}  // namespace nlslab
