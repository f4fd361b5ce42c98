#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlslab/checks.hpp"
#include "nlslab/classify.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/virial.hpp"

namespace nlslab::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kComputation = 1, kUsage = 2;

struct Context {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  bool json_out = false;
  LabConfig cfg;
  fs::path out_dir;

  void load() {
    cfg = load_config(config_path ? config_path : config_path_from_env());
    out_dir = out ? fs::path(*out) : fs::path(cfg.paths.output_dir);
  }

  // writes <out>/<name>.json and echoes it (full JSON with --json, scalars otherwise)
  void emit(const std::string& name, json payload) const {
    json j = envelope(cfg, std::move(payload));
    write_json(out_dir / (name + ".json"), j);
    if (json_out) {
      std::cout << j.dump(2) << "\n";
      return;
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it->is_primitive()) std::cout << it.key() << "  " << it->dump() << "\n";
    std::cout << "wrote " << (out_dir / (name + ".json")).string() << "\n";
  }
};

GridPtr evolution_grid(const LabConfig& c) { return make_grid(c.evolution.n_points, c.grid.r_max); }

// ---- ground-state

int cmd_ground_state(Context& ctx, bool csv) {
  ShootOptions so;
  so.tol = ctx.cfg.tolerances.shoot_tol;
  so.newton_tol = ctx.cfg.tolerances.newton_tol;
  auto t = std::chrono::steady_clock::now();
  GroundState gs = solve_ground_state(make_grid(ctx.cfg.grid.n_points, ctx.cfg.grid.r_max), so);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  json j{{"q0", gs.q0},
         {"mass", gs.mass},
         {"grad_sq", gs.grad_sq},
         {"l4_4", gs.l4_4},
         {"energy", gs.energy},
         {"c_gn", gs.c_gn},
         {"residual", gs.residual},
         {"shoot_height", gs.shoot_height},
         {"newton_iterations", gs.newton_iterations},
         {"pohozhaev", {{"l4_over_mass_minus_4", gs.l4_4 / gs.mass - 4.0},
                        {"grad_over_mass_minus_3", gs.grad_sq / gs.mass - 3.0}}},
         {"n_points", ctx.cfg.grid.n_points},
         {"r_max", ctx.cfg.grid.r_max}};
  std::cerr << "elapsed " << secs << " s\n";
  if (csv) {
    write_csv(ctx.out_dir / "ground_state.csv", {{"r", gs.grid().nodes()}, {"q", gs.q.re}},
              csv_stamp(ctx.cfg));
    j["csv"] = "ground_state.csv";
  }
  ctx.emit("ground_state", j);
  return kOk;
}

// ---- spectrum / coercivity

json coercivity_json(const LinearizedPair& lp, const SpectralData& sd) {
  json j;
  for (auto [name, which] : {std::pair{"none", ConstraintSet::none},
                             std::pair{"g_perp", ConstraintSet::g_perp},
                             std::pair{"g_perp_prime", ConstraintSet::g_perp_prime}}) {
    auto c = coercivity_minimum(lp, sd, which);
    j[name] = {{"minimum", c.minimum}, {"real_block", c.min_real_block},
               {"imag_block", c.min_imag_block}, {"positive", c.positive}};
  }
  return j;
}

int cmd_spectrum(Context& ctx) {
  auto st = build_static(ctx.cfg.grid.n_points, ctx.cfg.grid.r_max, ctx.cfg.tolerances);
  json co = coercivity_json(st.lp, st.sd);
  json j{{"e0", st.sd.e0},
         {"b_norm", st.sd.b_norm},
         {"residuals", {{"plus", st.sd.residual_plus}, {"minus", st.sd.residual_minus}}},
         {"lapq_y1_ratio", st.sd.lapq_y1_ratio},
         {"coarse_e0", st.sd.coarse_e0},
         {"spectrum_floor", st.sd.spectrum_floor},
         {"coercivity", {{"g_perp", co["g_perp"]["minimum"]},
                         {"g_perp_prime", co["g_perp_prime"]["minimum"]},
                         {"unconstrained", co["none"]["minimum"]}}},
         {"n_points", ctx.cfg.grid.n_points}};
  if (fs::exists(golden_path(ctx.cfg))) {
    auto g = load_golden(golden_path(ctx.cfg));
    j["golden_e0"] = g.e0.value;
    j["golden_e0_rel_diff"] = std::abs(st.sd.e0 - g.e0.value) / g.e0.value;
  }
  write_csv(ctx.out_dir / "eigenfunctions.csv",
            {{"r", st.gs.grid().nodes()}, {"y1", st.sd.y1.re}, {"y2", st.sd.y2.re}}, csv_stamp(ctx.cfg));
  ctx.emit("spectrum", j);
  return kOk;
}

int cmd_coercivity(Context& ctx) {
  const int n = ctx.cfg.grid.n_points;
  auto fine = build_static(n, ctx.cfg.grid.r_max, ctx.cfg.tolerances);
  auto coarse = build_static(n / 2, ctx.cfg.grid.r_max, ctx.cfg.tolerances);
  json jf = coercivity_json(fine.lp, fine.sd), jc = coercivity_json(coarse.lp, coarse.sd);
  json stab;
  for (const char* k : {"g_perp", "g_perp_prime", "none"}) {
    double a = jf[k]["minimum"], b = jc[k]["minimum"];
    stab[k] = std::abs(a - b) / std::abs(a);
  }
  bool ok = jf["g_perp"]["positive"].get<bool>() && jf["g_perp_prime"]["positive"].get<bool>() &&
            jf["none"]["minimum"].get<double>() < 0;
  json j{{"n_points", n}, {"fine", jf}, {"coarse", jc}, {"coarse_n_points", n / 2},
         {"relative_change", stab}, {"signs_ok", ok}};
  ctx.emit("coercivity", j);
  return ok ? kOk : kComputation;
}

// ---- profiles

int cmd_profiles(Context& ctx, double a, int k, std::optional<double> t0) {
  if (a == 0) throw Error(ErrorKind::usage, "--A must be nonzero");
  auto st = build_static(ctx.cfg.grid.n_points, ctx.cfg.grid.r_max, ctx.cfg.tolerances);
  auto pe = build_profiles(a, k, st.sd, st.lp, st.gs);
  const double ts = t0 ? *t0 : profile_start_time(a, st.sd.e0, ctx.cfg.evolution.profile_level);
  json slopes = json::array();
  for (int j = 1; j <= k; ++j) {
    auto pj = build_profiles(a, j, st.sd, st.lp, st.gs);
    auto s = profile_residual_slope(pj, st.gs, st.lp);
    slopes.push_back({{"k", j}, {"slope", s.fit.rate}, {"expected", s.expected},
                      {"relative_error", std::abs(s.fit.rate / s.expected - 1.0)},
                      {"r_squared", s.fit.r_squared}});
  }
  RadialField u = approximate_initial_data(pe, ts, st.gs);
  for (int j = 0; j < k; ++j) {
    std::string name = "profile_Z" + std::to_string(j + 1) + ".csv";
    write_csv(ctx.out_dir / name, {{"r", st.gs.grid().nodes()}, {"re", pe.z[j].re}, {"im", pe.z[j].im}},
              csv_stamp(ctx.cfg));
  }
  json j{{"A", a}, {"k", k}, {"t0", ts}, {"e0", st.sd.e0},
         {"residual_slopes", slopes},
         {"mass_energy_deviation", {{"mass", mass(u) / st.gs.mass - 1.0},
                                    {"energy", energy(u) / st.gs.energy - 1.0}}},
         {"pde_residual_at_t0", pde_residual(pe, ts, st.gs, st.lp)},
         {"rcond", pe.rcond}};
  ctx.emit("profiles", j);
  return kOk;
}

// ---- evolve

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      size_t pos = 0;
      v.push_back(std::stod(cell, &pos));
      if (pos != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorKind::usage, std::string("cannot parse ") + what + " '" + s + "'");
    }
  }
  return v;
}

int cmd_evolve(Context& ctx, const std::string& init, const std::optional<std::string>& span,
               std::optional<double> dt, int n_snapshots) {
  GridPtr g = evolution_grid(ctx.cfg);
  ShootOptions so;
  so.tol = ctx.cfg.tolerances.shoot_tol;
  GroundState gs = solve_ground_state(g, so);
  RadialField u0;
  double t_start = 0, t_end = 1;
  std::optional<double> e0;
  json init_j;
  if (init == "ground") {
    u0 = gs.q;
    init_j = {{"kind", "ground"}};
  } else if (init.rfind("profile:", 0) == 0) {
    auto p = parse_list(init.substr(8), "profile parameters");
    if (p.size() < 1 || p.size() > 3) throw Error(ErrorKind::usage, "--init profile:A[,k[,t0]]");
    DataSpec d;
    d.a = p[0];
    if (d.a == 0) throw Error(ErrorKind::usage, "profile amplitude must be nonzero");
    d.order = p.size() > 1 ? static_cast<int>(p[1]) : ctx.cfg.evolution.profile_order;
    if (p.size() > 2) d.t0 = p[2];
    d.level = ctx.cfg.evolution.profile_level;
    auto lp = assemble(gs);
    auto sd = solve_eigenpair(lp);
    auto pd = prepare_threshold_data(d, gs, sd, lp);
    u0 = pd.u0;
    t_start = pd.t0;
    e0 = sd.e0;
    t_end = t_start + ctx.cfg.evolution.horizon_forward / sd.e0;
    init_j = to_json(d);
    init_j["t0"] = pd.t0;
  } else if (init.rfind("file:", 0) == 0) {
    u0 = read_field_csv(init.substr(5), g);
    init_j = {{"kind", "file"}, {"path", init.substr(5)}};
  } else {
    throw Error(ErrorKind::usage, "--init must be ground, profile:A,k,t0 or file:<csv>");
  }
  if (span) {
    auto s = parse_list(*span, "--t-span");
    if (s.size() != 2 || s[0] == s[1]) throw Error(ErrorKind::usage, "--t-span needs a,b with a != b");
    t_start = s[0];
    t_end = s[1];
  }
  EvolveOptions o = evolve_options(ctx.cfg);
  o.dt = std::abs(dt ? *dt : o.dt) * (t_end > t_start ? 1.0 : -1.0);
  if (o.dt == 0) throw Error(ErrorKind::usage, "--dt must be nonzero");
  const long steps = std::lround(std::abs(t_end - t_start) / std::abs(o.dt));
  const long every = std::max(1L, steps / std::max(1, n_snapshots));
  for (long s = 0; s <= steps; s += every) o.snapshot_times.push_back(t_start + s * o.dt);

  auto t = std::chrono::steady_clock::now();
  EvolutionTrace tr = integrate(u0, t_start, t_end, gs, o);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  write_trace_dir(ctx.out_dir, tr, ctx.cfg);

  json j{{"init", init_j}, {"t_span", {t_start, t_end}}, {"dt", o.dt},
         {"scheme", to_string(o.scheme)}, {"n_points", g->n_points()},
         {"steps", tr.steps}, {"substeps", tr.substeps}, {"snapshots", tr.snapshots.size()},
         {"mass_drift", tr.mass_drift}, {"energy_drift", tr.energy_drift},
         {"energy_drift_resolved", tr.energy_drift_resolved},
         {"drift_flagged", tr.drift_flagged},
         {"final_dist", tr.dist_series.empty() ? 0.0 : tr.dist_series.back()},
         {"warnings", tr.warnings}};
  std::cerr << "elapsed " << secs << " s\n";
  if (e0) j["e0"] = *e0;
  j["blowup"] = tr.blowup ? json{{"detected_at", tr.blowup->detected_at},
                                 {"reason", to_string(tr.blowup->reason)}}
                          : json(nullptr);
  auto sep = gradient_separation_monitor(tr, gs);
  j["gradient_side_held"] = sep.invariant_held;
  ctx.emit("evolve", j);
  return kOk;
}

// ---- modulate / virial

struct LoadedTrace {
  GroundState gs;
  EvolutionTrace tr;
};

LoadedTrace load_trace(const Context& ctx, const std::string& path) {
  auto [n, r_max] = trace_grid(path);
  ShootOptions so;
  so.tol = ctx.cfg.tolerances.shoot_tol;
  GroundState gs = solve_ground_state(make_grid(n, r_max), so);
  EvolutionTrace tr = read_trace_dir(path, gs.q.grid);
  return {std::move(gs), std::move(tr)};
}

int cmd_modulate(Context& ctx, const std::string& trace) {
  auto lt = load_trace(ctx, trace);
  auto frames = frame_series(lt.tr, lt.gs, default_delta0(lt.gs));
  std::vector<CsvColumn> cols{{"t", {}}, {"theta", {}}, {"alpha", {}},
                              {"h_h1", {}}, {"delta", {}}, {"valid", {}}};
  for (const auto& f : frames) {
    double row[] = {f.t, f.theta, f.alpha, f.h_h1, f.delta, f.valid ? 1.0 : 0.0};
    for (int i = 0; i < 6; ++i) cols[i].values.push_back(row[i]);
  }
  write_csv(ctx.out_dir / "modulation.csv", cols, csv_stamp(ctx.cfg));
  json j{{"trace", trace}, {"frames", frames.size()}, {"csv", "modulation.csv"}};
  try {
    auto r = comparability_report(frames, lt.gs);
    j["comparability"] = {{"valid_frames", r.valid_frames}, {"used_frames", r.used_frames},
                          {"ill_conditioned", r.ill_conditioned},
                          {"alpha_over_delta", {r.alpha_min, r.alpha_max}},
                          {"h_over_delta", {r.h_min, r.h_max}},
                          {"qh_over_delta", {r.qh_min, r.qh_max}},
                          {"alpha_ratio_small", r.alpha_ratio_small},
                          {"alpha_ratio_limit", r.alpha_ratio_limit},
                          {"delta_small", r.delta_small},
                          {"theta_rate_max", r.theta_rate_max}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::insufficient_data) throw;
    j["comparability"] = nullptr;
    j["note"] = e.what();
  }
  ctx.emit("modulate", j);
  return kOk;
}

int cmd_virial(Context& ctx, const std::string& trace, std::optional<double> radius) {
  auto lt = load_trace(ctx, trace);
  VirialOptions vo;
  vo.radius_scale = radius;
  auto rep = virial_identity_check(lt.tr, lt.gs, vo);
  std::vector<CsvColumn> cols{{"t", {}}, {"y", {}}, {"y_rate", {}}, {"y_rate_fd_accel", {}},
                              {"minus4delta", {}}, {"A_R", {}}};
  for (const auto& s : rep.series) {
    double row[] = {s.t, s.y, s.y_rate, s.has_fd ? s.y_accel_fd : NAN, s.drive, s.a_r};
    for (int i = 0; i < 6; ++i) cols[i].values.push_back(row[i]);
  }
  write_csv(ctx.out_dir / "virial.csv", cols,
            csv_stamp(ctx.cfg) +
                "\nminus4delta is 4(||grad Q||^2 - ||grad u||^2); nan marks samples without a centered stencil");
  json j{{"trace", trace}, {"applicable", rep.applicable}, {"reason", rep.reason},
         {"samples", rep.samples}, {"max_mismatch", rep.max_mismatch},
         {"max_local_mismatch", rep.max_local_mismatch}, {"max_A_R", rep.max_a_r},
         {"tail_fraction", rep.tail_fraction}, {"tail_warning", rep.tail_warning},
         {"sign_ok", rep.sign_ok}, {"csv", "virial.csv"}};
  if (radius) j["R"] = *radius;
  ctx.emit("virial", j);
  return kOk;
}

// ---- classify

int cmd_classify(Context& ctx, std::optional<int> workers) {
  SweepPlan plan = sweep_plan(ctx.cfg);
  if (workers) {
    if (*workers < 1) throw Error(ErrorKind::usage, "--workers must be positive");
    plan.workers = *workers;
  }
  GridPtr g = evolution_grid(ctx.cfg);
  ShootOptions so;
  so.tol = ctx.cfg.tolerances.shoot_tol;
  GroundState gs = solve_ground_state(g, so);
  auto lp = assemble(gs);
  auto sd = solve_eigenpair(lp);
  auto rep = sweep(plan, ctx.cfg, gs, sd, lp, ctx.out_dir);
  json cells = json::array();
  for (const auto& c : rep.cells) {
    json jc{{"id", c.id}};
    std::cerr << c.id << ": " << c.seconds << " s\n";
    if (c.verdict) {
      jc["side"] = to_string(c.verdict->side);
      jc["forward"] = to_string(c.verdict->forward);
      jc["backward"] = to_string(c.verdict->backward);
    }
    if (!c.error.empty()) jc["error"] = c.error;
    cells.push_back(jc);
  }
  json j{{"cells", cells}, {"n_cells", rep.cells.size()}, {"failures", rep.failures},
         {"side_matches_sign", rep.side_matches_sign}, {"ladder_stable", rep.ladder_stable},
         {"separation_held", rep.separation_held}, {"manifest", "manifest.json"}};
  ctx.emit("classify", j);
  if (!ctx.json_out)
    for (const auto& c : cells) std::cout << "  " << c.dump() << "\n";
  return kOk;
}

// ---- selftest

int cmd_selftest(Context& ctx) {
  auto results = selftest_suite(ctx.cfg);
  bool ok = true;
  json arr = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    arr.push_back(to_json(r));
  }
  json j = envelope(ctx.cfg, {{"passed", ok}, {"checks", arr}});
  write_json(ctx.out_dir / "selftest.json", j);
  if (ctx.json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      char line[160];
      std::snprintf(line, sizeof line, "%-26s %-4s %12.4e  (bound %.1e)", r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", r.value, r.bound);
      std::cout << line << "\n";
    }
    std::cout << (ok ? "selftest passed" : "selftest FAILED") << "\n";
  }
  return ok ? kOk : kComputation;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Radial cubic NLS threshold lab"};
  app.name("nlslab");
  Context ctx;
  app.add_option("--config", ctx.config_path, "JSON config file (default: $NLS_LAB_CONFIG)");
  app.add_option("--out", ctx.out, "output directory (default: paths.output_dir)");
  app.add_flag("--json", ctx.json_out, "print the JSON record on standard output");
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);

  bool gs_csv = false;
  auto* ground = app.add_subcommand("ground-state", "solve for Q and report its invariants");
  ground->add_flag("--csv", gs_csv, "also write ground_state.csv (r, Q)");

  auto* spectrum = app.add_subcommand("spectrum", "unstable eigenpair and coercivity minima");
  auto* coerc = app.add_subcommand("coercivity", "constrained minima of Phi at two resolutions");

  double prof_a = 1.0;
  int prof_k = 3;
  std::optional<double> prof_t0;
  auto* profiles = app.add_subcommand("profiles", "approximate special solutions Q + V_k");
  profiles->add_option("--A", prof_a, "amplitude A")->required();
  profiles->add_option("--k", prof_k, "expansion order")->check(CLI::Range(1, 6));
  profiles->add_option("--t0", prof_t0, "evaluation time (default from evolution.profile_level)");

  std::string ev_init = "ground";
  std::optional<std::string> ev_span;
  std::optional<double> ev_dt;
  int ev_snaps = 200;
  auto* evolve = app.add_subcommand("evolve", "integrate the flow and write a run directory");
  evolve->add_option("--init", ev_init, "ground | profile:A[,k[,t0]] | file:<csv>");
  evolve->add_option("--t-span", ev_span, "a,b");
  evolve->add_option("--dt", ev_dt, "time step (sign follows the span)");
  evolve->add_option("--snapshots", ev_snaps, "number of stored fields")->check(CLI::PositiveNumber);

  std::string mod_trace;
  auto* modulate = app.add_subcommand("modulate", "modulation frames along a stored run");
  modulate->add_option("--trace", mod_trace, "run directory written by evolve")->required();

  std::string vir_trace;
  std::optional<double> vir_r;
  auto* virial = app.add_subcommand("virial", "variance identities along a stored run");
  virial->add_option("--trace", vir_trace, "run directory written by evolve")->required();
  virial->add_option("--R", vir_r, "cutoff radius scale for the localized variant");

  std::optional<int> cls_workers;
  auto* classify = app.add_subcommand("classify", "run the configured classification sweep");
  classify->add_option("--workers", cls_workers, "worker threads");

  auto* selftest = app.add_subcommand("selftest", "static invariant suite with a pass/fail table");

  if (argc <= 1) {
    std::cerr << app.help() << "\n";
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    ctx.load();
    if (ground->parsed()) return cmd_ground_state(ctx, gs_csv);
    if (spectrum->parsed()) return cmd_spectrum(ctx);
    if (coerc->parsed()) return cmd_coercivity(ctx);
    if (profiles->parsed()) return cmd_profiles(ctx, prof_a, prof_k, prof_t0);
    if (evolve->parsed()) return cmd_evolve(ctx, ev_init, ev_span, ev_dt, ev_snaps);
    if (modulate->parsed()) return cmd_modulate(ctx, mod_trace);
    if (virial->parsed()) return cmd_virial(ctx, vir_trace, vir_r);
    if (classify->parsed()) return cmd_classify(ctx, cls_workers);
    if (selftest->parsed()) return cmd_selftest(ctx);
  } catch (const Error& e) {
    std::cerr << "nlslab: " << e.what() << "\n";
    return e.kind() == ErrorKind::usage ? kUsage : kComputation;
  } catch (const std::exception& e) {
    std::cerr << "nlslab: " << e.what() << "\n";
    return kComputation;
  }
  return kUsage;
}

}  // namespace nlslab::cli
