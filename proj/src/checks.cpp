#include "nlslab/checks.hpp"

#include <cmath>
#include <filesystem>

namespace nlslab {

json to_json(const CheckResult& c) {
  return json{{"name", c.name}, {"passed", c.passed}, {"value", c.value},
              {"bound", c.bound}, {"detail", c.detail}};
}

StaticSetup build_static(int n_points, double r_max, const Tolerances& tol) {
  ShootOptions so;
  so.tol = tol.shoot_tol;
  so.newton_tol = tol.newton_tol;
  GroundState gs = solve_ground_state(make_grid(n_points, r_max), so);
  LinearizedPair lp = assemble(gs);
  EigenOptions eo;
  eo.tol = tol.eig_tol;
  SpectralData sd = solve_eigenpair(lp, eo);
  return {std::move(gs), std::move(lp), std::move(sd)};
}

namespace {

CheckResult below(std::string name, double value, double bound, std::string detail = {}) {
  return {std::move(name), std::isfinite(value) && value < bound, value, bound, std::move(detail)};
}

double l2(const RadialGrid& g, std::vector<double> v) {
  for (auto& x : v) x *= x;
  return std::sqrt(integrate(g, v));
}

}  // namespace

std::vector<CheckResult> check_pohozhaev(const GroundState& gs, double tol) {
  return {below("pohozhaev_l4", std::abs(gs.l4_4 / gs.mass - 4.0), tol, "|L4^4/M - 4|"),
          below("pohozhaev_grad", std::abs(gs.grad_sq / gs.mass - 3.0), tol, "|G/M - 3|")};
}

CheckResult check_phi_q(const GroundState& gs, const LinearizedPair& lp, double tol) {
  return below("phi_of_q", std::abs(phi(gs.q, lp) + 4.0 * gs.mass) / (4.0 * gs.mass), tol,
               "|Phi(Q) + 4M| / 4M");
}

std::vector<CheckResult> check_operator_identities(const GroundState& gs, const LinearizedPair& lp) {
  const auto& g = gs.grid();
  const int n = g.n_points();
  const double bound = 10.0 * g.spacing() * g.spacing() * std::sqrt(gs.mass);
  const auto& q = gs.q.re;
  auto lm = lp.apply_minus(q);
  auto lq = lp.apply_plus(q);
  for (int i = 0; i < n; ++i) lq[i] += 2.0 * q[i] * q[i] * q[i];
  auto lt = lp.apply_plus(q_tilde(gs).re);
  for (int i = 0; i < n; ++i) lt[i] += 2.0 * q[i];
  lt.back() = 0;  // Q~ does not vanish at r_max, drop the boundary row
  return {below("l_minus_q", l2(g, lm), bound, "||L-Q||"),
          below("l_plus_q", l2(g, lq), bound, "||L+Q + 2Q^3||"),
          below("l_plus_q_tilde", l2(g, lt), bound, "||L+Q~ + 2Q||")};
}

std::vector<CheckResult> check_eigenpair(const SpectralData& sd, double tol) {
  std::vector<CheckResult> out = {below("eig_residual_plus", sd.residual_plus, tol, "||L+y1 - e0 y2|| rel"),
                                  below("eig_residual_minus", sd.residual_minus, tol, "||L-y2 + e0 y1|| rel")};
  CheckResult nz{"lapq_y1_nonzero", sd.lapq_y1_ratio > 1e-3, sd.lapq_y1_ratio, 1e-3,
                 "|int Lap Q y1| / (||Lap Q|| ||y1||), must exceed bound"};
  out.push_back(nz);
  return out;
}

std::vector<CheckResult> check_coercivity(const LinearizedPair& lp, const SpectralData& sd) {
  std::vector<CheckResult> out;
  auto none = coercivity_minimum(lp, sd, ConstraintSet::none);
  out.push_back({"coercivity_unconstrained", none.minimum < 0, none.minimum, 0.0, "must be negative"});
  auto gp = coercivity_minimum(lp, sd, ConstraintSet::g_perp);
  out.push_back({"coercivity_g_perp", gp.minimum > 0, gp.minimum, 0.0, "must be positive"});
  auto gpp = coercivity_minimum(lp, sd, ConstraintSet::g_perp_prime);
  out.push_back({"coercivity_g_perp_prime", gpp.minimum > 0, gpp.minimum, 0.0, "must be positive"});
  return out;
}

std::vector<CheckResult> check_golden(const GroundState& gs, const SpectralData& sd,
                                      const GoldenConstants& golden) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  return {below("golden_q0", rel(gs.q0, golden.q0.value), 1e-6, golden.q0.provenance),
          below("golden_m_q", rel(gs.mass, golden.m_q.value), 1e-6, golden.m_q.provenance),
          below("golden_e0", rel(sd.e0, golden.e0.value), 1e-4, golden.e0.provenance)};
}

SlopeFit profile_residual_slope(const ProfileExpansion& pe, const GroundState& gs,
                                const LinearizedPair& lp, double level_hi, double level_lo,
                                int samples) {
  SlopeFit s;
  const double a = std::abs(pe.a_param);
  const double t_lo = std::log(a / level_hi) / pe.e0, t_hi = std::log(a / level_lo) / pe.e0;
  for (int i = 0; i < samples; ++i) {
    double t = t_lo + (t_hi - t_lo) * i / (samples - 1);
    s.times.push_back(t);
    s.residuals.push_back(pde_residual(pe, t, gs, lp));
  }
  s.fit = exp_rate_fit(s.times, s.residuals, -1e300, 1e300, std::min(samples, 8));
  s.expected = -(pe.order + 1) * pe.e0;
  return s;
}

std::vector<CheckResult> selftest_suite(const LabConfig& cfg) {
  StaticSetup st = build_static(cfg.grid.n_points, cfg.grid.r_max, cfg.tolerances);
  std::vector<CheckResult> out = check_pohozhaev(st.gs);
  out.push_back(check_phi_q(st.gs, st.lp));
  for (auto& c : check_operator_identities(st.gs, st.lp)) out.push_back(c);
  for (auto& c : check_eigenpair(st.sd)) out.push_back(c);
  for (auto& c : check_coercivity(st.lp, st.sd)) out.push_back(c);
  if (std::filesystem::exists(golden_path(cfg))) {
    for (auto& c : check_golden(st.gs, st.sd, load_golden(golden_path(cfg)))) out.push_back(c);
  } else {
    out.push_back({"golden_constants", false, 0, 0,
                   "file '" + cfg.paths.golden_constants + "' not found; run the oracle scripts"});
  }
  return out;
}

}  // namespace nlslab
