#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlslab/checks.hpp"
#include "nlslab/classify.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/virial.hpp"

namespace py = pybind11;
using namespace nlslab;

namespace {

py::array_t<double> arr(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

// Results cross the boundary as JSON text; the Python side parses it.
std::string dump(const json& j) { return j.dump(); }

LabConfig config_of(const std::optional<std::string>& text) {
  return text ? config_from_json(json::parse(*text)) : LabConfig{};
}

py::dict ground_state(int n_points, double r_max) {
  GroundState gs = solve_ground_state(make_grid(n_points, r_max), 1e-12);
  py::dict d;
  d["q0"] = gs.q0;
  d["mass"] = gs.mass;
  d["grad_sq"] = gs.grad_sq;
  d["l4_4"] = gs.l4_4;
  d["energy"] = gs.energy;
  d["c_gn"] = gs.c_gn;
  d["residual"] = gs.residual;
  d["r"] = arr(gs.grid().nodes());
  d["q"] = arr(gs.q.re);
  return d;
}

py::dict spectrum(int n_points, double r_max, bool coercivity) {
  auto st = build_static(n_points, r_max, Tolerances{});
  py::dict d;
  d["e0"] = st.sd.e0;
  d["residual_plus"] = st.sd.residual_plus;
  d["residual_minus"] = st.sd.residual_minus;
  d["lapq_y1_ratio"] = st.sd.lapq_y1_ratio;
  d["r"] = arr(st.gs.grid().nodes());
  d["y1"] = arr(st.sd.y1.re);
  d["y2"] = arr(st.sd.y2.re);
  if (coercivity) {
    d["g_perp"] = coercivity_minimum(st.lp, st.sd, ConstraintSet::g_perp).minimum;
    d["g_perp_prime"] = coercivity_minimum(st.lp, st.sd, ConstraintSet::g_perp_prime).minimum;
    d["unconstrained"] = coercivity_minimum(st.lp, st.sd, ConstraintSet::none).minimum;
  }
  return d;
}

py::list profile_slopes(double a, int k, int n_points, double r_max) {
  auto st = build_static(n_points, r_max, Tolerances{});
  py::list out;
  for (int j = 1; j <= k; ++j) {
    auto s = profile_residual_slope(build_profiles(a, j, st.sd, st.lp, st.gs), st.gs, st.lp);
    py::dict d;
    d["k"] = j;
    d["slope"] = s.fit.rate;
    d["expected"] = s.expected;
    d["r_squared"] = s.fit.r_squared;
    out.append(d);
  }
  return out;
}

py::dict evolve(const std::string& data_json, std::optional<double> t1, double dt, int n_points,
                double r_max, const std::string& scheme) {
  GroundState gs = solve_ground_state(make_grid(n_points, r_max), 1e-12);
  auto lp = assemble(gs);
  auto sd = solve_eigenpair(lp);
  auto pd = prepare_threshold_data(data_spec_from_json(json::parse(data_json)), gs, sd, lp);
  EvolveOptions o;
  o.scheme = parse_time_scheme(scheme);
  double end = t1 ? *t1 : pd.t0 + 8.0 / sd.e0;
  o.dt = end >= pd.t0 ? std::abs(dt) : -std::abs(dt);
  EvolutionTrace tr;
  {
    py::gil_scoped_release release;
    tr = integrate(pd.u0, pd.t0, end, gs, o);
  }
  py::dict d;
  d["t"] = arr(tr.times);
  d["mass"] = arr(tr.mass_series);
  d["energy"] = arr(tr.energy_series);
  d["grad"] = arr(tr.grad_series);
  d["delta"] = arr(tr.delta_series);
  d["pot"] = arr(tr.pot_series);
  d["dist"] = arr(tr.dist_series);
  d["e0"] = sd.e0;
  d["t0"] = pd.t0;
  d["mass_drift"] = tr.mass_drift;
  d["energy_drift"] = tr.energy_drift;
  d["blowup_at"] = tr.blowup ? py::object(py::float_(tr.blowup->detected_at)) : py::object(py::none());
  d["gradient_side_held"] = gradient_separation_monitor(tr, gs).invariant_held;
  return d;
}

std::string classify(const std::string& data_json, double dt, double horizon_forward,
                     double horizon_backward, int n_points, double r_max) {
  GroundState gs = solve_ground_state(make_grid(n_points, r_max), 1e-12);
  auto lp = assemble(gs);
  auto sd = solve_eigenpair(lp);
  auto pd = prepare_threshold_data(data_spec_from_json(json::parse(data_json)), gs, sd, lp);
  ClassifyOptions o;
  o.evolve.dt = dt;
  o.horizon_forward = horizon_forward;
  o.horizon_backward = horizon_backward;
  py::gil_scoped_release release;
  return dump(to_json(classify_trajectory(pd.u0, pd.t0, gs, sd, o).verdict));
}

std::string cauchy_schwarz(const std::vector<double>& lambdas, int n_points, double r_max) {
  GroundState gs = solve_ground_state(make_grid(n_points, r_max), 1e-12);
  auto sw = cauchy_schwarz_sweep(gs, lambdas);
  json rows = json::array();
  for (size_t i = 0; i < sw.reports.size(); ++i)
    rows.push_back({{"lambda", sw.lambdas[i]}, {"branch", sw.branches[i]},
                    {"delta", sw.reports[i].delta}, {"lhs", sw.reports[i].lhs},
                    {"ratio", sw.reports[i].ratio}});
  return dump({{"max_ratio", sw.max_ratio}, {"order", sw.order}, {"rows", rows}});
}

std::string selftest(const std::optional<std::string>& config_json) {
  json out = json::array();
  for (const auto& c : selftest_suite(config_of(config_json))) out.push_back(to_json(c));
  return dump(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radial cubic NLS threshold lab: ground state, linearization, evolution, classification.";

  py::register_exception<Error>(m, "LabError");

  m.def("ground_state", &ground_state, py::arg("n_points") = 4096, py::arg("r_max") = 30.0);
  m.def("spectrum", &spectrum, py::arg("n_points") = 4096, py::arg("r_max") = 30.0,
        py::arg("coercivity") = false);
  m.def("profile_slopes", &profile_slopes, py::arg("a") = 1.0, py::arg("k") = 3,
        py::arg("n_points") = 4096, py::arg("r_max") = 30.0);
  m.def("_evolve", &evolve, py::arg("data"), py::arg("t1") = std::nullopt, py::arg("dt") = 1e-4,
        py::arg("n_points") = 1024, py::arg("r_max") = 30.0, py::arg("scheme") = "implicit_cn");
  m.def("_classify", &classify, py::arg("data"), py::arg("dt") = 1e-4,
        py::arg("horizon_forward") = 8.0, py::arg("horizon_backward") = 20.0,
        py::arg("n_points") = 1024, py::arg("r_max") = 30.0);
  m.def("_cauchy_schwarz", &cauchy_schwarz, py::arg("lambdas"), py::arg("n_points") = 2048,
        py::arg("r_max") = 30.0);
  m.def("_selftest", &selftest, py::arg("config") = std::nullopt);
  m.def("config_hash", [](const std::optional<std::string>& c) { return config_hash(config_of(c)); },
        py::arg("config") = std::nullopt);
  m.attr("__version__") = code_version();
}
