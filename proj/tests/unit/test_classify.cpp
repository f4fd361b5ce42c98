#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nlslab/classify.hpp"

using namespace nlslab;

TEST_SUITE("classify") {
  TEST_CASE("orbit data is critical") {
    const auto& s = fixtures::coarse();
    DataSpec d;
    d.kind = DataSpec::Kind::scaled_orbit;
    d.theta = 1.2;
    auto pd = prepare_threshold_data(d, s.gs, s.sd, s.lp);
    CHECK(side_of(pd.u0, s.gs) == Side::critical);
    CHECK(std::abs(pd.mass_defect) < 1e-14);
  }

  TEST_CASE("profile data side follows the sign of A") {
    const auto& s = fixtures::coarse();
    for (double a : {1.0, -1.0}) {
      DataSpec d;
      d.a = a;
      auto pd = prepare_threshold_data(d, s.gs, s.sd, s.lp);
      CHECK(side_of(pd.u0, s.gs) == (a > 0 ? Side::supercritical : Side::subcritical));
      CHECK(std::abs(pd.mass_defect) < 1e-12);
      CHECK(std::abs(pd.energy_defect) < 1e-12);
    }
  }

  TEST_CASE("perturbed data is restored to the threshold") {
    const auto& s = fixtures::coarse();
    DataSpec d;
    d.kind = DataSpec::Kind::perturbed;
    d.seed = 7;
    auto pd = prepare_threshold_data(d, s.gs, s.sd, s.lp);
    CHECK(std::abs(pd.mass_defect) < 1e-8);
    CHECK(std::abs(pd.energy_defect) < 1e-8);
    CHECK(h1_norm(pd.u0 - s.gs.q) > 0);
    auto again = prepare_threshold_data(d, s.gs, s.sd, s.lp);
    CHECK(h1_norm(again.u0 - pd.u0) == 0.0);
  }

  TEST_CASE("orbit classification in both directions") {
    const auto& s = fixtures::coarse();
    ClassifyOptions o;
    o.evolve.dt = 1e-3;
    o.horizon_forward = 2.0;
    o.horizon_backward = 2.0;
    RadialField u = s.gs.q;
    u *= std::exp(cplx(0.0, 0.4));
    auto c = classify_trajectory(u, 0.0, s.gs, s.sd, o);
    CHECK(c.verdict.side == Side::critical);
    CHECK(c.verdict.forward == Outcome::converges_to_Q_orbit);
    CHECK(c.verdict.backward == Outcome::converges_to_Q_orbit);
    auto j = to_json(c.verdict);
    CHECK(j["side"] == "critical");
  }

  TEST_CASE("uniqueness: U^A and a time-shifted U^{A'} coincide") {
    const auto& s = fixtures::coarse();
    auto run = [&](double a) {
      DataSpec d;
      d.a = a;
      d.restore = false;
      auto pd = prepare_threshold_data(d, s.gs, s.sd, s.lp);
      EvolveOptions o;
      o.dt = 1e-3;
      o.record_stride = 20;
      o.snapshot_records = true;
      return std::pair{pd.t0, integrate(pd.u0, pd.t0, pd.t0 + 1.0 / s.sd.e0, s.gs, o)};
    };
    auto [ta, a] = run(1.0);
    auto [tb, b] = run(2.0);
    double shift = amplitude_shift(1.0, 2.0, s.sd.e0);
    CHECK(tb - ta == doctest::Approx(shift));
    auto rep = uniqueness_probe(a, b, shift, -shift, 1e-5);
    CHECK(rep.samples >= 3);
    CHECK(rep.aligned);
    auto same = uniqueness_probe(a, a, 0.0, 0.0);
    CHECK(same.sup_diff == 0.0);
    CHECK_THROWS_AS(uniqueness_probe(a, b, 5.0, 0.0), Error);
    CHECK_THROWS_AS(amplitude_shift(1.0, -1.0, s.sd.e0), Error);
  }

  TEST_CASE("opposite amplitudes do not align") {
    const auto& s = fixtures::coarse();
    auto run = [&](double a) {
      DataSpec d;
      d.a = a;
      auto pd = prepare_threshold_data(d, s.gs, s.sd, s.lp);
      EvolveOptions o;
      o.dt = 1e-3;
      o.record_stride = 20;
      o.snapshot_records = true;
      return integrate(pd.u0, pd.t0, pd.t0 + 0.5 / s.sd.e0, s.gs, o);
    };
    auto rep = uniqueness_probe(run(1.0), run(-1.0), 0.0, 0.0, 1e-5);
    CHECK(!rep.aligned);
  }

  TEST_CASE("data spec json") {
    DataSpec d = data_spec_from_json(json{{"kind", "profile"}, {"A", -2.0}, {"k", 2}});
    CHECK(d.a == -2.0);
    CHECK(d.order == 2);
    auto back = data_spec_from_json(to_json(d));
    CHECK(back.label() == d.label());
    CHECK_THROWS_AS(data_spec_from_json(json{{"kind", "mystery"}}), Error);
    CHECK_THROWS_AS(data_spec_from_json(json{{"kind", "profile"}, {"A", 0.0}}), Error);
  }

  TEST_CASE("an empty sweep is an empty report") {
    const auto& s = fixtures::coarse();
    LabConfig cfg;
    cfg.sweep = json{{"cells", json::array()}};
    auto plan = sweep_plan(cfg);
    CHECK(plan.data.empty());
    auto rep = sweep(plan, cfg, s.gs, s.sd, s.lp, {});
    CHECK(rep.cells.empty());
    CHECK(rep.failures == 0);
  }

  TEST_CASE("default sweep plan") {
    LabConfig cfg;
    auto plan = sweep_plan(cfg);
    CHECK(plan.data.size() == 4);
    CHECK(plan.dt_ladder.size() == 2);
    cfg.sweep = json{{"dt_ladder", {1e-4, -1.0}}};
    CHECK_THROWS_AS(sweep_plan(cfg), Error);
  }
}
