#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"

using namespace nlslab;

namespace {

RadialField bump(const GroundState& gs, double eps) {
  RadialField u = gs.q;
  for (int i = 0; i < u.size() - 1; ++i) {
    double r = u.grid->node(i);
    u.set(i, u.at(i) + eps * cplx(1.0, 0.5) * std::exp(-r * r));
  }
  return u;
}

}  // namespace

TEST_SUITE("evolve") {
  TEST_CASE("Q stays on its orbit") {
    const auto& gs = fixtures::coarse().gs;
    EvolveOptions o;
    o.dt = 1e-3;
    auto tr = integrate(gs.q, 0.0, 0.5, gs, o);
    CHECK(tr.dist_series.back() < 1e-9);
    CHECK(!tr.blowup);
    auto d = distance_to_orbit(tr.final_state(), 0.5, gs);
    CHECK(d.dist_h1 < 1e-9);
  }

  TEST_CASE("conservation under both schemes") {
    const auto& gs = fixtures::coarse().gs;
    for (auto scheme : {TimeScheme::implicit_cn, TimeScheme::strang}) {
      EvolveOptions o;
      o.dt = 1e-3;
      o.scheme = scheme;
      auto tr = integrate(bump(gs, -0.05), 0.0, 0.3, gs, o);
      CHECK(tr.mass_drift < 1e-10);
      CHECK(tr.energy_drift < (scheme == TimeScheme::implicit_cn ? 1e-10 : 1e-4));
    }
  }

  TEST_CASE("phase equivariance") {
    const auto& gs = fixtures::coarse().gs;
    EvolveOptions o;
    o.dt = 2e-3;
    auto u = bump(gs, 0.02);
    RadialField v = u;
    v *= std::exp(cplx(0.0, 0.7));
    auto a = integrate(u, 0.0, 0.2, gs, o), b = integrate(v, 0.0, 0.2, gs, o);
    RadialField fa = a.final_state();
    fa *= std::exp(cplx(0.0, 0.7));
    CHECK(h1_norm(fa - b.final_state()) < 1e-11);
  }

  TEST_CASE("backward runs reverse forward runs") {
    const auto& gs = fixtures::coarse().gs;
    EvolveOptions o;
    o.dt = 1e-3;
    auto u = bump(gs, 0.03);
    auto f = integrate(u, 0.0, 0.1, gs, o);
    o.dt = -1e-3;
    auto b = integrate(f.final_state(), 0.1, 0.0, gs, o);
    CHECK(h1_norm(b.final_state() - u) < 1e-10);
  }

  TEST_CASE("large data blows up and is detected") {
    const auto& gs = fixtures::coarse().gs;
    RadialField u = gs.q;
    u *= cplx(1.3);
    EvolveOptions o;
    o.dt = 1e-4;
    auto tr = integrate(u, 0.0, 2.0, gs, o);
    REQUIRE(tr.blowup);
    CHECK(tr.blowup->detected_at < 1.0);
  }

  TEST_CASE("rate fit on exact exponentials") {
    std::vector<double> t, v;
    for (int i = 0; i < 20; ++i) {
      t.push_back(0.1 * i);
      v.push_back(3.0 * std::exp(-2.5 * 0.1 * i));
    }
    auto f = exp_rate_fit(t, v);
    CHECK(f.rate == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK_THROWS_AS(exp_rate_fit({0, 1}, {1, 2}), Error);
  }

  TEST_CASE("gradient separation monitor") {
    const auto& gs = fixtures::coarse().gs;
    EvolutionTrace tr;
    tr.times = {0, 1, 2, 3};
    tr.grad_series = {gs.grad_sq - 1.0, gs.grad_sq - 0.5, gs.grad_sq - 0.1, gs.grad_sq - 0.01};
    CHECK(gradient_separation_monitor(tr, gs).invariant_held);
    CHECK(gradient_separation_monitor(tr, gs).side == -1);
    tr.grad_series[3] = gs.grad_sq + 0.2;
    auto v = gradient_separation_monitor(tr, gs);
    CHECK(!v.invariant_held);
    REQUIRE(v.first_violation);
    CHECK(*v.first_violation == 3.0);
  }

  TEST_CASE("scheme names") {
    CHECK(parse_time_scheme("strang") == TimeScheme::strang);
    CHECK(to_string(parse_time_scheme("implicit_cn")) == "implicit_cn");
    CHECK_THROWS_AS(parse_time_scheme("rk4"), Error);
  }
}
