#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"

using namespace nlslab;

TEST_SUITE("ground_state") {
  TEST_CASE("oracle: Q(0) and mass agree with the shooting oracle") {
    auto g = fixtures::golden();
    const auto& gs = fixtures::fine().gs;
    CHECK(std::abs(gs.q0 / g.q0.value - 1.0) < 1e-6);
    CHECK(std::abs(gs.mass / g.m_q.value - 1.0) < 1e-6);
    CHECK(std::abs(gs.shoot_height / g.q0.value - 1.0) < 1e-6);
  }

  TEST_CASE("pohozhaev identities and energy") {
    const auto& gs = fixtures::fine().gs;
    CHECK(std::abs(gs.l4_4 / gs.mass - 4.0) < 1e-6);
    CHECK(std::abs(gs.grad_sq / gs.mass - 3.0) < 1e-6);
    CHECK(std::abs(gs.energy / gs.mass - 0.5) < 1e-6);
    CHECK(gs.residual < 1e-8);
  }

  TEST_CASE("shots on either side of the ground state") {
    auto g = make_grid(2048, 30.0);
    CHECK(shoot(*g, 3.0).kind == ShotKind::turns_upward);
    CHECK(shoot(*g, 6.0).kind == ShotKind::crosses_zero);
  }

  TEST_CASE("Q is positive and decreasing") {
    const auto& q = fixtures::coarse().gs.q.re;
    for (size_t i = 1; i + 1 < q.size(); ++i) {
      CHECK(q[i] > 0);
      CHECK(q[i] < q[i - 1]);
    }
  }

  TEST_CASE("dilation scales the invariants") {
    const auto& gs = fixtures::coarse().gs;
    auto u = dilate(gs.q, 1.3, 0.9);
    Norms n = norms(u);
    CHECK(n.l2sq == doctest::Approx(1.69 / 0.729 * gs.mass).epsilon(1e-6));
    CHECK(n.grad_l2sq == doctest::Approx(1.69 / 0.9 * gs.grad_sq).epsilon(1e-5));
    CHECK_THROWS_AS(dilate(gs.q, 1.0, -1.0), Error);
  }

  TEST_CASE("threshold rescaling fixes the mass-energy product") {
    const auto& gs = fixtures::coarse().gs;
    RadialField u = gs.q;
    for (int i = 0; i < u.size(); ++i) u.re[i] *= 1.0 + 0.01 * std::exp(-u.grid->node(i));
    auto v = rescale_to_threshold(u, gs);
    CHECK(mass(v) == doctest::Approx(gs.mass).epsilon(1e-9));
  }

  TEST_CASE("gagliardo-nirenberg constant is attained by Q") {
    const auto& gs = fixtures::coarse().gs;
    CHECK(gn_constant(gs) == doctest::Approx(gs.c_gn));
    CHECK(gs.c_gn == doctest::Approx(4.0 / (3.0 * std::sqrt(3.0 * gs.mass * gs.mass))).epsilon(1e-5));
  }
}
