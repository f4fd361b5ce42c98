#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"

using namespace nlslab;

TEST_SUITE("linearized") {
  TEST_CASE("oracle: e0 agrees with the dense eigenvalue oracle") {
    CHECK(std::abs(fixtures::fine().sd.e0 / fixtures::golden().e0.value - 1.0) < 1e-4);
  }

  TEST_CASE("dense block spectrum has one unstable pair") {
    auto lp = assemble(solve_ground_state(make_grid(385, 30.0), 1e-12));
    auto sd = solve_eigenpair(lp);
    auto ev = dense_block_spectrum(lp);
    int positive = 0;
    double best = 0;
    for (int i = 0; i < ev.size(); ++i)
      if (ev[i].real() > 1e-6) {
        ++positive;
        best = ev[i].real();
      }
    CHECK(positive == 1);
    CHECK(best == doctest::Approx(sd.e0).epsilon(1e-8));
  }

  TEST_CASE("eigenpair residuals and normalization") {
    const auto& s = fixtures::coarse();
    CHECK(s.sd.residual_plus < 1e-8);
    CHECK(s.sd.residual_minus < 1e-8);
    CHECK(bilinear(s.sd.y_plus(), s.sd.y_minus(), s.lp) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.sd.lapq_y1_ratio > 1e-3);
  }

  TEST_CASE("operator identities") {
    const auto& s = fixtures::coarse();
    for (const auto& c : check_operator_identities(s.gs, s.lp)) CHECK_MESSAGE(c.passed, c.name);
    const auto& f = fixtures::fine();
    CHECK(check_phi_q(f.gs, f.lp).passed);
  }

  TEST_CASE("coercivity: iterative minima match dense ones on a coarse grid") {
    auto lp = assemble(solve_ground_state(make_grid(385, 30.0), 1e-12));
    auto sd = solve_eigenpair(lp);
    for (auto w : {ConstraintSet::g_perp, ConstraintSet::g_perp_prime}) {
      auto it = coercivity_minimum(lp, sd, w);
      CHECK(it.positive);
      CHECK(it.minimum == doctest::Approx(dense_coercivity_minimum(lp, sd, w)).epsilon(1e-6));
    }
    CHECK(coercivity_minimum(lp, sd, ConstraintSet::none).minimum < 0);
  }

  TEST_CASE("mode projection is linear and sees Y+") {
    const auto& s = fixtures::coarse();
    auto p1 = project_modes(s.sd.y_plus(), s.sd, s.lp, s.gs);
    auto p2 = project_modes(cplx(2.0) * s.sd.y_plus(), s.sd, s.lp, s.gs);
    CHECK(p2.alpha_plus == doctest::Approx(2.0 * p1.alpha_plus));
    CHECK(p2.alpha_minus == doctest::Approx(2.0 * p1.alpha_minus));
    CHECK(std::abs(p1.alpha_plus) + std::abs(p1.alpha_minus) > 0.5);
  }

  TEST_CASE("gagliardo quadratic form is nonnegative on the constrained set") {
    const auto& s = fixtures::coarse();
    auto rep = gagliardo_quadratic_check(s.lp, s.gs, 20, 5);
    CHECK(rep.passed);
  }
}
