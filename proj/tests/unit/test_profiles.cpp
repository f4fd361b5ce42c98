#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"

using namespace nlslab;

TEST_SUITE("profiles") {
  TEST_CASE("first profile is A Y+") {
    const auto& s = fixtures::coarse();
    auto pe = build_profiles(-0.5, 1, s.sd, s.lp, s.gs);
    REQUIRE(pe.z.size() == 1);
    auto d = pe.z[0] - cplx(-0.5) * s.sd.y_plus();
    CHECK(h1_norm(d) < 1e-14);
  }

  TEST_CASE("residual slope ladder") {
    const auto& s = fixtures::coarse();
    for (int k = 1; k <= 3; ++k) {
      auto pe = build_profiles(1.0, k, s.sd, s.lp, s.gs);
      auto fit = profile_residual_slope(pe, s.gs, s.lp);
      CHECK_MESSAGE(std::abs(fit.fit.rate / fit.expected - 1.0) < 0.05, "k = " << k);
    }
  }

  TEST_CASE("amplitude homogeneity") {
    // V^A(t) depends on A e^{-e0 t} only
    const auto& s = fixtures::coarse();
    auto a = build_profiles(1.0, 3, s.sd, s.lp, s.gs), b = build_profiles(2.0, 3, s.sd, s.lp, s.gs);
    double t = 0.9, shift = std::log(2.0) / s.sd.e0;
    CHECK(h1_norm(evaluate_v(a, t) - evaluate_v(b, t + shift)) < 1e-12);
  }

  TEST_CASE("start time and time shift") {
    CHECK(profile_start_time(1.0, 5.0, 1e-2) == doctest::Approx(std::log(100.0) / 5.0));
    CHECK(profile_start_time(-3.0, 5.0, 1e-2) == doctest::Approx(std::log(300.0) / 5.0));
    CHECK(time_shift_relation(1.0, 0.5, 5.0) == doctest::Approx(-0.5));
    CHECK(time_shift_relation(std::exp(1.0), 0.0, 2.0) == doctest::Approx(-0.5));
  }

  TEST_CASE("invalid requests") {
    const auto& s = fixtures::coarse();
    CHECK_THROWS_AS(build_profiles(1.0, 0, s.sd, s.lp, s.gs), Error);
    CHECK_THROWS_AS(build_profiles(1.0, 9, s.sd, s.lp, s.gs), Error);
  }

  TEST_CASE("profile data sits near the threshold with the sign of A") {
    const auto& s = fixtures::coarse();
    for (double a : {1.0, -1.0}) {
      auto pe = build_profiles(a, 3, s.sd, s.lp, s.gs);
      double t0 = profile_start_time(a, s.sd.e0, 1e-3);
      auto u = approximate_initial_data(pe, t0, s.gs);
      CHECK(std::abs(mass(u) / s.gs.mass - 1.0) < 1e-6);
      CHECK(std::abs(energy(u) / s.gs.energy - 1.0) < 1e-6);
      double side = norms(u).grad_l2sq - s.gs.grad_sq;
      CHECK(side * a > 0);
    }
  }
}
