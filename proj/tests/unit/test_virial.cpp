#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nlslab/virial.hpp"

using namespace nlslab;

TEST_SUITE("virial") {
  TEST_CASE("cutoff shape") {
    CutoffShape sh;
    double max2 = -1e9, min0 = 1e9, jump = 0;
    for (double s = 0; s < 4; s += 1e-4) {
      max2 = std::max(max2, sh.eval(s, 2));
      min0 = std::min(min0, sh.eval(s, 0));
    }
    CHECK(max2 <= 2.0 + 1e-12);
    CHECK(min0 >= 0.0);
    for (double s : {0.3, 0.9}) {
      CHECK(sh.eval(s, 0) == doctest::Approx(s * s));
      CHECK(sh.laplacian(s) == doctest::Approx(6.0));
      CHECK(sh.bilaplacian(s) == doctest::Approx(0.0));
    }
    CHECK(sh.eval(sh.support() + 0.1, 1) == 0.0);
    CHECK(sh.eval(sh.support() + 0.1, 2) == 0.0);
    for (double s : {1.0, 1.25, sh.support() - 0.5, sh.support()})
      for (int d = 0; d <= 3; ++d) jump = std::max(jump, std::abs(sh.eval(s - 1e-9, d) - sh.eval(s + 1e-9, d)));
    CHECK(jump < 1e-6);
  }

  TEST_CASE("localized quantities reduce to the global ones on Q") {
    const auto& gs = fixtures::coarse().gs;
    const double y = variance(gs.q);
    auto c8 = make_cutoff(gs.grid(), 8.0), c11 = make_cutoff(gs.grid(), 11.0);
    double d8 = std::abs(localized_variance(gs.q, c8) - y), d11 = std::abs(localized_variance(gs.q, c11) - y);
    CHECK(d8 < 1e-4 * y);
    CHECK(d11 < 1e-2 * d8);
    CHECK(std::abs(localized_remainder(gs.q, c8)) < 1e-6);
    CHECK_THROWS_AS(make_cutoff(gs.grid(), 20.0), Error);
  }

  TEST_CASE("chirped Q has y' = 8 lambda y") {
    const auto& gs = fixtures::coarse().gs;
    RadialField u = gs.q;
    const double lam = 0.25;
    for (int i = 0; i < u.size(); ++i) {
      double r = u.grid->node(i);
      u.set(i, gs.q.re[i] * std::exp(cplx(0, lam * r * r)));
    }
    CHECK(variance_rate(u) == doctest::Approx(8.0 * lam * variance(gs.q)).epsilon(1e-5));
    CHECK(variance_rate(gs.q) == doctest::Approx(0.0));
  }

  TEST_CASE("chirp family stays on the threshold") {
    const auto& gs = fixtures::coarse().gs;
    for (int branch : {1, -1}) {
      auto f = chirp_family_member(gs, 0.02, branch);
      CHECK(mass(f) == doctest::Approx(gs.mass).epsilon(1e-10));
      CHECK(energy(f) == doctest::Approx(gs.energy).epsilon(1e-8));
      auto rep = cauchy_schwarz_check(f, gs);
      CHECK(rep.ratio < 1.0);
    }
  }

  TEST_CASE("off-threshold data is refused") {
    const auto& gs = fixtures::coarse().gs;
    RadialField u = gs.q;
    u *= cplx(0.9);
    CHECK_THROWS_AS(cauchy_schwarz_check(u, gs), Error);
  }

  TEST_CASE("virial check needs snapshots") {
    const auto& gs = fixtures::coarse().gs;
    EvolveOptions o;
    o.dt = 1e-3;
    auto tr = integrate(gs.q, 0.0, 0.01, gs, o);
    CHECK_THROWS_AS(virial_identity_check(tr, gs), Error);
  }
}
