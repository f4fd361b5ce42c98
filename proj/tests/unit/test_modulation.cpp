#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nlslab/modulation.hpp"

using namespace nlslab;

TEST_SUITE("modulation") {
  TEST_CASE("synthetic frames are recovered") {
    const auto& gs = fixtures::coarse().gs;
    for (double th : {-1.0, 0.0, 2.0})
      for (double al : {-1e-3, 0.0, 5e-4}) {
        RadialField u = gs.q;
        u *= cplx(1.0 + al) * std::exp(cplx(0.0, 0.25 + th));
        auto f = fit_frame(u, 0.25, gs, default_delta0(gs));
        CHECK(std::abs(std::remainder(f.theta - th, 2 * M_PI)) < 1e-10);
        CHECK(std::abs(f.alpha - al) < 1e-10);
        CHECK(f.h_h1 < 1e-10);
      }
  }

  TEST_CASE("the residual h is orthogonal to the fitted directions") {
    const auto& gs = fixtures::coarse().gs;
    RadialField u = gs.q;
    for (int i = 0; i < u.size() - 1; ++i) {
      double r = u.grid->node(i);
      u.set(i, u.at(i) + 1e-3 * cplx(std::exp(-r * r), 0.3 * std::exp(-r)));
    }
    auto f = fit_frame(u, 0.0, gs, default_delta0(gs));
    CHECK(f.valid);
    // h = w - (1 + alpha) Q with int grad Q . grad Re h = 0 by construction of alpha
    CHECK(std::abs(dirichlet(real_field(gs.q.grid, f.h.re), gs.q)) < 1e-10 * gs.grad_sq);
  }

  TEST_CASE("degenerate input") {
    const auto& gs = fixtures::coarse().gs;
    RadialField z(gs.q.grid);
    CHECK_THROWS_AS(fit_frame(z, 0.0, gs, default_delta0(gs)), Error);
  }

  TEST_CASE("comparability needs enough frames") {
    const auto& gs = fixtures::coarse().gs;
    std::vector<ModulationFrame> frames(3);
    CHECK_THROWS_AS(comparability_report(frames, gs), Error);
  }
}
