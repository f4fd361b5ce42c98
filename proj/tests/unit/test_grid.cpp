#include <cmath>

#include "doctest.h"
#include "nlslab/grid.hpp"

using namespace nlslab;

TEST_SUITE("radial_grid") {
  TEST_CASE("constructor rejects bad parameters") {
    CHECK_THROWS_AS(make_grid(8, 30.0), Error);
    CHECK_THROWS_AS(make_grid(1024, -1.0), Error);
    CHECK_THROWS_AS(make_grid(1024, 30.0, 3), Error);
  }

  TEST_CASE("gaussian integral") {
    auto g = make_grid(2048, 30.0);
    std::vector<double> v(g->n_points());
    for (int i = 0; i < g->n_points(); ++i) v[i] = std::exp(-g->node(i) * g->node(i));
    CHECK(integrate(*g, v) == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-10));
  }

  TEST_CASE("laplacian of a gaussian") {
    auto g = make_grid(2048, 30.0);
    RadialField f(g);
    for (int i = 0; i < f.size(); ++i) f.re[i] = std::exp(-g->node(i) * g->node(i));
    auto lap = laplacian(f);
    double err = 0;
    for (int i = 1; i < f.size() - 1; ++i) {
      double r = g->node(i);
      err = std::max(err, std::abs(lap.re[i] - (4 * r * r - 6) * f.re[i]));
    }
    CHECK(err < 1e-6);  // fourth order, h = 0.0147
  }

  TEST_CASE("dirichlet form equals the gradient norm") {
    auto g = make_grid(1024, 30.0);
    RadialField f(g);
    for (int i = 0; i < f.size(); ++i) {
      double r = g->node(i);
      f.set(i, cplx(std::exp(-r * r / 4), 0.3 * r * std::exp(-r * r / 3)));
    }
    f.set(f.size() - 1, 0.0);
    CHECK(dirichlet(f, f) == doctest::Approx(norms(f).grad_l2sq).epsilon(1e-12));
    RadialField q = real_field(g, f.re);
    std::vector<double> d = derivative_real(*g, q.re);
    for (auto& x : d) x *= x;
    CHECK(norms(q).grad_l2sq == doctest::Approx(integrate(*g, d)).epsilon(1e-6));
  }

  TEST_CASE("mixed grids are refused") {
    RadialField a(make_grid(1024, 30.0)), b(make_grid(1024, 30.0));
    CHECK_NOTHROW(check_same_grid(a, a));
    RadialField c(make_grid(512, 30.0));
    CHECK_THROWS_AS(check_same_grid(a, c), Error);
    CHECK_THROWS_AS(a += c, Error);
  }

  TEST_CASE("radial fields carry no momentum") {
    auto g = make_grid(512, 30.0);
    RadialField f(g);
    for (int i = 0; i < f.size(); ++i) f.set(i, std::exp(cplx(-g->node(i), g->node(i))));
    auto p = momentum(f);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.0);
    CHECK(p[2] == 0.0);
  }

  TEST_CASE("g-space round trip") {
    auto g = make_grid(512, 30.0);
    std::vector<double> f(g->n_points());
    for (int i = 0; i < g->n_points() - 1; ++i) f[i] = 1.0 / (1.0 + g->node(i) * g->node(i));
    auto back = from_g(*g, to_g(*g, f));
    for (int i = 1; i < g->n_points(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-14));
    CHECK(back[0] == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("interpolation reproduces smooth data") {
    auto g = make_grid(1024, 30.0);
    std::vector<double> f(g->n_points());
    for (int i = 0; i < g->n_points(); ++i) f[i] = std::cos(g->node(i));
    CHECK(interpolate(*g, f, 1.2345) == doctest::Approx(std::cos(1.2345)).epsilon(1e-9));
    CHECK(interpolate(*g, f, 31.0) == 0.0);
  }
}
