#include <doctest.h>

#include <cmath>

#include "lsr/geometry.hpp"
#include "lsr/quadrature.hpp"

using namespace lsr;

// The parallel kernels fill per-slot buffers and reduce in fixed order, so
// they must agree bitwise with the serial reference at any thread count.

TEST_CASE("sphere and ball kernels match the serial reference bitwise") {
  auto rule = SphereRule::product_gauss(32);
  BallRule ball = BallRule::product_gauss(rule, 20);
  MetricSpec s2 = MetricSpec::schwarzschild(2.0);
  auto f = [&](const Vec3& x) {
    return metric_at(s2, x).trace() * std::sin(x.x) + x.norm2();
  };
  Vec3 a{20, 3, -1};
  for (int threads : {1, 4}) {
    set_threads(threads);
    CHECK(integrate_sphere(f, a, 5.0, *rule) ==
          integrate_sphere_serial(f, a, 5.0, *rule));
    CHECK(integrate_ball(f, a, 5.0, ball) ==
          integrate_ball_serial(f, a, 5.0, ball));
  }
  set_threads(0);
}

TEST_CASE("surface pipeline independent of thread count") {
  MetricSpec s2 = MetricSpec::schwarzschild(2.0);
  GraphSurface s = GraphSurface::round_sphere({25, 0, 0}, 4.0, 10);
  s.u.coefs[HarmonicBasis::index_of(2, 1)] = 0.01;
  set_threads(1);
  double a1 = area(s2, s);
  double v1 = enclosed_volume(s2, s);
  auto h1 = surface_geometry(s2, s).mean_curvature;
  set_threads(4);
  double a2 = area(s2, s);
  double v2 = enclosed_volume(s2, s);
  auto h2 = surface_geometry(s2, s).mean_curvature;
  set_threads(0);
  CHECK(a1 == a2);
  CHECK(v1 == v2);
  REQUIRE(h1.size() == h2.size());
  for (size_t k = 0; k < h1.size(); ++k) CHECK(h1[k] == h2[k]);
}
