#include <doctest.h>

#include <cmath>
#include <random>

#include "lsr/quadrature.hpp"

using namespace lsr;

namespace {
const Vec3 kOrigin{0, 0, 0};
}

TEST_CASE("sphere rule weights sum to 4pi") {
  for (int degree : {8, 20, 48}) {
    auto rule = SphereRule::product_gauss(degree);
    Kahan<double> acc;
    for (double w : rule->weights) acc.add(w);
    CHECK(std::abs(acc.get() - 4 * kPi) <= 1e-14 * 4 * kPi);
    CHECK(rule->exactness_degree >= degree);
  }
}

TEST_CASE("sphere monomials against closed forms") {
  auto rule = SphereRule::product_gauss(48);
  double r = 1.0;
  CHECK(integrate_sphere([](const Vec3&) { return 1.0; }, kOrigin, r, *rule) ==
        doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(integrate_sphere([](const Vec3& y) { return y.x * y.x; }, kOrigin, r,
                         *rule) == doctest::Approx(4 * kPi / 3).epsilon(1e-13));
  CHECK(integrate_sphere([](const Vec3& y) { return std::pow(y.x, 6); },
                         kOrigin, r, *rule) ==
        doctest::Approx(4 * kPi / 7).epsilon(1e-13));
  CHECK(std::abs(integrate_sphere([](const Vec3& y) { return y.x * y.y * y.z; },
                                  kOrigin, r, *rule)) < 1e-14);
}

TEST_CASE("ball monomials against closed forms") {
  BallRule ball = BallRule::product_gauss(48);
  CHECK(integrate_ball([](const Vec3&) { return 1.0; }, kOrigin, 1.0, ball) ==
        doctest::Approx(4 * kPi / 3).epsilon(1e-14));
  CHECK(integrate_ball([](const Vec3& y) { return y.x * y.x; }, kOrigin, 1.0,
                       ball) == doctest::Approx(4 * kPi / 15).epsilon(1e-13));
  CHECK(integrate_ball([](const Vec3& y) { return y.x * y.x * y.y * y.y; },
                       kOrigin, 1.0, ball) ==
        doctest::Approx(4 * kPi / 105).epsilon(1e-13));
}

TEST_CASE("monomial exactness sweep") {
  auto rule = SphereRule::product_gauss(20);
  // unit sphere: 4pi (a-1)!!(b-1)!!(c-1)!!/(a+b+c+1)!! for even exponents
  auto dfact = [](int n) {
    double p = 1;
    for (int k = n; k >= 2; k -= 2) p *= k;
    return p;
  };
  for (int a = 0; a <= 6; a += 2)
    for (int b = 0; b <= 6; b += 2)
      for (int c = 0; c <= 6; c += 2) {
        double exact = 4 * kPi * dfact(a - 1) * dfact(b - 1) * dfact(c - 1) /
                       dfact(a + b + c + 1);
        double got = integrate_sphere(
            [&](const Vec3& y) {
              return std::pow(y.x, a) * std::pow(y.y, b) * std::pow(y.z, c);
            },
            kOrigin, 1.0, *rule);
        CHECK(std::abs(got - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
      }
}

TEST_CASE("rotation invariance of polynomial integrands") {
  auto rule = SphereRule::product_gauss(24);
  std::mt19937_64 rng(99);
  Mat3 Q = random_rotation(rng);
  auto f = [](const Vec3& y) {
    return 1.0 + y.x * y.x * y.y - 0.5 * y.z * y.z * y.z * y.z + y.x * y.y * y.z;
  };
  double base = integrate_sphere(f, kOrigin, 2.0, *rule);
  double rot = integrate_sphere([&](const Vec3& y) { return f(Q * y); },
                                kOrigin, 2.0, *rule);
  CHECK(rot == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("spherical-coordinate ball evaluator") {
  BallRule ball = BallRule::product_gauss(48);
  SUBCASE("volume") {
    double v = integrate_ball_spherical([](const Vec3&) { return 1.0; },
                                        {2, 0, 0}, 1.5);
    CHECK(v == doctest::Approx(4 * kPi / 3 * std::pow(1.5, 3)).epsilon(1e-12));
  }
  SUBCASE("matches the Cartesian evaluator on smooth integrands") {
    for (double xin : {1.5, 3.0}) {
      Vec3 xi{0.6 * xin, 0.8 * xin, 0};
      double lambda = 1.0;
      auto f = [](const Vec3& x) { return std::pow(x.norm2(), -2); };
      double cart = integrate_ball(f, xi * lambda, lambda, ball);
      double sph = integrate_ball_spherical(f, xi, lambda);
      CHECK(std::abs(sph - cart) <= 1e-10 * std::abs(cart));
    }
  }
  SUBCASE("radial weight inequality for non-increasing rho^2 R") {
    auto R = [](const Vec3& x) {
      double rho = x.norm();
      return std::pow(rho, -2) * 0.5 * (1.0 - std::tanh(4.0 * (rho - 2.0)));
    };
    Vec3 xi{2.0, 0, 0};
    double lambda = 1.0;
    auto f = [&](const Vec3& x) { return dot(xi * lambda - x, xi) * R(x); };
    CHECK(integrate_ball_spherical(f, xi, lambda) >= -1e-12);
  }
  SUBCASE("domain error for |xi| <= 1") {
    CHECK_THROWS(integrate_ball_spherical([](const Vec3&) { return 1.0; },
                                          {0.5, 0, 0}, 1.0));
  }
}

TEST_CASE("moment identity suite") {
  IdentityReport rep = verify_moment_identities(48, 4242);
  CHECK(rep.results.size() >= 15);
  for (const auto& r : rep.results) {
    INFO(r.name);
    CHECK(r.rel_error <= 1e-12);
  }
  CHECK(rep.max_rel_error <= 1e-12);
}

TEST_CASE("identity suite is deterministic in the seed") {
  IdentityReport a = verify_moment_identities(24, 7);
  IdentityReport b = verify_moment_identities(24, 7);
  REQUIRE(a.results.size() == b.results.size());
  for (size_t i = 0; i < a.results.size(); ++i)
    CHECK(a.results[i].computed == b.results[i].computed);
}
