#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lsr/gauss.hpp"
#include "lsr/numeric.hpp"
#include "lsr/parallel.hpp"

namespace lsr {

// Product rule on the unit sphere: Gauss-Legendre in cos(theta) x uniform
// trapezoid in azimuth. Exact for spherical polynomials of degree <= 2N-1
// with N polar nodes and 2N azimuth nodes.
struct SphereRule {
  std::vector<Vec3> nodes;     // unit vectors
  std::vector<double> weights; // sum to 4 pi
  std::vector<double> theta, phi_az, sin_theta, cos_theta;
  int n_polar = 0, n_azimuth = 0;
  int exactness_degree = 0;

  static std::shared_ptr<const SphereRule> product_gauss(int degree);
  size_t size() const { return nodes.size(); }
};

// Ball rule: radial Gauss-Legendre on [0,1] with the rho^2 Jacobian folded
// into the weights, producted with a SphereRule.
struct BallRule {
  std::shared_ptr<const SphereRule> sphere;
  std::vector<double> radial_nodes;    // in (0,1)
  std::vector<double> radial_weights;  // include rho^2; sum to 1/3
  int exactness_degree = 0;

  static BallRule product_gauss(int degree);
  static BallRule product_gauss(std::shared_ptr<const SphereRule> sph,
                                int n_radial);
};

// sum_k w_k r^2 f(a + r n_k). Parallel fill, fixed-order compensated sum.
double integrate_sphere(const std::function<double(const Vec3&)>& f,
                        const Vec3& a, double r, const SphereRule& rule);
// Serial reference used in kernel-consistency tests.
double integrate_sphere_serial(const std::function<double(const Vec3&)>& f,
                               const Vec3& a, double r, const SphereRule& rule);

double integrate_ball(const std::function<double(const Vec3&)>& f,
                      const Vec3& a, double r, const BallRule& rule);
double integrate_ball_serial(const std::function<double(const Vec3&)>& f,
                             const Vec3& a, double r, const BallRule& rule);

// Integral over B_lambda(lambda xi), |xi| > 1, in origin-centered spherical
// coordinates: phi in [0, phi_plus] with sin^2 phi_plus = 1/|xi|^2, radial
// chords [rho_-, rho_+]; rotated so xi is the polar axis. The polar variable
// is substituted (sin phi = sin phi_plus sin psi) so the integrand is smooth.
double integrate_ball_spherical(const std::function<double(const Vec3&)>& f,
                                const Vec3& xi, double lambda,
                                int n_polar = 48, int n_azimuth = 96,
                                int n_radial = 48);

struct IdentityResult {
  std::string name;
  double computed = 0;
  double exact = 0;
  double rel_error = 0;
};

struct IdentityReport {
  std::vector<IdentityResult> results;
  double max_rel_error = 0;
};

// Checks the displayed ball/sphere moment identities and the three auxiliary
// integrals, with seeded random tensors. Reports; does not throw on excess.
IdentityReport verify_moment_identities(int degree, std::uint64_t seed,
                                        const std::vector<double>& r_values = {1.0, 2.5},
                                        const std::vector<double>& a_norms = {3.0, 7.0});

}  // namespace lsr
