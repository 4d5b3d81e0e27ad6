#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsr/geometry.hpp"

namespace lsr {

struct SolveOptions {
  int L = 24;                   // harmonic degree cap
  double tol_H_factor = 1e-10;  // tol_H = tol_H_factor / lambda, absolute
  double tol_V = 1e-10;         // acceptance bound on relative volume error
  int max_iter = 60;
  int n_radial = 48;            // radial nodes per volume panel
  double xi_fd_step = 1e-3;     // relative step for xi-derivatives
};

// Solved volume-constrained graph with linear mean curvature: the datum from
// which the reduced area is read.
struct LSSolution {
  Vec3 xi;
  double lambda = 0;
  double r = 0;          // adjusted radius; lambda^3 = r^3 (1+m/2|a|)^6 (1+psi)
  GraphSurface surface;  // center = lambda xi, radius r, height u (no l<=1 part)
  double area = 0;
  double H_residual = 0;     // sup |proj_{l>=2} H_g|
  double volume_error = 0;   // relative
  int iterations = 0;
  double sup_u = 0, sup_grad_u = 0, sup_hess_u = 0;
};

// Picard iteration preconditioned by the flat Jacobi operator, with the
// enclosed volume pinned to 4 pi lambda^3 / 3 by root-finding in r.
LSSolution solve_graph(const MetricSpec& spec, const Vec3& xi, double lambda,
                       const SolveOptions& opt = {},
                       const LSSolution* warm_start = nullptr);

double reduced_area(const MetricSpec& spec, const Vec3& xi, double lambda,
                    const SolveOptions& opt = {});

// Radial derivative d/ds|_{s=1} of s -> reduced_area(s xi, lambda) by central
// differences with Richardson; the step widens automatically when the area
// difference falls below the roundoff floor. Returns (derivative, noise floor).
struct RadialDerivative {
  double value = 0;
  double noise = 0;     // estimated absolute resolution
  double step_used = 0;
};
RadialDerivative reduced_area_radial_derivative(const MetricSpec& spec,
                                                const Vec3& xi, double lambda,
                                                const SolveOptions& opt = {},
                                                double rel_step = 1e-3);

// Schwarzschild background contribution to the reduced area.
double F0(double t);
double F0_prime(double t);

// F_sigma(xi, lambda) = 1/2 int_S tr_S sigma - (1/lambda) int_B tr sigma,
// Euclidean integrals over S_lambda(lambda xi) and B_lambda(lambda xi).
// Conformal specs are wrapped via conformal_difference_sigma.
double F_sigma(const MetricSpec& spec, const Vec3& xi, double lambda,
               int degree = 64);

// (1/2) int_B <xi, lambda xi - X> Div W, W = Div sigma - grad tr sigma.
// Exact right side of the radial-variation identity (no curvature
// substitution); requires second derivatives of sigma.
double radial_variation_rhs(const MetricSpec& spec, const Vec3& xi,
                            double lambda, int degree = 64);

struct ExpansionReport {
  double measured = 0;
  double term_sphere = 0;     // 4 pi lambda^2
  double term_R = 0;          // -(2 pi/15) lambda^4 R(lambda xi)
  double term_lap_R = 0;      // -(pi/105) lambda^6 (Lap R)(lambda xi)
  double term_xi6 = 0;        // -(8 pi/35) |xi|^-6
  double predicted = 0;
  double residual = 0;        // measured - predicted
  double lambda = 0;
  double xi_norm = 0;
};

// Assembles the displayed expansion terms and pairs them with a measured
// reduced area (computed when not supplied).
ExpansionReport predict_lsreduction(const MetricSpec& spec, const Vec3& xi,
                                    double lambda,
                                    std::optional<double> measured = {},
                                    const SolveOptions& opt = {});

// (pi/105) (-14 lambda^5 |xi| dr_R - lambda^7 |xi| dr_LapR + 144 |xi|^-6),
// radial derivatives taken at lambda xi.
double predict_lsradial(const MetricSpec& spec, const Vec3& xi, double lambda);

// Fit of measured area - 4 pi lambda^2 against {F0(|xi|), F_sigma, 1} over a
// lambda schedule, plus per-|xi point extrapolated coefficients in 1/lambda.
struct BEFitResult {
  double c_F0 = 0;                      // joint least-squares value
  std::optional<double> c_Fsigma;       // absent when unidentifiable
  std::vector<double> c_F0_per_xi;      // lambda -> inf extrapolation per |xi|
  double spread = 0;                    // max/min - 1 across per-xi values
  std::vector<double> residual_by_lambda;
  double condition_number = 0;
  bool ill_conditioned = false;
  std::string supported_constant;       // "2pi" or "pi/2"
  std::vector<double> xi_values, lambda_values;
  std::vector<std::vector<double>> samples;  // y[i][j] for xi i, lambda j
};

BEFitResult fit_BE_coefficient(const MetricSpec& spec,
                               const std::vector<double>& xi_values,
                               const std::vector<double>& lambda_values,
                               const SolveOptions& opt = {});

// Truncated curvature expression from the sigma expansion (diagnostic; the
// metrics module computes the full FD curvature).
double scalar_curvature_truncated(const MetricSpec& spec, const Vec3& x);

// 3x3 second-difference Hessian of the reduced functional in xi.
Mat3 reduced_area_hessian(const MetricSpec& spec, const Vec3& xi, double lambda,
                          const SolveOptions& opt = {}, double rel_step = 1e-3);

// Seeded compactly supported smooth sigma field (sum of truncated Gaussians)
// placed around `around` at length scale `scale`.
std::shared_ptr<SigmaField> random_smooth_sigma(std::mt19937_64& rng,
                                                const Vec3& around, double scale,
                                                int n_terms = 2);

// FD of s -> F_sigma(s xi, lambda) against radial_variation_rhs on seeded
// random sigma fields: the integration-by-parts chain is an exact identity.
struct IdentityTrial {
  double xi_norm = 0, lambda = 0;
  double fd = 0, rhs = 0, abs_diff = 0, tolerance = 0;
};
std::vector<IdentityTrial> radial_identity_check(
    std::uint64_t seed, int n_trials,
    const std::vector<std::pair<double, double>>& xi_lambda, int degree = 64);

}  // namespace lsr
