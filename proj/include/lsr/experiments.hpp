#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsr/reduction.hpp"

namespace lsr {

struct ScanOptions {
  SolveOptions solve;
  double points_per_unit = 25.0;
  double bisect_width = 1e-3;     // bracket width for critical points
  double deriv_rel_step = 1e-3;
  Vec3 direction{1, 0, 0};        // scan direction e
};

struct ScanPoint {
  double t = 0;
  double reduced_area = 0;
  double fd_derivative = 0;
  double fd_noise = 0;
  double predicted_derivative = 0;
};

struct ScanResult {
  double lambda = 0;
  std::string metric;
  std::vector<ScanPoint> points;
  // sign-change brackets of the FD derivative, refined by bisection
  struct Critical {
    double t_star = 0;
    double second_difference = 0;  // radial second difference at t_star
    bool stable = false;           // local minimum in the radial direction
  };
  std::vector<Critical> critical_points;
  std::optional<double> t_star;    // first stable critical point, if any
  std::array<double, 3> hessian_eigenvalues{0, 0, 0};
  bool hessian_psd = false;
  std::string verdict;
  double A_used = 0;               // thm13 amplitude (when applicable)
  std::vector<std::string> notes;
};

// Scan of t -> reduced_area(t e, lambda) with FD and predicted derivatives.
ScanResult scan_radial(const MetricSpec& spec, double lambda, double t_min,
                       double t_max, int n_points, const ScanOptions& opt = {});

// Pulsed metric with decay order 4: locates the predicted stable critical
// point between 2*sqrt(2) and 5 at lambda = 10^j. A <= 0 requests the doubling
// search starting from 1.
ScanResult run_thm13(double A, int j, const ScanOptions& opt = {});

// Pulsed metric with decay order 5 (chi'(5) = -1 variant), lambda = 10^k,
// |xi| = 10^k t: scans t in [3, 7], brackets every derivative sign change,
// and reports stability plus a termwise comparison with predict_lsradial.
ScanResult run_thm17(int k, const ScanOptions& opt = {});

struct Cor16Report {
  struct GridPoint {
    double r = 0;
    double radial_convexity = 0;  // x^i x^j d_i d_j R = r^2 d^2_r R (radial)
    double R = 0;
  };
  std::vector<GridPoint> grid;
  bool convexity_violated = false;    // somewhere on the grid
  double dr_R_at_xi = 0;              // dr R(lambda xi)
  double reference_scale = 0;         // lambda^-5 |xi|^-7
  double ratio = 0;                   // |dr R| / reference scale
};

// Radial-convexity diagnostics for the non-existence obstruction.
Cor16Report corollary16_diagnostics(const MetricSpec& spec, const Vec3& xi,
                                    double lambda,
                                    double r_lo = 0, double r_hi = 0,
                                    int n_grid = 64);

}  // namespace lsr
