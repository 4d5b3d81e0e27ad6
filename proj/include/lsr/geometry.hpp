#pragma once

#include "lsr/harmonics.hpp"
#include "lsr/metrics.hpp"

namespace lsr {

// Radial graph over the coordinate sphere S_r(center): X(n) = center + (r + u(n)) n.
struct GraphSurface {
  Vec3 center;
  double radius = 1.0;
  HarmonicField u;

  static GraphSurface round_sphere(const Vec3& center, double radius, int L = 24);
};

// Per-node geometric data of a graph surface in the metric g.
struct SurfaceGeometry {
  std::shared_ptr<const SphereRule> rule;
  std::vector<Vec3> position;
  std::vector<Vec3> normal;              // g-unit, outward
  std::vector<double> area_jacobian;     // d mu_g = area_jacobian * (rule weight)
  std::vector<double> mean_curvature;    // H = 2/r on round spheres in flat g
  std::vector<double> normal_speed;      // g(n, nu_g): speed factor of radial variations
  double max_condition = 0;              // induced-metric conditioning
};

SurfaceGeometry surface_geometry(const MetricSpec& spec, const GraphSurface& s);

double area(const MetricSpec& spec, const GraphSurface& s);

// Volume enclosed by the graph, by radial-shell quadrature from the center.
// Radial integrals split at profile support boundaries so every Gauss panel
// sees an analytic integrand.
double enclosed_volume(const MetricSpec& spec, const GraphSurface& s,
                       int n_radial = 48);

// area - 2 r^-1 (1 + m/(2|a|))^-2 vol, on round spheres and on graphs.
double brane_functional(const MetricSpec& spec, const Vec3& a, double r,
                        int L = 24, int n_radial = 48);
double brane_functional(const MetricSpec& spec, const GraphSurface& s,
                        int n_radial = 48);

// Christoffel symbols of g at x from FD of metric_at. gamma[k][i][j].
void christoffel_fd(const MetricSpec& spec, const Vec3& x,
                    double gamma[3][3][3]);

}  // namespace lsr
