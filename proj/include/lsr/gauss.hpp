#pragma once

#include <vector>

namespace lsr {

// Gauss-Legendre rule. Nodes computed by Newton iteration on the Legendre
// recurrence in long double; exact for polynomials of degree <= 2n-1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussLegendre& unit(int n);  // cached, on [-1, 1]
  static GaussLegendre on_interval(int n, double a, double b);
};

}  // namespace lsr
