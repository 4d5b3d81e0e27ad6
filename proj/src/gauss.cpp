#include "lsr/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lsr {

namespace {

// Legendre P_n and P_n' at x by recurrence.
void legendre(int n, long double x, long double& p, long double& dp) {
  long double p0 = 1.0L, p1 = x;
  if (n == 0) { p = p0; dp = 0.0L; return; }
  for (int k = 2; k <= n; ++k) {
    long double pk = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0L);
}

GaussLegendre build(int n) {
  if (n < 1) throw std::invalid_argument("GaussLegendre: n >= 1 required");
  GaussLegendre r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const long double pi = 3.141592653589793238462643383279502884L;
  for (int i = 0; i < n / 2 + n % 2; ++i) {
    long double x = cosl(pi * (i + 0.75L) / (n + 0.5L));
    long double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      long double dx = p / dp;
      x -= dx;
      if (fabsl(dx) < 1e-19L) break;
    }
    legendre(n, x, p, dp);
    long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    r.nodes[n - 1 - i] = static_cast<double>(x);
    r.weights[n - 1 - i] = static_cast<double>(w);
    r.nodes[i] = static_cast<double>(-x);
    r.weights[i] = static_cast<double>(w);
  }
  return r;
}

}  // namespace

const GaussLegendre& GaussLegendre::unit(int n) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

GaussLegendre GaussLegendre::on_interval(int n, double a, double b) {
  const GaussLegendre& u = unit(n);
  GaussLegendre r;
  r.nodes.resize(n);
  r.weights.resize(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * u.nodes[i];
    r.weights[i] = half * u.weights[i];
  }
  return r;
}

}  // namespace lsr
