// Acceptance gate: each criterion prints one PASS/FAIL line with its measured
// numbers; the exit status is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <string>
#include <vector>

#include "lsr/experiments.hpp"
#include "lsr/quadrature.hpp"

using namespace lsr;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? " [ok]" : " [FAIL]");
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

char buf[512];

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// 1. moment identity suite at degree 48, rel error <= 1e-12, < 5 s
Outcome criterion1() {
  Outcome out;
  auto t0 = Clock::now();
  IdentityReport rep = verify_moment_identities(48, 20240811, {1.0, 2.5}, {3.0, 7.0});
  double dt = seconds_since(t0);
  out.require(rep.results.size() >= 15,
              fmt("%zu identities checked", rep.results.size()));
  out.require(rep.max_rel_error <= 1e-12,
              fmt("max rel error %.3e <= 1e-12", rep.max_rel_error));
  out.require(dt < 5.0, fmt("runtime %.2f s < 5 s", dt));
  return out;
}

// 2. exact radial-variation identity, 5 sigma fields, |fd - rhs| <= 1e-8
Outcome criterion2() {
  Outcome out;
  auto t0 = Clock::now();
  auto trials = radial_identity_check(20240811, 5, {{2.0, 20.0}, {3.0, 50.0}}, 64);
  double worst = 0;
  for (const auto& t : trials)
    worst = std::max(worst, t.abs_diff / std::max(1.0, std::abs(t.rhs)));
  double dt = seconds_since(t0);
  out.require(worst <= 1e-8,
              fmt("worst |fd-rhs|/max(1,|value|) = %.3e <= 1e-8 over %zu trials",
                  worst, trials.size()));
  out.require(dt < 60.0, fmt("runtime %.2f s < 60 s", dt));
  return out;
}

// 3. Schwarzschild constant -8 pi / 35 at lambda = 40
Outcome criterion3() {
  Outcome out;
  auto t0 = Clock::now();
  MetricSpec s2 = MetricSpec::schwarzschild(2.0);
  SolveOptions opt;
  const double target = -8.0 * kPi / 35.0;
  double lambda = 40.0;
  ExpansionReport r8 = predict_lsreduction(s2, {8, 0, 0}, lambda, {}, opt);
  ExpansionReport r16 = predict_lsreduction(s2, {16, 0, 0}, lambda, {}, opt);
  double y8 = (r8.measured - r8.term_sphere) * std::pow(8.0, 6);
  double y16 = (r16.measured - r16.term_sphere) * std::pow(16.0, 6);
  out.require(std::abs(y8 - target) <= 0.20 * std::abs(target),
              fmt("(area-4pil^2)|xi|^6 = %.4f within 20%% of %.4f at |xi|=8",
                  y8, target));
  out.require(std::abs(y16 - target) <= 0.10 * std::abs(target),
              fmt("%.4f within 10%% at |xi|=16", y16));
  double shrink = std::abs(r8.residual) / std::max(std::abs(r16.residual), 1e-300);
  out.require(shrink >= 1.7,
              fmt("residual shrink %.2f >= 1.7 under |xi| doubling", shrink));
  double dt = seconds_since(t0);
  out.require(dt < 600.0, fmt("runtime %.1f s < 600 s", dt));
  return out;
}

// 4. u-estimates at lambda = 40 on a metric with both scaling sources
Outcome criterion4() {
  Outcome out;
  Mat3 M;
  M.m[0][0] = 2.0;
  M.m[1][1] = -2.0;
  auto sig = std::make_shared<RationalSigma>(M, 1.0);
  MetricSpec spec = MetricSpec::general_sigma(2.0, sig, 0.5, "rational");
  SolveOptions opt;
  double lambda = 40.0;
  double lo = 1e300, hi = 0;
  std::vector<double> l2_rel;
  for (double xin : {8.0, 16.0, 32.0}) {
    LSSolution sol = solve_graph(spec, {xin, 0, 0}, lambda, opt);
    double scale = 1.0 / (lambda * xin * xin) + std::pow(xin, -3);
    double ratio = sol.sup_u / scale;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    // degree-2 component against the displayed closed form
    HarmonicField u2 = project(sol.surface.u, Subspace::L2);
    auto got = u2.values();
    const SphereRule& rule = sol.surface.u.basis->rule();
    Vec3 a{lambda * xin, 0, 0};
    double an = a.norm(), r = sol.r;
    double conf = 1.0 + 1.0 / an;
    Mat3 sa = sig->eval(a);
    double tr = sa.trace();
    double worst = 0, amp = 0;
    for (size_t k = 0; k < rule.size(); ++k) {
      Vec3 y = rule.nodes[k] * r;
      double quad =
          (an * an * y.norm2() - 3 * dot(a, y) * dot(a, y)) / std::pow(an, 5);
      double sterm = quad_form(sa, y, y) - y.norm2() / 3.0 * tr;
      double expect =
          -0.5 / r * std::pow(conf, -4) * sterm + 0.5 * r * quad;
      amp = std::max(amp, std::abs(expect));
      worst = std::max(worst, std::abs(got[k] - expect));
    }
    l2_rel.push_back(worst / amp);
  }
  out.require(hi / lo - 1.0 < 0.30,
              fmt("sup|u| scaling constant varies %.1f%% < 30%% over |xi|=8,16,32",
                  100.0 * (hi / lo - 1.0)));
  bool shrinking = l2_rel[1] <= 0.75 * l2_rel[0] && l2_rel[2] <= 0.75 * l2_rel[1];
  out.require(shrinking, fmt("L2 closed-form relative residual %.3f -> %.3f -> "
                             "%.3f falls one order in |xi|",
                             l2_rel[0], l2_rel[1], l2_rel[2]));
  return out;
}

// 5. order-5 pulsed metric at k = 1: clauses as stated
Outcome criterion5() {
  Outcome out;
  auto t0 = Clock::now();
  const int k = 1;
  const double lambda = 10.0;
  MetricSpec spec = MetricSpec::builtin("thm17");
  SolveOptions opt;
  auto deriv = [&](double t) {
    return reduced_area_radial_derivative(spec, {10.0 * t, 0, 0}, lambda, opt);
  };
  RadialDerivative d5 = deriv(5.0);
  RadialDerivative d7 = deriv(7.0);
  double lead5 = -(2.0 * kPi / 15.0) * std::pow(10.0, -6.0 * k);
  double lead7 = (48.0 * kPi / 35.0) * std::pow(10.0, -7.0 * k) * std::pow(7.0, -6);
  out.require(d5.value < 0.0, fmt("fd derivative at t=5 is %.4e (< 0 required)",
                                  d5.value));
  double m5 = std::abs(d5.value) / std::abs(lead5);
  out.require(m5 >= 1.0 / 3 && m5 <= 3.0,
              fmt("magnitude ratio to -(2pi/15)10^-6k is %.2f (within 3x)", m5));
  out.require(d7.value > 0.0, fmt("fd derivative at t=7 is %.4e (> 0 required)",
                                  d7.value));
  double m7 = std::abs(d7.value) / std::abs(lead7);
  out.require(m7 >= 1.0 / 3 && m7 <= 3.0,
              fmt("magnitude ratio to (48pi/35)10^-7k 7^-6 is %.2f (within 3x)", m7));
  // bisection inside (5, 7) as stated
  bool bracket = d5.value < 0 && d7.value > 0;
  double t_star = 0;
  if (bracket) {
    double lo = 5.0, hi = 7.0, flo = d5.value;
    for (int it = 0; it < 60 && hi - lo > 1e-3; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = deriv(mid).value;
      if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
      else hi = mid;
    }
    t_star = 0.5 * (lo + hi);
  }
  out.require(bracket && t_star > 5.0 && t_star < 7.0,
              bracket ? fmt("bisected t* = %.4f in (5,7)", t_star)
                      : std::string("no sign change bracketed in (5,7)"));
  if (bracket) {
    LSSolution cen = solve_graph(spec, {10.0 * t_star, 0, 0}, lambda, opt);
    double dt = 0.02;
    double ap = solve_graph(spec, {10.0 * (t_star + dt), 0, 0}, lambda, opt, &cen).area;
    double am = solve_graph(spec, {10.0 * (t_star - dt), 0, 0}, lambda, opt, &cen).area;
    double second = (ap - 2 * cen.area + am) / (dt * dt);
    out.require(second > 0.0, fmt("radial second difference %.3e > 0", second));
  } else {
    out.require(false, "radial second difference unavailable without t*");
  }
  // context: where the functional actually has its stable point
  ScanOptions sopt;
  sopt.solve = opt;
  sopt.points_per_unit = 2.0;
  ScanResult scan = run_thm17(k, sopt);
  if (scan.t_star)
    out.note(fmt("measured stable critical point at t = %.4f "
                 "(lsradial evaluated on this metric matches the fd data)",
                 *scan.t_star));
  double dt = seconds_since(t0);
  out.require(dt < 1800.0, fmt("runtime %.1f s < 1800 s", dt));
  return out;
}

// 6. order-4 pulsed metric at j = 1 with the doubling-search amplitude
Outcome criterion6() {
  Outcome out;
  ScanOptions sopt;
  sopt.points_per_unit = 2.0;
  ScanResult res = run_thm13(-1.0, 1, sopt);
  out.note(fmt("A = %.1f", res.A_used));
  MetricSpec spec = MetricSpec::radial_conformal(
      2.0, pulse_S_thm13(res.A_used, 8), 2.0, "thm13");
  SolveOptions opt = sopt.solve;
  double t_in = 2.0 * std::sqrt(2.0);
  RadialDerivative din =
      reduced_area_radial_derivative(spec, {t_in, 0, 0}, 10.0, opt);
  RadialDerivative dout =
      reduced_area_radial_derivative(spec, {5.0, 0, 0}, 10.0, opt);
  out.require(din.value < 0.0,
              fmt("derivative %.3e < 0 at t = 2sqrt2", din.value));
  out.require(dout.value > 0.0, fmt("derivative %.3e > 0 at t = 5", dout.value));
  out.require(res.t_star && *res.t_star > t_in && *res.t_star < 5.0,
              res.t_star ? fmt("minimum at t* = %.4f in (2sqrt2, 5)", *res.t_star)
                         : std::string("no minimum located"));
  // scalar curvature non-negative on a log grid outside the compact core
  double worstR = 0;
  for (int i = 0; i < 200; ++i) {
    double r = 2.0 * std::pow(1e5 / 2.0, i / 199.0);
    worstR = std::min(worstR, scalar_curvature(spec, {r, 0, 0}));
  }
  out.require(worstR >= 0.0, fmt("min R on log grid = %.3e >= 0", worstR));
  return out;
}

// 7. coefficient fit on exact Schwarzschild
Outcome criterion7() {
  Outcome out;
  auto t0 = Clock::now();
  MetricSpec s2 = MetricSpec::schwarzschild(2.0);
  SolveOptions opt;
  BEFitResult fit = fit_BE_coefficient(s2, {2, 3, 5}, {20, 40, 80, 160}, opt);
  double lo = 1e300, hi = -1e300;
  for (double c : fit.c_F0_per_xi) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  double mean = 0.5 * (lo + hi);
  out.require(std::abs(hi - mean) <= 0.05 * std::abs(mean) &&
                  std::abs(lo - mean) <= 0.05 * std::abs(mean),
              fmt("c_F0 per |xi| in [%.4f, %.4f]: stable to +-5%%", lo, hi));
  bool mono = true;
  for (size_t j = 0; j + 1 < fit.residual_by_lambda.size(); ++j)
    mono = mono && fit.residual_by_lambda[j + 1] < fit.residual_by_lambda[j];
  out.require(mono, "fit residuals shrink monotonically in lambda");
  out.note(fmt("data supports c_F0 = %s (joint fit %.4f; 2pi = %.4f, pi/2 = %.4f)",
               fit.supported_constant.c_str(), fit.c_F0, 2 * kPi, kPi / 2));
  double dt = seconds_since(t0);
  out.note(fmt("runtime %.1f s", dt));
  return out;
}

// 8. geometry pipeline
Outcome criterion8() {
  Outcome out;
  MetricSpec s2 = MetricSpec::schwarzschild(2.0);
  // first variation on 5 random band-limited perturbations
  std::mt19937_64 rng(20240811);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec3 a{35, 0, 0};
  double r = 4.0;
  auto basis = HarmonicBasis::get(12);
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    GraphSurface s = GraphSurface::round_sphere(a, r, 12);
    std::vector<double> v(basis->n_coef(), 0.0);
    for (int j = 0; j < basis->n_coef(); ++j)
      if (basis->l_of(j) <= 6) v[j] = 0.02 * nd(rng);
    auto area_at = [&](double t) {
      GraphSurface st = s;
      for (size_t j = 0; j < st.u.coefs.size(); ++j) st.u.coefs[j] += t * v[j];
      return area(s2, st);
    };
    double h = 1e-3;
    double fd = richardson((area_at(h) - area_at(-h)) / (2 * h),
                           (area_at(h / 2) - area_at(-h / 2)) / h);
    SurfaceGeometry geo = surface_geometry(s2, s);
    HarmonicField vf{basis, v};
    auto vv = vf.values();
    Kahan<double> acc;
    for (size_t k = 0; k < geo.rule->size(); ++k)
      acc.add(geo.rule->weights[k] * geo.area_jacobian[k] *
              geo.mean_curvature[k] * vv[k] * geo.normal_speed[k]);
    worst = std::max(worst, std::abs(fd - acc.get()) / std::abs(acc.get()));
  }
  out.require(worst <= 1e-6,
              fmt("first-variation identity worst rel error %.2e <= 1e-6", worst));
  // H constancy on centered round spheres
  double dev = 0;
  for (double rr : {3.0, 10.0}) {
    GraphSurface s = GraphSurface::round_sphere({0, 0, 0}, rr, 12);
    SurfaceGeometry geo = surface_geometry(s2, s);
    double lo = 1e300, hi = -1e300;
    for (double H : geo.mean_curvature) {
      lo = std::min(lo, H);
      hi = std::max(hi, H);
    }
    dev = std::max(dev, (hi - lo) / (2.0 / rr));
  }
  out.require(dev <= 1e-10, fmt("H spread on round spheres %.2e <= 1e-10", dev));
  // flat CMC solve
  MetricSpec flat = MetricSpec::flat();
  LSSolution sol = solve_graph(flat, {3, 0, 0}, 10.0);
  double area_err = std::abs(sol.area - 4 * kPi * 100) / (4 * kPi * 100);
  out.require(sol.sup_u <= 1e-12 && area_err <= 1e-10,
              fmt("flat solve: sup|u| = %.2e, area rel err %.2e", sol.sup_u,
                  area_err));
  return out;
}

// 9. scalar curvature cross-check
Outcome criterion9() {
  Outcome out;
  auto prof = std::make_shared<RadialProfile>(
      [](double rho) { return rho >= 1.0 ? -std::pow(rho, -5) : 0.0; },
      std::vector<Interval>{{1.0, std::numeric_limits<double>::infinity()}}, 5);
  MetricSpec conf = MetricSpec::radial_conformal(2.0, prof, 1.0, "tail5");
  MetricSpec as_sigma = MetricSpec::general_sigma(
      2.0, conformal_difference_sigma(conf), 1.0, "tail5-as-sigma");
  double worst = 0;
  for (double r : {5.0, 20.0, 100.0}) {
    Vec3 x{0.6 * r, 0.64 * r, 0.48 * r};
    double closed = scalar_curvature(conf, x);
    double fd = scalar_curvature(as_sigma, x);
    worst = std::max(worst, std::abs(fd - closed) / std::abs(closed));
  }
  out.require(worst <= 1e-6,
              fmt("closed vs FD curvature worst rel error %.2e <= 1e-6", worst));
  MetricSpec s2 = MetricSpec::schwarzschild(2.0);
  double worstR = 0;
  for (double r : {5.0, 20.0, 100.0})
    worstR = std::max(worstR, std::abs(scalar_curvature_fd(s2, {0, r, 0})));
  out.require(worstR <= 1e-8,
              fmt("|R_fd| on exact Schwarzschild %.2e <= 1e-8", worstR));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Outcome (*criteria[])() = {criterion1, criterion2, criterion3,
                             criterion4, criterion5, criterion6,
                             criterion7, criterion8, criterion9};
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (int i = 1; i <= 9; ++i) {
    if (only != 0 && i != only) continue;
    Outcome out;
    try {
      out = criteria[i - 1]();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d: %s — %s\n", i, out.pass ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
