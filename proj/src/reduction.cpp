#include "lsr/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "lsr/errors.hpp"
#include "lsr/quadrature.hpp"

namespace lsr {

namespace {

// Volume root-find in r at fixed u: secant polished to machine precision,
// bracketed by bisection if it wanders.
double solve_radius(const MetricSpec& spec, GraphSurface& s, double lambda,
                    double target, int n_radial, double r_guess) {
  double blo = 0.80 * r_guess, bhi = 1.25 * r_guess;
  auto vol = [&](double r) {
    s.radius = r;
    return enclosed_volume(spec, s, n_radial) - target;
  };
  double r0 = r_guess, r1 = r_guess * (1.0 + 1e-4);
  double f0 = vol(r0), f1 = vol(r1);
  for (int it = 0; it < 80; ++it) {
    if (f1 == f0) break;
    double r2 = r1 - f1 * (r1 - r0) / (f1 - f0);
    if (!(r2 > blo && r2 < bhi)) r2 = 0.5 * (r0 + r1);
    r0 = r1; f0 = f1;
    r1 = r2; f1 = vol(r1);
    if (std::abs(f1) <= 4e-16 * target || std::abs(r1 - r0) <= 4e-16 * r1) break;
  }
  // fall back to bisection if the secant failed to converge
  if (std::abs(f1) > 1e-12 * target) {
    double lo = blo, hi = bhi;
    double flo = vol(lo);
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = vol(mid);
      if ((flo < 0) == (fm < 0)) { lo = mid; flo = fm; }
      else hi = mid;
      if (hi - lo < 1e-16 * hi) break;
    }
    r1 = 0.5 * (lo + hi);
    f1 = vol(r1);
  }
  s.radius = r1;
  return f1;  // residual volume error (absolute)
}

void scaled_sup_norms(const GraphSurface& s, LSSolution& sol) {
  const HarmonicBasis& basis = *s.u.basis;
  const SphereRule& rule = basis.rule();
  std::vector<double> u, ut, up, utt, utp, upp;
  basis.synthesize_with_derivs(s.u.coefs, u, ut, up, utt, utp, upp);
  double su = 0, sg = 0, sh = 0;
  double r = s.radius;
  for (size_t k = 0; k < rule.size(); ++k) {
    double st = rule.sin_theta[k], ct = rule.cos_theta[k];
    su = std::max(su, std::abs(u[k]));
    double grad2 = (ut[k] * ut[k] + up[k] * up[k] / (st * st)) / (r * r);
    sg = std::max(sg, std::sqrt(grad2));
    // covariant Hessian components in the round metric on S_r
    double h_tt = utt[k];
    double h_tp = utp[k] - ct / st * up[k];
    double h_pp = upp[k] + st * ct * ut[k];
    double n2 = h_tt * h_tt + 2.0 * std::pow(h_tp / st, 2) +
                std::pow(h_pp / (st * st), 2);
    sh = std::max(sh, std::sqrt(n2) / (r * r));
  }
  sol.sup_u = su;
  sol.sup_grad_u = sg;
  sol.sup_hess_u = sh;
}

}  // namespace

LSSolution solve_graph(const MetricSpec& spec, const Vec3& xi, double lambda,
                       const SolveOptions& opt, const LSSolution* warm_start) {
  Vec3 a = xi * lambda;
  double an = a.norm();
  double conf_a = 1.0 + spec.mass / (2.0 * std::max(an, 1e-300));
  if (spec.kind == MetricKind::Flat) conf_a = 1.0;
  double target = 4.0 * kPi / 3.0 * lambda * lambda * lambda;

  auto basis = HarmonicBasis::get(opt.L);
  GraphSurface s;
  s.center = a;
  s.u.basis = basis;
  if (warm_start && warm_start->surface.u.basis == basis) {
    s.u.coefs = warm_start->surface.u.coefs;
    s.radius = warm_start->r;
  } else {
    s.u.coefs.assign(basis->n_coef(), 0.0);
    s.radius = lambda / (conf_a * conf_a);
  }

  double tol_H = opt.tol_H_factor / lambda;
  double resid = std::numeric_limits<double>::infinity();
  double vol_err = std::numeric_limits<double>::infinity();
  double prev_resid = std::numeric_limits<double>::infinity();
  int stalled = 0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    double vres = solve_radius(spec, s, lambda, target, opt.n_radial, s.radius);
    vol_err = std::abs(vres) / target;
    SurfaceGeometry geo = surface_geometry(spec, s);
    HarmonicField ch = analyze(basis, geo.mean_curvature);
    HarmonicField high = project(ch, Subspace::GT1);
    resid = high.sup_norm();
    if (resid <= tol_H && vol_err <= opt.tol_V) break;
    // stalled at the FD noise floor slightly above tolerance
    stalled = (resid >= 0.5 * prev_resid) ? stalled + 1 : 0;
    if (stalled >= 3 && resid <= 8.0 * tol_H && vol_err <= opt.tol_V) break;
    prev_resid = resid;
    for (auto& c : high.coefs) c *= conf_a * conf_a;
    HarmonicField du = invert_jacobi(high, s.radius);
    for (size_t j = 0; j < s.u.coefs.size(); ++j) s.u.coefs[j] += du.coefs[j];
    for (size_t j = 0; j < s.u.coefs.size(); ++j)
      if (basis->l_of(static_cast<int>(j)) <= 1) s.u.coefs[j] = 0.0;
  }
  if (resid > 8.0 * tol_H || vol_err > opt.tol_V)
    throw SolverDivergence("solve_graph: residuals above tolerance after max_iter");

  LSSolution sol;
  sol.xi = xi;
  sol.lambda = lambda;
  sol.r = s.radius;
  sol.area = area(spec, s);
  sol.H_residual = resid;
  sol.volume_error = vol_err;
  sol.iterations = it;
  scaled_sup_norms(s, sol);
  sol.surface = std::move(s);
  return sol;
}

double reduced_area(const MetricSpec& spec, const Vec3& xi, double lambda,
                    const SolveOptions& opt) {
  return solve_graph(spec, xi, lambda, opt).area;
}

RadialDerivative reduced_area_radial_derivative(const MetricSpec& spec,
                                                const Vec3& xi, double lambda,
                                                const SolveOptions& opt,
                                                double rel_step) {
  LSSolution center = solve_graph(spec, xi, lambda, opt);
  double noise = 64.0 * std::numeric_limits<double>::epsilon() * center.area;
  double ds = rel_step;
  RadialDerivative out;
  for (int attempt = 0; attempt < 4; ++attempt) {
    auto at = [&](double scale) {
      return solve_graph(spec, xi * scale, lambda, opt, &center).area;
    };
    double ap = at(1.0 + ds), am = at(1.0 - ds);
    double ap2 = at(1.0 + ds / 2), am2 = at(1.0 - ds / 2);
    double d_h = (ap - am) / (2.0 * ds);
    double d_h2 = (ap2 - am2) / ds;
    out.value = richardson(d_h, d_h2);
    out.noise = noise / (2.0 * ds);
    out.step_used = ds;
    if (std::abs(ap - am) > 32.0 * noise || ds > 0.05) break;
    ds *= 8.0;  // derivative below the roundoff floor: widen the stencil
  }
  return out;
}

// ---------------------------------------------------------------------------
// F0

namespace {

// F0(t) = -8 sum_{n>=3} (n-1)(n-2) / ((n+1)(2n-1)(2n+1)) t^(-2n);
// the closed form cancels catastrophically for large t.
long double F0_series(long double t, int dmax = 400) {
  long double x = 1.0L / (t * t), xn = x * x * x, s = 0.0L;
  for (int n = 3; n <= dmax; ++n) {
    long double c = -8.0L * (n - 1.0L) * (n - 2.0L) /
                    ((n + 1.0L) * (2.0L * n - 1.0L) * (2.0L * n + 1.0L));
    long double term = c * xn;
    s += term;
    if (fabsl(term) < 1e-24L * fabsl(s)) break;
    xn *= x;
  }
  return s;
}

long double F0_prime_series(long double t, int dmax = 400) {
  long double x = 1.0L / (t * t), xn = x * x * x, s = 0.0L;
  for (int n = 3; n <= dmax; ++n) {
    long double c = -8.0L * (n - 1.0L) * (n - 2.0L) /
                    ((n + 1.0L) * (2.0L * n - 1.0L) * (2.0L * n + 1.0L));
    long double term = -2.0L * n * c * xn / t;
    s += term;
    if (fabsl(term) < 1e-24L * fabsl(s)) break;
    xn *= x;
  }
  return s;
}

}  // namespace

double F0(double t) {
  if (!(t > 1.0)) throw ChartDomainError("F0: t > 1 required");
  if (t >= 2.5) return static_cast<double>(F0_series(t));
  long double T = t;
  return static_cast<double>(-14.0L + 16.0L * T * T * logl((T * T - 1.0L) / (T * T)) +
                             (15.0L * T - 1.0L / T) * logl((T + 1.0L) / (T - 1.0L)));
}

double F0_prime(double t) {
  if (!(t > 1.0)) throw ChartDomainError("F0_prime: t > 1 required");
  if (t >= 2.5) return static_cast<double>(F0_prime_series(t));
  long double T = t;
  long double term1 = 32.0L * T * logl(1.0L - 1.0L / (T * T)) + 32.0L * T / (T * T - 1.0L);
  long double L = 0.5L * logl((T + 1.0L) / (T - 1.0L));  // artanh(1/t)
  long double term2 = 2.0L * (15.0L + 1.0L / (T * T)) * L -
                      2.0L * (15.0L * T * T - 1.0L) / (T * (T * T - 1.0L));
  return static_cast<double>(term1 + term2);
}

// ---------------------------------------------------------------------------
// sigma functionals

namespace {

std::shared_ptr<const SigmaField> sigma_of(const MetricSpec& spec) {
  if (spec.kind == MetricKind::GeneralSigma) return spec.sigma;
  return conformal_difference_sigma(spec);
}

}  // namespace

double F_sigma(const MetricSpec& spec, const Vec3& xi, double lambda,
               int degree) {
  auto sig = sigma_of(spec);
  Vec3 a = xi * lambda;
  auto sph = SphereRule::product_gauss(degree);
  BallRule ball = BallRule::product_gauss(sph, degree / 2 + 2);
  // surface term needs the sphere normal: integrate with the node available
  std::vector<double> buf(sph->size());
  parallel_for_except(sph->size(), [&](size_t k) {
    Vec3 n = sph->nodes[k];
    Mat3 sg = sig->eval(a + n * lambda);
    double tr_s = sg.trace() - quad_form(sg, n, n);
    buf[k] = sph->weights[k] * lambda * lambda * tr_s;
  });
  Kahan<double> surf;
  for (double v : buf) surf.add(v);
  double ball_tr = integrate_ball(
      [&](const Vec3& x) { return sig->eval(x).trace(); }, a, lambda, ball);
  return 0.5 * surf.get() - ball_tr / lambda;
}

double radial_variation_rhs(const MetricSpec& spec, const Vec3& xi,
                            double lambda, int degree) {
  auto sig = sigma_of(spec);
  if (sig->derivative_order() < 2)
    throw std::invalid_argument(
        "radial_variation_rhs: sigma must provide two derivatives");
  Vec3 a = xi * lambda;
  BallRule ball = BallRule::product_gauss(degree);
  auto div_w = [&](const Vec3& x) {
    // Div W = d_i d_j sigma_ij - Lap tr sigma
    double didj = 0, lap = 0;
    for (int i = 0; i < 3; ++i) {
      int Ii[3] = {0, 0, 0};
      Ii[i] = 2;
      Mat3 dii = sig->eval(x, Ii[0], Ii[1], Ii[2]);
      lap += dii.trace();
      didj += dii.m[i][i];
      for (int j = i + 1; j < 3; ++j) {
        int Ij[3] = {0, 0, 0};
        Ij[i] += 1;
        Ij[j] += 1;
        Mat3 dij = sig->eval(x, Ij[0], Ij[1], Ij[2]);
        didj += 2.0 * dij.m[i][j];
      }
    }
    return didj - lap;
  };
  return 0.5 * integrate_ball(
                   [&](const Vec3& x) {
                     return div_w(x) * dot(xi, a - x);
                   },
                   a, lambda, ball);
}

// ---------------------------------------------------------------------------
// expansion predictors

ExpansionReport predict_lsreduction(const MetricSpec& spec, const Vec3& xi,
                                    double lambda,
                                    std::optional<double> measured,
                                    const SolveOptions& opt) {
  ExpansionReport rep;
  rep.lambda = lambda;
  rep.xi_norm = xi.norm();
  Vec3 x = xi * lambda;
  double R = scalar_curvature(spec, x);
  double lapR = laplacian_scalar_curvature(spec, x);
  rep.term_sphere = 4.0 * kPi * lambda * lambda;
  rep.term_R = -2.0 * kPi / 15.0 * std::pow(lambda, 4) * R;
  rep.term_lap_R = -kPi / 105.0 * std::pow(lambda, 6) * lapR;
  rep.term_xi6 = -8.0 * kPi / 35.0 * std::pow(rep.xi_norm, -6);
  rep.predicted = rep.term_sphere + rep.term_R + rep.term_lap_R + rep.term_xi6;
  rep.measured = measured ? *measured : reduced_area(spec, xi, lambda, opt);
  rep.residual = rep.measured - rep.predicted;
  return rep;
}

double predict_lsradial(const MetricSpec& spec, const Vec3& xi, double lambda) {
  Vec3 x = xi * lambda;
  double xin = xi.norm();
  double drR = radial_derivative_R(spec, x);
  double drLapR = radial_derivative_laplacian_R(spec, x);
  return kPi / 105.0 *
         (-14.0 * std::pow(lambda, 5) * xin * drR -
          std::pow(lambda, 7) * xin * drLapR + 144.0 * std::pow(xin, -6));
}

// ---------------------------------------------------------------------------
// BE-coefficient fit

BEFitResult fit_BE_coefficient(const MetricSpec& spec,
                               const std::vector<double>& xi_values,
                               const std::vector<double>& lambda_values,
                               const SolveOptions& opt) {
  BEFitResult res;
  res.xi_values = xi_values;
  res.lambda_values = lambda_values;
  size_t nx = xi_values.size(), nl = lambda_values.size();
  res.samples.assign(nx, std::vector<double>(nl, 0.0));
  std::vector<std::vector<double>> fsig(nx, std::vector<double>(nl, 0.0));
  bool sigma_identifiable = false;
  for (size_t i = 0; i < nx; ++i)
    for (size_t j = 0; j < nl; ++j) {
      Vec3 xi{xi_values[i], 0, 0};
      double lam = lambda_values[j];
      res.samples[i][j] = reduced_area(spec, xi, lam, opt) -
                          4.0 * kPi * lam * lam;
      double fs = (spec.kind == MetricKind::GeneralSigma ||
                   spec.kind == MetricKind::RadialConformal)
                      ? F_sigma(spec, xi, lam)
                      : 0.0;
      fsig[i][j] = fs;
      if (std::abs(fs) > 1e-13) sigma_identifiable = true;
    }

  // joint least squares on regressors {F0, [F_sigma], 1}, columns scaled to
  // unit norm so the conditioning reflects collinearity rather than units
  int np = sigma_identifiable ? 3 : 2;
  std::vector<std::array<double, 3>> rows;
  std::vector<double> ys;
  for (size_t i = 0; i < nx; ++i)
    for (size_t j = 0; j < nl; ++j) {
      std::array<double, 3> reg{F0(xi_values[i]),
                                sigma_identifiable ? fsig[i][j] : 1.0, 1.0};
      if (!sigma_identifiable) reg[1] = 1.0;
      rows.push_back(reg);
      ys.push_back(res.samples[i][j]);
    }
  double colnorm[3] = {0, 0, 0};
  for (const auto& rr : rows)
    for (int p = 0; p < np; ++p) colnorm[p] += rr[p] * rr[p];
  for (int p = 0; p < np; ++p) colnorm[p] = std::sqrt(std::max(colnorm[p], 1e-300));
  double ata[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double atb[3] = {0, 0, 0};
  for (size_t s = 0; s < rows.size(); ++s)
    for (int p = 0; p < np; ++p) {
      for (int q = 0; q < np; ++q)
        ata[p][q] += rows[s][p] / colnorm[p] * rows[s][q] / colnorm[q];
      atb[p] += rows[s][p] / colnorm[p] * ys[s];
    }
  Mat3 A;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      A.m[p][q] = (p < np && q < np) ? ata[p][q] : (p == q ? 1.0 : 0.0);
  auto eig = sym_eigenvalues(A);
  res.condition_number =
      std::sqrt(std::abs(eig[2]) / std::max(std::abs(eig[0]), 1e-300));
  res.ill_conditioned = res.condition_number > 1e6;
  Mat3 Ai = A.inverse();
  Vec3 b{atb[0], atb[1], atb[2]};
  Vec3 scaled = Ai * b;
  Vec3 sol{scaled[0] / colnorm[0], scaled[1] / colnorm[1], scaled[2] / colnorm[2]};
  res.c_F0 = sol[0];
  if (sigma_identifiable) res.c_Fsigma = sol[1];

  // residuals by lambda against the joint fit
  res.residual_by_lambda.assign(nl, 0.0);
  for (size_t j = 0; j < nl; ++j) {
    double worst = 0;
    for (size_t i = 0; i < nx; ++i) {
      double model = res.c_F0 * F0(xi_values[i]) +
                     (sigma_identifiable ? *res.c_Fsigma * fsig[i][j] : 0.0) +
                     sol[np - 1];
      worst = std::max(worst, std::abs(res.samples[i][j] - model));
    }
    res.residual_by_lambda[j] = worst;
  }

  // per-|xi| extrapolation: fit y = y_inf + b/lambda + c/lambda^2 through the
  // last three lambda values
  res.c_F0_per_xi.resize(nx);
  for (size_t i = 0; i < nx; ++i) {
    double yinf;
    if (nl >= 3) {
      size_t j0 = nl - 3;
      double l0 = lambda_values[j0], l1 = lambda_values[j0 + 1],
             l2 = lambda_values[j0 + 2];
      Mat3 M;
      M.m[0][0] = 1; M.m[0][1] = 1 / l0; M.m[0][2] = 1 / (l0 * l0);
      M.m[1][0] = 1; M.m[1][1] = 1 / l1; M.m[1][2] = 1 / (l1 * l1);
      M.m[2][0] = 1; M.m[2][1] = 1 / l2; M.m[2][2] = 1 / (l2 * l2);
      Vec3 yv{res.samples[i][j0], res.samples[i][j0 + 1], res.samples[i][j0 + 2]};
      yinf = (M.inverse() * yv)[0];
    } else {
      yinf = res.samples[i][nl - 1];
    }
    double fs_limit = 0.0;
    if (sigma_identifiable) {
      // F_sigma is lambda-dependent in general; subtract its fitted share at
      // the largest lambda as the best finite proxy
      fs_limit = *res.c_Fsigma * fsig[i][nl - 1];
    }
    res.c_F0_per_xi[i] = (yinf - fs_limit) / F0(xi_values[i]);
  }
  double lo = res.c_F0_per_xi[0], hi = res.c_F0_per_xi[0];
  for (double c : res.c_F0_per_xi) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  res.spread = std::abs(hi / lo - 1.0);
  double med = res.c_F0_per_xi[res.c_F0_per_xi.size() / 2];
  res.supported_constant =
      (std::abs(med - 2.0 * kPi) < std::abs(med - kPi / 2.0)) ? "2pi" : "pi/2";
  return res;
}

// ---------------------------------------------------------------------------
// truncated curvature diagnostic

double scalar_curvature_truncated(const MetricSpec& spec, const Vec3& x) {
  auto sig = sigma_of(spec);
  if (sig->derivative_order() < 2)
    throw std::invalid_argument(
        "scalar_curvature_truncated: sigma must provide two derivatives");
  double r = x.norm();
  double divdiv = 0, lap_tr = 0;
  Vec3 grad_tr{0, 0, 0};
  Vec3 div_at_x{0, 0, 0};
  Mat3 s0 = sig->eval(x);
  for (int i = 0; i < 3; ++i) {
    int I2[3] = {0, 0, 0};
    I2[i] = 2;
    Mat3 dii = sig->eval(x, I2[0], I2[1], I2[2]);
    lap_tr += dii.trace();
    divdiv += dii.m[i][i];
    for (int j = i + 1; j < 3; ++j) {
      int I1[3] = {0, 0, 0};
      I1[i] += 1;
      I1[j] += 1;
      Mat3 dij = sig->eval(x, I1[0], I1[1], I1[2]);
      divdiv += 2.0 * dij.m[i][j];
    }
    int Ii[3] = {0, 0, 0};
    Ii[i] = 1;
    Mat3 di = sig->eval(x, Ii[0], Ii[1], Ii[2]);
    grad_tr[i] = di.trace();
    for (int j = 0; j < 3; ++j) div_at_x[j] += di.m[i][j];
  }
  double conf = 1.0 + spec.mass / (2.0 * r);
  double c8 = std::pow(conf, -8);
  double r3 = r * r * r, r5 = r3 * r * r;
  return c8 * (divdiv - lap_tr) -
         4.0 / r3 * (s0.trace() - 3.0 / (r * r) * quad_form(s0, x, x)) -
         4.0 / r3 * dot(x, grad_tr);
}

std::shared_ptr<SigmaField> random_smooth_sigma(std::mt19937_64& rng,
                                                const Vec3& around, double scale,
                                                int n_terms) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.25, 0.45);
  std::vector<GaussianSigma::Term> terms;
  for (int q = 0; q < n_terms; ++q) {
    GaussianSigma::Term t;
    t.amplitude = random_symmetric(rng);
    t.center = around + Vec3{nd(rng), nd(rng), nd(rng)} * (0.5 * scale);
    t.width = ud(rng) * scale;
    terms.push_back(t);
  }
  return std::make_shared<GaussianSigma>(std::move(terms));
}

std::vector<IdentityTrial> radial_identity_check(
    std::uint64_t seed, int n_trials,
    const std::vector<std::pair<double, double>>& xi_lambda, int degree) {
  std::mt19937_64 rng(seed);
  std::vector<IdentityTrial> out;
  for (const auto& [xin, lambda] : xi_lambda) {
    Vec3 xi{xin, 0, 0};
    for (int trial = 0; trial < n_trials; ++trial) {
      auto sigma = random_smooth_sigma(rng, xi * lambda, lambda);
      MetricSpec spec = MetricSpec::general_sigma(2.0, sigma, 0.25, "random");
      auto F = [&](double s) { return F_sigma(spec, xi * s, lambda, degree); };
      const double ds = 1e-4;
      double d_h = (F(1.0 + ds) - F(1.0 - ds)) / (2.0 * ds);
      double d_h2 = (F(1.0 + ds / 2) - F(1.0 - ds / 2)) / ds;
      IdentityTrial t;
      t.xi_norm = xin;
      t.lambda = lambda;
      t.fd = richardson(d_h, d_h2);
      t.rhs = radial_variation_rhs(spec, xi, lambda, degree);
      t.abs_diff = std::abs(t.fd - t.rhs);
      t.tolerance = 1e-8 * std::max(1.0, std::abs(t.rhs));
      out.push_back(t);
    }
  }
  return out;
}

Mat3 reduced_area_hessian(const MetricSpec& spec, const Vec3& xi, double lambda,
                          const SolveOptions& opt, double rel_step) {
  double h = rel_step * xi.norm();
  LSSolution center = solve_graph(spec, xi, lambda, opt);
  auto at = [&](const Vec3& p) {
    return solve_graph(spec, p, lambda, opt, &center).area;
  };
  double f0 = center.area;
  Mat3 H;
  for (int i = 0; i < 3; ++i) {
    Vec3 ei{0, 0, 0};
    ei[i] = h;
    H.m[i][i] = (at(xi + ei) - 2 * f0 + at(xi - ei)) / (h * h);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Vec3 ei{0, 0, 0}, ej{0, 0, 0};
      ei[i] = h;
      ej[j] = h;
      double v = (at(xi + ei + ej) - at(xi + ei - ej) - at(xi - ei + ej) +
                  at(xi - ei - ej)) /
                 (4 * h * h);
      H.m[i][j] = H.m[j][i] = v;
    }
  return H;
}

}  // namespace lsr
