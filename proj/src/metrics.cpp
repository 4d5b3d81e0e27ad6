#include "lsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsr/gauss.hpp"

namespace lsr {

namespace {

// physicists' Hermite H_n, n <= 4
double hermite(int n, double v) {
  switch (n) {
    case 0: return 1.0;
    case 1: return 2.0 * v;
    case 2: return 4.0 * v * v - 2.0;
    case 3: return 8.0 * v * v * v - 12.0 * v;
    case 4: return ((16.0 * v * v - 48.0) * v * v + 12.0);
    default: throw std::invalid_argument("hermite: order > 4");
  }
}

double mat_max_abs(const Mat3& a) {
  double m = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a.m[i][j]));
  return m;
}

// Max over a log radial grid and a few directions of |d^I sigma| * r^(2+|I|),
// with a margin. These are the field's published decay constants.
std::array<double, 5> sample_decay_constants(const SigmaField& f, double r_lo,
                                             double r_hi) {
  std::array<double, 5> c{};
  const Vec3 dirs[6] = {{1, 0, 0},  {0, 1, 0},          {0, 0, 1},
                        {-1, 0, 0}, {0.6, 0.48, 0.64},  {-0.6, 0.64, -0.48}};
  for (int order = 0; order <= f.derivative_order(); ++order) {
    double best = 0;
    for (int i = 0; i < 64; ++i) {
      double r = r_lo * std::pow(r_hi / r_lo, i / 63.0);
      for (const Vec3& d : dirs) {
        Vec3 x = d * (r / d.norm());
        for (int ix = 0; ix <= order; ++ix)
          for (int iy = 0; ix + iy <= order; ++iy) {
            int iz = order - ix - iy;
            best = std::max(best, mat_max_abs(f.eval(x, ix, iy, iz)) *
                                      std::pow(r, 2.0 + order));
          }
      }
    }
    c[order] = 2.0 * best + 1e-300;
  }
  for (int order = f.derivative_order() + 1; order <= 4; ++order) c[order] = 0;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianSigma

GaussianSigma::GaussianSigma(std::vector<Term> terms) : terms_(std::move(terms)) {}

Mat3 GaussianSigma::eval(const Vec3& x, int ix, int iy, int iz) const {
  if (ix + iy + iz > 4) throw std::invalid_argument("GaussianSigma: |I| > 4");
  Mat3 out;
  for (const Term& t : terms_) {
    Vec3 d = x - t.center;
    double q = d.norm2() / (t.width * t.width);
    if (q > 576.0) continue;  // below 1e-250: outside the support
    double e = std::exp(-q);
    double w = t.width;
    double fac = e;
    const int ord[3] = {ix, iy, iz};
    for (int k = 0; k < 3; ++k) {
      double v = d[k] / w;
      int n = ord[k];
      if (n > 0) fac *= ((n % 2) ? -1.0 : 1.0) * hermite(n, v) / std::pow(w, n);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.m[i][j] += fac * t.amplitude.m[i][j];
  }
  return out;
}

double GaussianSigma::decay_constant(int order) const {
  static thread_local const GaussianSigma* cached = nullptr;
  static thread_local std::array<double, 5> consts;
  if (cached != this) {
    double rmax = 1.0;
    for (const Term& t : terms_)
      rmax = std::max(rmax, t.center.norm() + 24.0 * t.width);
    consts = sample_decay_constants(*this, 0.5, rmax);
    cached = this;
  }
  return consts[order];
}

// ---------------------------------------------------------------------------
// RationalSigma

RationalSigma::RationalSigma(const Mat3& coeff, double scale)
    : coeff_(coeff), s0_(scale) {}

Mat3 RationalSigma::eval(const Vec3& x, int ix, int iy, int iz) const {
  int order = ix + iy + iz;
  if (order > 2) throw std::invalid_argument("RationalSigma: |I| > 2");
  double q = x.norm2();
  double den = s0_ * s0_ + q;
  double f, fp, fpp;
  f = s0_ * s0_ / den;
  fp = -s0_ * s0_ / (den * den);
  fpp = 2.0 * s0_ * s0_ / (den * den * den);
  double scalar = 0;
  if (order == 0) {
    scalar = f;
  } else if (order == 1) {
    int k = ix ? 0 : (iy ? 1 : 2);
    scalar = fp * 2.0 * x[k];
  } else {
    // second derivative in directions k, l (k == l when e.g. ix == 2)
    int k = -1, l = -1;
    int ord[3] = {ix, iy, iz};
    for (int d = 0; d < 3; ++d) {
      for (int c = 0; c < ord[d]; ++c) {
        if (k < 0) k = d;
        else l = d;
      }
    }
    scalar = fpp * 4.0 * x[k] * x[l] + (k == l ? 2.0 * fp : 0.0);
  }
  return coeff_ * scalar;
}

double RationalSigma::decay_constant(int order) const {
  double m = mat_max_abs(coeff_) * s0_ * s0_;
  switch (order) {
    case 0: return 2.0 * m;
    case 1: return 4.0 * m;
    case 2: return 16.0 * m;
    default: return 0.0;
  }
}

// ---------------------------------------------------------------------------
// RadialProfile

namespace {

constexpr int kProfileCoefs = 120;
constexpr int kProfileQuadNodes = 256;

// Legendre values P_0..P_n at t.
void legendre_row(int n, long double t, std::vector<long double>& p) {
  p.resize(n + 1);
  p[0] = 1.0L;
  if (n >= 1) p[1] = t;
  for (int k = 2; k <= n; ++k)
    p[k] = ((2.0L * k - 1.0L) * t * p[k - 1] - (k - 1.0L) * p[k - 2]) / k;
}

// int_{t}^{1} of the Legendre series with coefficients a (ascending degree):
// int P_k = (P_{k+1} - P_{k-1})/(2k+1) for k >= 1; allocation-free recurrence.
long double series_tail_integral(const std::vector<long double>& a,
                                 long double t) {
  int n = static_cast<int>(a.size()) - 1;
  long double s = a[0] * (1.0L - t);
  long double pkm1 = 1.0L, pk = t;  // P_0, P_1
  for (int k = 1; k <= n; ++k) {
    long double pkp1 = ((2.0L * k + 1.0L) * t * pk - k * pkm1) / (k + 1.0L);
    s -= a[k] * (pkp1 - pkm1) / (2.0L * k + 1.0L);
    pkm1 = pk;
    pk = pkp1;
  }
  return s;
}

}  // namespace

RadialProfile::RadialProfile(std::function<double(double)> S,
                             std::vector<Interval> support, int decay_order)
    : S_(std::move(S)), support_(std::move(support)), decay_order_(decay_order) {
  std::sort(support_.begin(), support_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& iv : support_) {
    Segment seg;
    seg.lo = iv.lo;
    seg.mapped_tail = !std::isfinite(iv.hi);
    seg.hi = seg.mapped_tail ? iv.lo : iv.hi;  // tail: variable v in (0,1]
    build_segment(seg);
    segments_.push_back(std::move(seg));
  }
  size_t n = segments_.size();
  suffix_r2s_.assign(n + 1, 0.0L);
  suffix_rs_.assign(n + 1, 0.0L);
  for (size_t i = n; i-- > 0;) {
    suffix_r2s_[i] = suffix_r2s_[i + 1] + segments_[i].full_r2s;
    suffix_rs_[i] = suffix_rs_[i + 1] + segments_[i].full_rs;
  }
}

void RadialProfile::build_segment(Segment& seg) {
  const GaussLegendre& gl = GaussLegendre::unit(kProfileQuadNodes);
  int n = kProfileCoefs;
  seg.coef_r2s.assign(n + 1, 0.0L);
  seg.coef_rs.assign(n + 1, 0.0L);
  std::vector<long double> p;
  for (int q = 0; q < kProfileQuadNodes; ++q) {
    long double t = gl.nodes[q], w = gl.weights[q];
    long double f2, f1;
    if (!seg.mapped_tail) {
      long double mid = 0.5L * (seg.lo + seg.hi), half = 0.5L * (seg.hi - seg.lo);
      long double rho = mid + half * t;
      long double s = S_(static_cast<double>(rho));
      f2 = half * rho * rho * s;
      f1 = half * rho * s;
    } else {
      // v in (0,1], rho = lo/v: int_lo^inf rho^2 S = lo^3 int_0^1 v^-4 S(lo/v) dv
      long double v = 0.5L * (t + 1.0L);
      long double jac = 0.5L;
      if (v < 1e-18L) { f2 = f1 = 0.0L; }
      else {
        long double rho = seg.lo / v;
        long double s = S_(static_cast<double>(rho));
        long double lo = seg.lo;
        f2 = jac * lo * lo * lo / (v * v * v * v) * s;
        f1 = jac * lo * lo / (v * v * v) * s;
      }
    }
    legendre_row(n, t, p);
    for (int k = 0; k <= n; ++k) {
      long double pk = p[k] * w;
      seg.coef_r2s[k] += f2 * pk;
      seg.coef_rs[k] += f1 * pk;
    }
  }
  for (int k = 0; k <= n; ++k) {
    seg.coef_r2s[k] *= (2.0L * k + 1.0L) / 2.0L;
    seg.coef_rs[k] *= (2.0L * k + 1.0L) / 2.0L;
  }
  seg.full_r2s = series_tail_integral(seg.coef_r2s, -1.0L);
  seg.full_rs = series_tail_integral(seg.coef_rs, -1.0L);
  seg.coef_r2s_d.assign(seg.coef_r2s.begin(), seg.coef_r2s.end());
  seg.coef_rs_d.assign(seg.coef_rs.begin(), seg.coef_rs.end());
}

namespace {

double series_tail_integral_d(const std::vector<double>& a, double t) {
  int n = static_cast<int>(a.size()) - 1;
  double s = a[0] * (1.0 - t);
  double pkm1 = 1.0, pk = t;
  for (int k = 1; k <= n; ++k) {
    double pkp1 = ((2.0 * k + 1.0) * t * pk - k * pkm1) / (k + 1.0);
    s -= a[k] * (pkp1 - pkm1) / (2.0 * k + 1.0);
    pkm1 = pk;
    pk = pkp1;
  }
  return s;
}

}  // namespace

double RadialProfile::phi_d(double r) const {
  double m2 = 0, m1 = 0;
  size_t i = 0;
  for (; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    double hi = seg.mapped_tail ? std::numeric_limits<double>::infinity() : seg.hi;
    if (r <= seg.lo) break;
    if (r < hi) {
      if (!seg.mapped_tail) {
        double t = (2.0 * r - (seg.lo + seg.hi)) / (seg.hi - seg.lo);
        m2 = series_tail_integral_d(seg.coef_r2s_d, t);
        m1 = series_tail_integral_d(seg.coef_rs_d, t);
      } else {
        double t = 2.0 * seg.lo / r - 1.0;
        m2 = static_cast<double>(seg.full_r2s) -
             series_tail_integral_d(seg.coef_r2s_d, t);
        m1 = static_cast<double>(seg.full_rs) -
             series_tail_integral_d(seg.coef_rs_d, t);
      }
      ++i;
      break;
    }
  }
  m2 += static_cast<double>(suffix_r2s_[i]);
  m1 += static_cast<double>(suffix_rs_[i]);
  return (m2 - r * m1) / r;
}

void RadialProfile::partial(const Segment& seg, long double r, long double& m2,
                            long double& m1) const {
  long double t;
  if (!seg.mapped_tail) {
    // integral over [r, hi] -> t in [t_r, 1]
    t = (2.0L * r - (seg.lo + seg.hi)) / (seg.hi - seg.lo);
    m2 = series_tail_integral(seg.coef_r2s, t);
    m1 = series_tail_integral(seg.coef_rs, t);
  } else {
    // integral over [r, inf) -> v in (0, lo/r]; flip to t-tail form
    long double vr = seg.lo / r;
    t = 2.0L * vr - 1.0L;
    m2 = seg.full_r2s - series_tail_integral(seg.coef_r2s, t);
    m1 = seg.full_rs - series_tail_integral(seg.coef_rs, t);
  }
}

long double RadialProfile::phi(long double r) const {
  long double m2 = 0, m1 = 0;
  size_t i = 0;
  for (; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    long double hi = seg.mapped_tail
                         ? std::numeric_limits<long double>::infinity()
                         : static_cast<long double>(seg.hi);
    if (r <= seg.lo) break;  // this and all later segments are fully above r
    if (r < hi) {
      partial(seg, r, m2, m1);
      ++i;
      break;
    }
  }
  m2 += suffix_r2s_[i];
  m1 += suffix_rs_[i];
  return (m2 - r * m1) / r;
}

long double RadialProfile::phi_prime(long double r) const {
  long double m2 = 0, m1 = 0;
  size_t i = 0;
  for (; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    long double hi = seg.mapped_tail
                         ? std::numeric_limits<long double>::infinity()
                         : static_cast<long double>(seg.hi);
    if (r <= seg.lo) break;
    if (r < hi) {
      long double m1_unused;
      partial(seg, r, m2, m1_unused);
      ++i;
      break;
    }
  }
  m2 += suffix_r2s_[i];
  return -m2 / (r * r);
}

double RadialProfile::truncation_tail_bound(double r) const {
  return tail_bound_ ? tail_bound_(r) : 0.0;
}

void RadialProfile::set_truncation_tail(std::function<double(double)> bound) {
  tail_bound_ = std::move(bound);
}

// ---------------------------------------------------------------------------
// phi_from_S: adaptive quadrature path (independent of the cached expansions)

namespace {

struct AdaptiveResult {
  double i2 = 0, i1 = 0;
};

void adaptive_piece(const std::function<double(double)>& f, double a, double b,
                    double tol, int depth, int max_depth, double& acc) {
  const GaussLegendre g10 = GaussLegendre::on_interval(10, a, b);
  const GaussLegendre g20 = GaussLegendre::on_interval(20, a, b);
  double s10 = 0, s20 = 0;
  for (int i = 0; i < 10; ++i) s10 += g10.weights[i] * f(g10.nodes[i]);
  for (int i = 0; i < 20; ++i) s20 += g20.weights[i] * f(g20.nodes[i]);
  if (std::abs(s20 - s10) <= tol * std::max(1.0, std::abs(s20)) ||
      (b - a) < 1e-14 * std::max(1.0, std::abs(a))) {
    acc += s20;
    return;
  }
  if (depth >= max_depth)
    throw QuadratureError("phi_from_S: adaptive quadrature did not converge");
  double m = 0.5 * (a + b);
  adaptive_piece(f, a, m, tol, depth + 1, max_depth, acc);
  adaptive_piece(f, m, b, tol, depth + 1, max_depth, acc);
}

double adaptive_integral(const std::function<double(double)>& f, double a,
                         double b, double tol, int max_depth) {
  double acc = 0;
  adaptive_piece(f, a, b, tol, 0, max_depth, acc);
  return acc;
}

}  // namespace

PhiResult phi_from_S(const std::function<double(double)>& S,
                     const std::vector<Interval>& support, double r, double tol,
                     int max_depth) {
  double i2 = 0, i1 = 0;
  for (const Interval& iv : support) {
    double lo = std::max(iv.lo, r);
    if (std::isfinite(iv.hi)) {
      if (lo >= iv.hi) continue;
      i2 += adaptive_integral([&](double rho) { return rho * rho * S(rho); },
                              lo, iv.hi, tol, max_depth);
      i1 += adaptive_integral([&](double rho) { return rho * S(rho); }, lo,
                              iv.hi, tol, max_depth);
    } else {
      // v = lo/rho substitution
      i2 += adaptive_integral(
          [&](double v) {
            double rho = lo / v;
            return lo * lo * lo / (v * v * v * v) * S(rho);
          },
          1e-12, 1.0, tol, max_depth);
      i1 += adaptive_integral(
          [&](double v) {
            double rho = lo / v;
            return lo * lo / (v * v * v) * S(rho);
          },
          1e-12, 1.0, tol, max_depth);
    }
  }
  PhiResult res;
  res.phi = (i2 - r * i1) / r;
  res.phi_prime = -i2 / (r * r);
  return res;
}

// ---------------------------------------------------------------------------
// MetricSpec

long double MetricSpec::conformal_factor(long double r) const {
  switch (kind) {
    case MetricKind::Flat: return 1.0L;
    case MetricKind::Schwarzschild: return 1.0L + mass / (2.0L * r);
    case MetricKind::RadialConformal:
      return 1.0L + mass / (2.0L * r) + profile->phi(r);
    case MetricKind::GeneralSigma: return 1.0L + mass / (2.0L * r);
  }
  return 1.0L;
}

double MetricSpec::conformal_factor_d(double r) const {
  switch (kind) {
    case MetricKind::Flat: return 1.0;
    case MetricKind::Schwarzschild: return 1.0 + mass / (2.0 * r);
    case MetricKind::RadialConformal:
      return 1.0 + mass / (2.0 * r) + profile->phi_d(r);
    case MetricKind::GeneralSigma: return 1.0 + mass / (2.0 * r);
  }
  return 1.0;
}

long double MetricSpec::conformal_factor_prime(long double r) const {
  switch (kind) {
    case MetricKind::Flat: return 0.0L;
    case MetricKind::Schwarzschild: return -mass / (2.0L * r * r);
    case MetricKind::RadialConformal:
      return -mass / (2.0L * r * r) + profile->phi_prime(r);
    case MetricKind::GeneralSigma: return -mass / (2.0L * r * r);
  }
  return 0.0L;
}

MetricSpec MetricSpec::flat() {
  MetricSpec s;
  s.kind = MetricKind::Flat;
  s.mass = 0.0;
  s.r_min = 0.0;
  s.name = "flat";
  return s;
}

MetricSpec MetricSpec::schwarzschild(double mass) {
  MetricSpec s;
  s.kind = MetricKind::Schwarzschild;
  s.mass = mass;
  s.r_min = 0.5;
  s.name = "schwarzschild";
  return s;
}

MetricSpec MetricSpec::radial_conformal(double mass,
                                        std::shared_ptr<const RadialProfile> p,
                                        double r_min, std::string name) {
  MetricSpec s;
  s.kind = MetricKind::RadialConformal;
  s.mass = mass;
  s.profile = std::move(p);
  s.r_min = r_min;
  s.name = std::move(name);
  // conformal factor must stay positive on the chart
  for (int i = 0; i < 200; ++i) {
    long double r = r_min * std::pow(1e6 / r_min, i / 199.0);
    if (s.conformal_factor(r) <= 0.0L)
      throw ConfigError("radial_conformal: conformal factor not positive at r=" +
                        std::to_string(static_cast<double>(r)));
  }
  return s;
}

MetricSpec MetricSpec::general_sigma(double mass,
                                     std::shared_ptr<const SigmaField> sig,
                                     double r_min, std::string name) {
  MetricSpec s;
  s.kind = MetricKind::GeneralSigma;
  s.mass = mass;
  s.sigma = std::move(sig);
  s.r_min = r_min;
  s.name = std::move(name);
  return s;
}

MetricSpec MetricSpec::builtin(const std::string& name) {
  if (name == "flat") return flat();
  if (name == "schwarzschild") return schwarzschild(2.0);
  if (name == "thm13")
    return radial_conformal(2.0, pulse_S_thm13(8.0, 8), 2.0, "thm13");
  // the order-5 profile is only defined outside a compact core: the conformal
  // factor turns positive above the innermost pulse
  if (name == "thm17")
    return radial_conformal(2.0, pulse_S_thm17(6), 6.5, "thm17");
  throw ConfigError("unknown builtin metric: " + name);
}

Mat3 metric_at(const MetricSpec& spec, const Vec3& x) {
  double r = x.norm();
  if (r < spec.r_min)
    throw ChartDomainError("metric_at: |x| < r_min");
  double f = spec.conformal_factor_d(r);
  double f4 = f * f;
  f4 *= f4;
  Mat3 g = Mat3::scaled_identity(f4);
  if (spec.kind == MetricKind::GeneralSigma && spec.sigma) {
    Mat3 s = spec.sigma->eval(x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g.m[i][j] += s.m[i][j];
  }
  return g;
}

void metric_at_ld(const MetricSpec& spec, const Vec3& x, long double g[3][3]) {
  long double r = sqrtl(static_cast<long double>(x.x) * x.x +
                        static_cast<long double>(x.y) * x.y +
                        static_cast<long double>(x.z) * x.z);
  if (r < spec.r_min) throw ChartDomainError("metric_at_ld: |x| < r_min");
  long double f = spec.conformal_factor(r);
  long double f4 = f * f;
  f4 *= f4;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = (i == j) ? f4 : 0.0L;
  if (spec.kind == MetricKind::GeneralSigma && spec.sigma) {
    Mat3 s = spec.sigma->eval(x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] += s.m[i][j];
  }
}

// ---------------------------------------------------------------------------
// scalar curvature

namespace {

// radial closed form R(r) = -8 u^-5 (r^2 phi')'/r^2 on conformal metrics
long double conformal_R(const MetricSpec& spec, long double r) {
  if (spec.kind == MetricKind::Flat || spec.kind == MetricKind::Schwarzschild)
    return 0.0L;
  long double u = spec.conformal_factor(r);
  long double s = spec.profile->S(static_cast<double>(r));
  return -8.0L * powl(u, -5.0L) * s;
}

struct MetricDerivs {
  long double g[3][3];
  long double dg[3][3][3];     // dg[k][i][j] = d_k g_ij
  long double d2g[3][3][3][3]; // d2g[k][l][i][j]
};

void metric_derivs_ld(const MetricSpec& spec, const Vec3& x, MetricDerivs& md) {
  double r = x.norm();
  double h1 = fd_step1(r), h2 = fd_step2(r);
  metric_at_ld(spec, x, md.g);
  long double gp[3][3], gm[3][3], gp2[3][3], gm2[3][3];
  for (int k = 0; k < 3; ++k) {
    Vec3 e{0, 0, 0};
    e[k] = 1.0;
    metric_at_ld(spec, x + e * h1, gp);
    metric_at_ld(spec, x - e * h1, gm);
    metric_at_ld(spec, x + e * (h1 / 2), gp2);
    metric_at_ld(spec, x - e * (h1 / 2), gm2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        long double dh = (gp[i][j] - gm[i][j]) / (2.0L * h1);
        long double dh2 = (gp2[i][j] - gm2[i][j]) / (1.0L * h1);
        md.dg[k][i][j] = richardson_ld(dh, dh2);
      }
  }
  for (int k = 0; k < 3; ++k) {
    Vec3 e{0, 0, 0};
    e[k] = 1.0;
    metric_at_ld(spec, x + e * h2, gp);
    metric_at_ld(spec, x - e * h2, gm);
    metric_at_ld(spec, x + e * (h2 / 2), gp2);
    metric_at_ld(spec, x - e * (h2 / 2), gm2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        long double dh =
            (gp[i][j] - 2.0L * md.g[i][j] + gm[i][j]) / (h2 * (long double)h2);
        long double dh2 = (gp2[i][j] - 2.0L * md.g[i][j] + gm2[i][j]) /
                          (0.25L * h2 * h2);
        md.d2g[k][k][i][j] = richardson_ld(dh, dh2);
      }
  }
  for (int k = 0; k < 3; ++k)
    for (int l = k + 1; l < 3; ++l) {
      Vec3 ek{0, 0, 0}, el{0, 0, 0};
      ek[k] = 1.0;
      el[l] = 1.0;
      auto mixed = [&](double h) {
        long double gpp[3][3], gpm[3][3], gmp[3][3], gmm[3][3];
        metric_at_ld(spec, x + ek * h + el * h, gpp);
        metric_at_ld(spec, x + ek * h - el * h, gpm);
        metric_at_ld(spec, x - ek * h + el * h, gmp);
        metric_at_ld(spec, x - ek * h - el * h, gmm);
        std::array<std::array<long double, 3>, 3> out;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            out[i][j] = (gpp[i][j] - gpm[i][j] - gmp[i][j] + gmm[i][j]) /
                        (4.0L * h * (long double)h);
        return out;
      };
      auto dh = mixed(h2), dh2 = mixed(h2 / 2);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          md.d2g[k][l][i][j] = md.d2g[l][k][i][j] =
              richardson_ld(dh[i][j], dh2[i][j]);
        }
    }
}

long double invert3_ld(const long double g[3][3], long double gi[3][3]) {
  long double d =
      g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
      g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
      g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  gi[0][0] = (g[1][1] * g[2][2] - g[1][2] * g[2][1]) / d;
  gi[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) / d;
  gi[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) / d;
  gi[1][0] = gi[0][1];
  gi[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) / d;
  gi[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) / d;
  gi[2][0] = gi[0][2];
  gi[2][1] = gi[1][2];
  gi[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / d;
  return d;
}

}  // namespace

double scalar_curvature_fd(const MetricSpec& spec, const Vec3& x) {
  MetricDerivs md;
  metric_derivs_ld(spec, x, md);
  long double gi[3][3];
  invert3_ld(md.g, gi);
  // Gamma^k_ij and d_m Gamma^k_ij
  long double gam[3][3][3];
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        long double s = 0;
        for (int l = 0; l < 3; ++l)
          s += gi[k][l] * (md.dg[i][j][l] + md.dg[j][i][l] - md.dg[l][i][j]);
        gam[k][i][j] = 0.5L * s;
      }
  // d_m g^{kl} = -g^{ka} dg[m][a][b] g^{bl}
  long double dgi[3][3][3];
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        long double s = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            s += gi[k][a] * md.dg[m][a][b] * gi[b][l];
        dgi[m][k][l] = -s;
      }
  long double dgam[3][3][3][3];  // dgam[m][k][i][j] = d_m Gamma^k_ij
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          long double s = 0;
          for (int l = 0; l < 3; ++l) {
            s += dgi[m][k][l] *
                 (md.dg[i][j][l] + md.dg[j][i][l] - md.dg[l][i][j]);
            s += gi[k][l] * (md.d2g[m][i][j][l] + md.d2g[m][j][i][l] -
                             md.d2g[m][l][i][j]);
          }
          dgam[m][k][i][j] = 0.5L * s;
        }
  long double R = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      long double ric = 0;
      for (int k = 0; k < 3; ++k) {
        ric += dgam[k][k][i][j] - dgam[i][k][k][j];
        for (int l = 0; l < 3; ++l)
          ric += gam[k][k][l] * gam[l][i][j] - gam[k][i][l] * gam[l][k][j];
      }
      R += gi[i][j] * ric;
    }
  return static_cast<double>(R);
}

double scalar_curvature(const MetricSpec& spec, const Vec3& x) {
  double r = x.norm();
  if (r < spec.r_min) throw ChartDomainError("scalar_curvature: |x| < r_min");
  if (spec.is_conformal()) return static_cast<double>(conformal_R(spec, r));
  return scalar_curvature_fd(spec, x);
}

double laplacian_scalar_curvature(const MetricSpec& spec, const Vec3& x) {
  double r = x.norm();
  if (r < spec.r_min)
    throw ChartDomainError("laplacian_scalar_curvature: |x| < r_min");
  if (spec.is_conformal()) {
    if (spec.kind != MetricKind::RadialConformal) return 0.0;
    long double h = fd_step2(r);
    long double rp = r + h, rm = r - h, rp2 = r + h / 2, rm2 = r - h / 2;
    long double f0 = conformal_R(spec, r);
    auto lap = [&](long double hh, long double fp, long double fm) {
      long double d2 = (fp - 2.0L * f0 + fm) / (hh * hh);
      long double d1 = (fp - fm) / (2.0L * hh);
      return d2 + 2.0L * d1 / r;
    };
    long double l_h = lap(h, conformal_R(spec, rp), conformal_R(spec, rm));
    long double l_h2 = lap(h / 2, conformal_R(spec, rp2), conformal_R(spec, rm2));
    return static_cast<double>(richardson_ld(l_h, l_h2));
  }
  return laplacian_scalar_curvature_fd3d(spec, x);
}

double laplacian_scalar_curvature_fd3d(const MetricSpec& spec, const Vec3& x) {
  double r = x.norm();
  double h = std::max(4.0 * fd_step2(r), 1e-3);
  auto lap_step = [&](double hh) {
    double s = -6.0 * scalar_curvature(spec, x);
    for (int k = 0; k < 3; ++k) {
      Vec3 e{0, 0, 0};
      e[k] = 1.0;
      s += scalar_curvature(spec, x + e * hh) +
           scalar_curvature(spec, x - e * hh);
    }
    return s / (hh * hh);
  };
  return richardson(lap_step(h), lap_step(h / 2));
}

double radial_derivative_R(const MetricSpec& spec, const Vec3& x) {
  double r = x.norm();
  if (spec.is_conformal()) {
    if (spec.kind != MetricKind::RadialConformal) return 0.0;
    long double h = fd_step1(r) * 4.0L;
    long double d_h = (conformal_R(spec, r + h) - conformal_R(spec, r - h)) / (2.0L * h);
    long double d_h2 =
        (conformal_R(spec, r + h / 2) - conformal_R(spec, r - h / 2)) / h;
    return static_cast<double>(richardson_ld(d_h, d_h2));
  }
  Vec3 n = x / r;
  double h = std::max(4.0 * fd_step2(r), 1e-3);
  double d_h =
      (scalar_curvature(spec, x + n * h) - scalar_curvature(spec, x - n * h)) /
      (2 * h);
  double d_h2 = (scalar_curvature(spec, x + n * (h / 2)) -
                 scalar_curvature(spec, x - n * (h / 2))) /
                h;
  return richardson(d_h, d_h2);
}

double radial_derivative_laplacian_R(const MetricSpec& spec, const Vec3& x) {
  double r = x.norm();
  Vec3 n = x / r;
  double h = std::max(4.0 * fd_step2(r), 1e-3);
  auto lap = [&](const Vec3& p) { return laplacian_scalar_curvature(spec, p); };
  double d_h = (lap(x + n * h) - lap(x - n * h)) / (2 * h);
  double d_h2 = (lap(x + n * (h / 2)) - lap(x - n * (h / 2))) / h;
  return richardson(d_h, d_h2);
}

// ---------------------------------------------------------------------------
// bump functions and pulsed profiles

std::function<double(double)> chi_bump(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("chi_bump: need a < b");
  return [a, b](double t) {
    if (t <= a || t >= b) return 0.0;
    return std::exp(-1.0 / ((t - a) * (b - t)));
  };
}

std::function<double(double)> chi_bump_slope(double a, double b) {
  auto chi0 = chi_bump(a, b);
  double mid = 0.5 * (a + b);
  double norm = chi0(mid);
  return [chi0, norm](double t) { return chi0(t) * (7.0 - t) / norm; };
}

std::shared_ptr<RadialProfile> pulse_S_thm13(double A, int k_max) {
  auto chi = chi_bump(3.0, 4.0);
  auto S = [A, k_max, chi](double r) {
    double s = 0;
    for (int k = 0; k <= k_max; ++k) {
      double scale = std::pow(10.0, -k);
      double t = scale * r;
      if (t > 3.0 && t < 4.0) s -= std::pow(scale, 4) * A * chi(t);
    }
    return s;
  };
  std::vector<Interval> sup;
  for (int k = 0; k <= k_max; ++k)
    sup.push_back({3.0 * std::pow(10.0, k), 4.0 * std::pow(10.0, k)});
  auto p = std::make_shared<RadialProfile>(S, sup, 4);
  // omitted pulses k > k_max: sum_k A 10^-k I2 with I2 = int t^2 chi(t) dt
  const GaussLegendre g = GaussLegendre::on_interval(64, 3.0, 4.0);
  double I2 = 0;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    I2 += g.weights[i] * g.nodes[i] * g.nodes[i] * chi(g.nodes[i]);
  double tail = A * I2 * std::pow(10.0, -(k_max + 1)) / (1.0 - 0.1);
  p->set_truncation_tail([tail](double r) { return tail / r; });
  return p;
}

std::shared_ptr<RadialProfile> pulse_S_thm17(int k_max) {
  auto chi = chi_bump_slope(4.0, 6.0);
  auto S = [k_max, chi](double r) {
    double s = 0;
    for (int k = 0; k <= k_max; ++k) {
      double scale = std::pow(10.0, -k);
      double t = scale * r;
      if (t > 4.0 && t < 6.0) s -= std::pow(scale, 5) * chi(t);
    }
    return s;
  };
  std::vector<Interval> sup;
  for (int k = 0; k <= k_max; ++k)
    sup.push_back({4.0 * std::pow(10.0, k), 6.0 * std::pow(10.0, k)});
  auto p = std::make_shared<RadialProfile>(S, sup, 5);
  const GaussLegendre g = GaussLegendre::on_interval(64, 4.0, 6.0);
  double I2 = 0;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    I2 += g.weights[i] * g.nodes[i] * g.nodes[i] * chi(g.nodes[i]);
  double tail = I2 * std::pow(10.0, -2 * (k_max + 1)) / (1.0 - 0.01);
  p->set_truncation_tail([tail](double r) { return tail / r; });
  return p;
}

std::shared_ptr<SigmaField> conformal_difference_sigma(const MetricSpec& spec) {
  if (!spec.is_conformal())
    throw std::invalid_argument("conformal_difference_sigma: conformal spec required");
  class Diff : public SigmaField {
   public:
    explicit Diff(MetricSpec s) : spec_(std::move(s)) {}
    Mat3 eval(const Vec3& x, int ix, int iy, int iz) const override {
      if (ix + iy + iz > 0)
        throw std::invalid_argument("conformal_difference_sigma: values only");
      long double r = x.norm();
      long double u = spec_.conformal_factor(r);
      long double us = 1.0L + spec_.mass / (2.0L * r);
      // u^4 - us^4 difference-formed to keep relative accuracy of the gap
      long double phi = u - us;
      long double s = phi * (u * u * u + u * u * us + u * us * us + us * us * us);
      return Mat3::scaled_identity(static_cast<double>(s));
    }
    double decay_constant(int order) const override { return order == 0 ? 100.0 : 0.0; }
   private:
    MetricSpec spec_;
  };
  return std::make_shared<Diff>(spec);
}

}  // namespace lsr
