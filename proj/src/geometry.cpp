#include "lsr/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "lsr/errors.hpp"

namespace lsr {

GraphSurface GraphSurface::round_sphere(const Vec3& center, double radius, int L) {
  GraphSurface s;
  s.center = center;
  s.radius = radius;
  s.u.basis = HarmonicBasis::get(L);
  s.u.coefs.assign(s.u.basis->n_coef(), 0.0);
  return s;
}

void christoffel_fd(const MetricSpec& spec, const Vec3& x,
                    double gamma[3][3][3]) {
  double r = x.norm();
  double h = fd_step1(r);
  Mat3 g = metric_at(spec, x);
  Mat3 gi = g.inverse();
  double dg[3][3][3];  // dg[k][i][j] = d_k g_ij
  for (int k = 0; k < 3; ++k) {
    Vec3 e{0, 0, 0};
    e[k] = 1.0;
    Mat3 gp = metric_at(spec, x + e * h);
    Mat3 gm = metric_at(spec, x - e * h);
    Mat3 gp2 = metric_at(spec, x + e * (h / 2));
    Mat3 gm2 = metric_at(spec, x - e * (h / 2));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double d_h = (gp.m[i][j] - gm.m[i][j]) / (2 * h);
        double d_h2 = (gp2.m[i][j] - gm2.m[i][j]) / h;
        dg[k][i][j] = richardson(d_h, d_h2);
      }
  }
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int l = 0; l < 3; ++l)
          s += gi.m[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
        gamma[k][i][j] = 0.5 * s;
      }
}

namespace {

struct NodeFrame {
  Vec3 n, n_th, n_ph, n_thth, n_thph, n_phph;
};

NodeFrame node_frame(const SphereRule& rule, size_t k) {
  double st = rule.sin_theta[k], ct = rule.cos_theta[k];
  double ph = rule.phi_az[k];
  double cp = std::cos(ph), sp = std::sin(ph);
  NodeFrame f;
  f.n = {st * cp, st * sp, ct};
  f.n_th = {ct * cp, ct * sp, -st};
  f.n_ph = {-st * sp, st * cp, 0.0};
  f.n_thth = f.n * -1.0;
  f.n_thph = {-ct * sp, ct * cp, 0.0};
  f.n_phph = {-st * cp, -st * sp, 0.0};
  return f;
}

}  // namespace

SurfaceGeometry surface_geometry(const MetricSpec& spec, const GraphSurface& s) {
  const HarmonicBasis& basis = *s.u.basis;
  const SphereRule& rule = basis.rule();
  size_t nn = rule.size();
  std::vector<double> u, ut, up, utt, utp, upp;
  basis.synthesize_with_derivs(s.u.coefs, u, ut, up, utt, utp, upp);

  SurfaceGeometry out;
  out.rule = basis.rule_ptr();
  out.position.resize(nn);
  out.normal.resize(nn);
  out.area_jacobian.resize(nn);
  out.mean_curvature.resize(nn);
  out.normal_speed.resize(nn);
  std::vector<double> cond(nn);

  parallel_for_except(nn, [&](size_t k) {
    NodeFrame f = node_frame(rule, k);
    double R = s.radius + u[k];
    if (R <= 0.0) throw DegenerateMetric("surface_geometry: r + u <= 0");
    Vec3 X = s.center + f.n * R;
    Vec3 Xt = f.n * ut[k] + f.n_th * R;
    Vec3 Xp = f.n * up[k] + f.n_ph * R;
    Vec3 Xtt = f.n * utt[k] + f.n_th * (2 * ut[k]) + f.n_thth * R;
    Vec3 Xtp = f.n * utp[k] + f.n_ph * ut[k] + f.n_th * up[k] + f.n_thph * R;
    Vec3 Xpp = f.n * upp[k] + f.n_ph * (2 * up[k]) + f.n_phph * R;

    Mat3 g = metric_at(spec, X);
    double gamma[3][3][3];
    christoffel_fd(spec, X, gamma);

    double h11 = quad_form(g, Xt, Xt);
    double h12 = quad_form(g, Xt, Xp);
    double h22 = quad_form(g, Xp, Xp);
    double det = h11 * h22 - h12 * h12;
    double st = rule.sin_theta[k];
    if (det <= 0.0) throw DegenerateMetric("surface_geometry: induced metric degenerate");
    // condition number of the induced 2x2 metric
    double tr = h11 + h22;
    double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
    cond[k] = (tr + disc) / std::max(tr - disc, 1e-300);
    if (cond[k] > 1e8)
      throw DegenerateMetric("surface_geometry: induced metric condition > 1e8");

    Mat3 gi = g.inverse();
    Vec3 Ncr = cross(Xt, Xp);
    Vec3 Nup = gi * Ncr;
    double nn2 = quad_form(g, Nup, Nup);
    Vec3 nu = Nup / std::sqrt(nn2);
    if (dot(nu, f.n) < 0) nu = nu * -1.0;

    auto second_form = [&](const Vec3& Xab, const Vec3& Xa, const Vec3& Xb) {
      Vec3 acc = Xab;
      for (int kk = 0; kk < 3; ++kk) {
        double sgam = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) sgam += gamma[kk][i][j] * Xa[i] * Xb[j];
        acc[kk] += sgam;
      }
      return quad_form(g, acc, nu);
    };
    double II11 = second_form(Xtt, Xt, Xt);
    double II12 = second_form(Xtp, Xt, Xp);
    double II22 = second_form(Xpp, Xp, Xp);
    double H = -(h22 * II11 - 2 * h12 * II12 + h11 * II22) / det;

    out.position[k] = X;
    out.normal[k] = nu;
    out.area_jacobian[k] = std::sqrt(det) / st;
    out.mean_curvature[k] = H;
    out.normal_speed[k] = quad_form(g, f.n, nu);
  });
  for (double c : cond) out.max_condition = std::max(out.max_condition, c);
  return out;
}

double area(const MetricSpec& spec, const GraphSurface& s) {
  const HarmonicBasis& basis = *s.u.basis;
  const SphereRule& rule = basis.rule();
  size_t nn = rule.size();
  std::vector<double> u, ut, up, utt, utp, upp;
  basis.synthesize_with_derivs(s.u.coefs, u, ut, up, utt, utp, upp);
  std::vector<double> buf(nn);
  parallel_for_except(nn, [&](size_t k) {
    NodeFrame f = node_frame(rule, k);
    double R = s.radius + u[k];
    Vec3 X = s.center + f.n * R;
    Vec3 Xt = f.n * ut[k] + f.n_th * R;
    Vec3 Xp = f.n * up[k] + f.n_ph * R;
    Mat3 g = metric_at(spec, X);
    double h11 = quad_form(g, Xt, Xt);
    double h12 = quad_form(g, Xt, Xp);
    double h22 = quad_form(g, Xp, Xp);
    double det = h11 * h22 - h12 * h12;
    buf[k] = rule.weights[k] * std::sqrt(det) / rule.sin_theta[k];
  });
  Kahan<double> acc;
  for (double v : buf) acc.add(v);
  return acc.get();
}

namespace {

// sqrt(det g) along the chart ray center + rho * dir
double volume_density(const MetricSpec& spec, const Vec3& p) {
  if (spec.is_conformal()) {
    double f = spec.conformal_factor_d(p.norm());
    double f2 = f * f;
    return f2 * f2 * f2;
  }
  return std::sqrt(metric_at(spec, p).det());
}

// radial breakpoints where |center + rho n| crosses profile support edges;
// fixed-capacity buffer, returns the count
int ray_breakpoints(const MetricSpec& spec, const Vec3& center, const Vec3& n,
                    double R, double* pts, int cap) {
  int cnt = 0;
  pts[cnt++] = 0.0;
  if (spec.kind == MetricKind::RadialConformal) {
    double b = dot(center, n);
    double c0 = center.norm2();
    for (const Interval& iv : spec.profile->support()) {
      for (double edge : {iv.lo, iv.hi}) {
        if (!std::isfinite(edge)) continue;
        double disc = b * b - (c0 - edge * edge);
        if (disc <= 0) continue;
        double sq = std::sqrt(disc);
        for (double rho : {-b - sq, -b + sq})
          if (rho > 1e-12 && rho < R * (1.0 - 1e-15) && cnt < cap - 1)
            pts[cnt++] = rho;
      }
    }
  }
  pts[cnt++] = R;
  std::sort(pts, pts + cnt);
  return cnt;
}

}  // namespace

double enclosed_volume(const MetricSpec& spec, const GraphSurface& s,
                       int n_radial) {
  const HarmonicBasis& basis = *s.u.basis;
  const SphereRule& rule = basis.rule();
  size_t nn = rule.size();
  std::vector<double> u = basis.synthesize(s.u.coefs);
  std::vector<double> buf(nn);
  const GaussLegendre& gl = GaussLegendre::unit(n_radial);
  // split rays use fewer nodes per panel: each panel is analytic
  const int n_split = std::max(24, n_radial / 2);
  const GaussLegendre& gls = GaussLegendre::unit(n_split);
  parallel_for_except(nn, [&](size_t k) {
    const Vec3& n = rule.nodes[k];
    double R = s.radius + u[k];
    double pts[64];
    int cnt = ray_breakpoints(spec, s.center, n, R, pts, 64);
    const GaussLegendre& g = (cnt > 2) ? gls : gl;
    const int nq = (cnt > 2) ? n_split : n_radial;
    Kahan<double> acc;
    for (int seg = 0; seg + 1 < cnt; ++seg) {
      double lo = pts[seg], hi = pts[seg + 1];
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int q = 0; q < nq; ++q) {
        double rho = mid + half * g.nodes[q];
        double w = half * g.weights[q];
        acc.add(w * rho * rho * volume_density(spec, s.center + n * rho));
      }
    }
    buf[k] = rule.weights[k] * acc.get();
  });
  Kahan<double> acc;
  for (double v : buf) acc.add(v);
  return acc.get();
}

double brane_functional(const MetricSpec& spec, const Vec3& a, double r, int L,
                        int n_radial) {
  GraphSurface s = GraphSurface::round_sphere(a, r, L);
  return brane_functional(spec, s, n_radial);
}

double brane_functional(const MetricSpec& spec, const GraphSurface& s,
                        int n_radial) {
  double an = s.center.norm();
  double factor = 1.0 + spec.mass / (2.0 * an);
  return area(spec, s) - 2.0 / s.radius / (factor * factor) *
                             enclosed_volume(spec, s, n_radial);
}

}  // namespace lsr
