#include "lsr/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "lsr/errors.hpp"

namespace lsr {

std::shared_ptr<const SphereRule> SphereRule::product_gauss(int degree) {
  static std::map<int, std::shared_ptr<const SphereRule>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;

  int n = degree / 2 + 1;  // 2n-1 >= degree
  auto rule = std::make_shared<SphereRule>();
  rule->n_polar = n;
  rule->n_azimuth = 2 * n;
  rule->exactness_degree = 2 * n - 1;
  const GaussLegendre& gl = GaussLegendre::unit(n);
  double wphi = 2.0 * kPi / rule->n_azimuth;
  rule->nodes.reserve(n * 2 * n);
  for (int i = 0; i < n; ++i) {
    double ct = gl.nodes[i];
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double th = std::acos(ct);
    for (int j = 0; j < rule->n_azimuth; ++j) {
      double ph = wphi * j;
      rule->nodes.push_back({st * std::cos(ph), st * std::sin(ph), ct});
      rule->weights.push_back(gl.weights[i] * wphi);
      rule->theta.push_back(th);
      rule->phi_az.push_back(ph);
      rule->sin_theta.push_back(st);
      rule->cos_theta.push_back(ct);
    }
  }
  cache[degree] = rule;
  return rule;
}

BallRule BallRule::product_gauss(std::shared_ptr<const SphereRule> sph,
                                 int n_radial) {
  BallRule b;
  b.sphere = std::move(sph);
  GaussLegendre gl = GaussLegendre::on_interval(n_radial, 0.0, 1.0);
  b.radial_nodes = gl.nodes;
  b.radial_weights.resize(n_radial);
  for (int i = 0; i < n_radial; ++i)
    b.radial_weights[i] = gl.weights[i] * gl.nodes[i] * gl.nodes[i];
  b.exactness_degree =
      std::min(b.sphere->exactness_degree, 2 * n_radial - 1 - 2);
  return b;
}

BallRule BallRule::product_gauss(int degree) {
  return product_gauss(SphereRule::product_gauss(degree), (degree + 3) / 2 + 1);
}

namespace {

double combine(const std::vector<double>& buf) {
  Kahan<double> acc;
  for (double v : buf) acc.add(v);
  return acc.get();
}

}  // namespace

double integrate_sphere(const std::function<double(const Vec3&)>& f,
                        const Vec3& a, double r, const SphereRule& rule) {
  std::vector<double> buf(rule.size());
  const double r2 = r * r;
  parallel_for_except(rule.size(), [&](size_t k) {
    buf[k] = rule.weights[k] * r2 * f(a + rule.nodes[k] * r);
  });
  return combine(buf);
}

double integrate_sphere_serial(const std::function<double(const Vec3&)>& f,
                               const Vec3& a, double r, const SphereRule& rule) {
  std::vector<double> buf(rule.size());
  const double r2 = r * r;
  serial_for(rule.size(), [&](size_t k) {
    buf[k] = rule.weights[k] * r2 * f(a + rule.nodes[k] * r);
  });
  return combine(buf);
}

double integrate_ball(const std::function<double(const Vec3&)>& f,
                      const Vec3& a, double r, const BallRule& rule) {
  const SphereRule& sph = *rule.sphere;
  std::vector<double> buf(sph.size());
  const double r3 = r * r * r;
  parallel_for_except(sph.size(), [&](size_t k) {
    Kahan<double> acc;
    for (size_t q = 0; q < rule.radial_nodes.size(); ++q) {
      double rho = r * rule.radial_nodes[q];
      acc.add(rule.radial_weights[q] * f(a + sph.nodes[k] * rho));
    }
    buf[k] = sph.weights[k] * r3 * acc.get();
  });
  return combine(buf);
}

double integrate_ball_serial(const std::function<double(const Vec3&)>& f,
                             const Vec3& a, double r, const BallRule& rule) {
  const SphereRule& sph = *rule.sphere;
  std::vector<double> buf(sph.size());
  const double r3 = r * r * r;
  serial_for(sph.size(), [&](size_t k) {
    Kahan<double> acc;
    for (size_t q = 0; q < rule.radial_nodes.size(); ++q) {
      double rho = r * rule.radial_nodes[q];
      acc.add(rule.radial_weights[q] * f(a + sph.nodes[k] * rho));
    }
    buf[k] = sph.weights[k] * r3 * acc.get();
  });
  return combine(buf);
}

double integrate_ball_spherical(const std::function<double(const Vec3&)>& f,
                                const Vec3& xi, double lambda, int n_polar,
                                int n_azimuth, int n_radial) {
  double xin = xi.norm();
  if (xin <= 1.0)
    throw ChartDomainError("integrate_ball_spherical: |xi| <= 1");
  // rotation taking e3 to xi/|xi|
  Vec3 e3 = xi / xin;
  Vec3 helper = std::abs(e3.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 e1 = cross(helper, e3);
  e1 = e1 / e1.norm();
  Vec3 e2 = cross(e3, e1);

  double sin_phip = 1.0 / xin;
  const GaussLegendre psi_gl = GaussLegendre::on_interval(n_polar, 0.0, kPi / 2);
  const GaussLegendre& rad = GaussLegendre::unit(n_radial);
  double wphi = 2.0 * kPi / n_azimuth;

  std::vector<double> buf(static_cast<size_t>(n_polar) * n_azimuth);
  parallel_for_except(buf.size(), [&](size_t idx) {
    int i = static_cast<int>(idx) / n_azimuth;
    int j = static_cast<int>(idx) % n_azimuth;
    double psi = psi_gl.nodes[i];
    // sin(phi) = sin(phi_+) sin(psi); the sqrt in rho_+- becomes smooth
    double sphi = sin_phip * std::sin(psi);
    double phi = std::asin(sphi);
    double cphi = std::cos(phi);
    double root = sin_phip * std::cos(psi);  // sqrt(1/|xi|^2 - sin^2 phi)
    double rho_m = lambda * xin * (cphi - root);
    double rho_p = lambda * xin * (cphi + root);
    // d(phi) = sin(phi_+) cos(psi) / cos(phi) d(psi)
    double dphi_dpsi = sin_phip * std::cos(psi) / cphi;
    double az = wphi * j;
    double ca = std::cos(az), sa = std::sin(az);
    Kahan<double> acc;
    for (int q = 0; q < n_radial; ++q) {
      double rho = 0.5 * (rho_p - rho_m) * rad.nodes[q] + 0.5 * (rho_p + rho_m);
      double wq = 0.5 * (rho_p - rho_m) * rad.weights[q];
      Vec3 dir = e1 * (sphi * ca) + e2 * (sphi * sa) + e3 * cphi;
      acc.add(wq * rho * rho * f(dir * rho));
    }
    buf[idx] = psi_gl.weights[i] * dphi_dpsi * sphi * wphi * acc.get();
  });
  return combine(buf);
}

// ---------------------------------------------------------------------------
// moment identity suite

namespace {

using Fn = std::function<double(const Vec3&)>;

void push(IdentityReport& rep, const std::string& name, double computed,
          double exact) {
  IdentityResult r;
  r.name = name;
  r.computed = computed;
  r.exact = exact;
  // identities with a zero right side are judged on normalized absolute error
  r.rel_error = std::abs(exact) > 1e-100
                    ? std::abs(computed - exact) / std::abs(exact)
                    : std::abs(computed);
  rep.max_rel_error = std::max(rep.max_rel_error, r.rel_error);
  rep.results.push_back(std::move(r));
}

// random tensor with given index symmetries
template <int N>
struct Tensor {
  std::vector<double> v;
  Tensor() : v(static_cast<size_t>(std::pow(3, N)), 0.0) {}
  double& at(const std::array<int, N>& idx) {
    size_t off = 0;
    for (int i : idx) off = off * 3 + i;
    return v[off];
  }
  double at(const std::array<int, N>& idx) const {
    size_t off = 0;
    for (int i : idx) off = off * 3 + i;
    return v[off];
  }
};

}  // namespace

IdentityReport verify_moment_identities(int degree, std::uint64_t seed,
                                        const std::vector<double>& r_values,
                                        const std::vector<double>& a_norms) {
  IdentityReport rep;
  auto sph = SphereRule::product_gauss(degree);
  BallRule ball = BallRule::product_gauss(sph, degree / 2 + 2);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const Vec3 origin{0, 0, 0};

  for (double r : r_values) {
    auto tag = [&](const std::string& s) {
      return s + " (r=" + std::to_string(r) + ")";
    };
    double r4 = std::pow(r, 4), r5 = std::pow(r, 5), r6 = std::pow(r, 6),
           r7 = std::pow(r, 7), r8 = std::pow(r, 8);

    // ball moments
    for (int i = 0; i < 3; ++i) {
      push(rep, tag("ball (y^" + std::to_string(i + 1) + ")^2"),
           integrate_ball([i](const Vec3& y) { return y[i] * y[i]; }, origin, r,
                          ball),
           4.0 * kPi / 15.0 * r5);
    }
    push(rep, tag("ball |y|^2"),
         integrate_ball([](const Vec3& y) { return y.norm2(); }, origin, r, ball),
         4.0 * kPi / 5.0 * r5);
    {
      Mat3 A = random_symmetric(rng);
      push(rep, tag("ball A_ij y^i y^j"),
           integrate_ball([&](const Vec3& y) { return quad_form(A, y, y); },
                          origin, r, ball),
           4.0 * kPi / 15.0 * r5 * A.trace());
    }
    push(rep, tag("ball (y^1)^4"),
         integrate_ball([](const Vec3& y) { return std::pow(y.x, 4); }, origin,
                        r, ball),
         4.0 * kPi / 35.0 * r7);
    push(rep, tag("ball (y^1)^2 (y^2)^2"),
         integrate_ball([](const Vec3& y) { return y.x * y.x * y.y * y.y; },
                        origin, r, ball),
         4.0 * kPi / 105.0 * r7);
    {
      // totally symmetric B_ijkl
      Tensor<4> B;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              std::array<int, 4> idx{i, j, k, l};
              std::sort(idx.begin(), idx.end());
              if (idx == std::array<int, 4>{i, j, k, l}) B.at(idx) = nd(rng);
            }
      auto Bsym = [&](int i, int j, int k, int l) {
        std::array<int, 4> idx{i, j, k, l};
        std::sort(idx.begin(), idx.end());
        return B.at(idx);
      };
      double trtr = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trtr += Bsym(i, i, j, j);
      push(rep, tag("ball B_ijkl y^i y^j y^k y^l (sym)"),
           integrate_ball(
               [&](const Vec3& y) {
                 double s = 0;
                 for (int i = 0; i < 3; ++i)
                   for (int j = 0; j < 3; ++j)
                     for (int k = 0; k < 3; ++k)
                       for (int l = 0; l < 3; ++l)
                         s += Bsym(i, j, k, l) * y[i] * y[j] * y[k] * y[l];
                 return s;
               },
               origin, r, ball),
           4.0 * kPi / 35.0 * r7 * trtr);
    }
    // odd ball moment vanishes
    push(rep, tag("ball y^1 y^2 y^3 |y|^2 + y^3 (odd)"),
         integrate_ball(
             [](const Vec3& y) { return y.x * y.y * y.z * y.norm2() + y.z; },
             origin, r, ball) /
             (4.0 * kPi / 3.0 * r * r * r),
         0.0);

    // sphere moments
    push(rep, tag("sphere (y^1)^2"),
         integrate_sphere([](const Vec3& y) { return y.x * y.x; }, origin, r, *sph),
         4.0 * kPi / 3.0 * r4);
    {
      Mat3 A = random_symmetric(rng);
      push(rep, tag("sphere A_ij y^i y^j"),
           integrate_sphere([&](const Vec3& y) { return quad_form(A, y, y); },
                            origin, r, *sph),
           4.0 * kPi / 3.0 * r4 * A.trace());
    }
    push(rep, tag("sphere (y^1)^4"),
         integrate_sphere([](const Vec3& y) { return std::pow(y.x, 4); },
                          origin, r, *sph),
         4.0 * kPi / 5.0 * r6);
    push(rep, tag("sphere (y^1)^2 (y^2)^2"),
         integrate_sphere([](const Vec3& y) { return y.x * y.x * y.y * y.y; },
                          origin, r, *sph),
         4.0 * kPi / 15.0 * r6);
    {
      // B symmetric in (1,2) and (3,4) separately
      Tensor<4> B;
      for (auto& x : B.v) x = nd(rng);
      auto Bs = [&](int i, int j, int k, int l) {
        double s = 0;
        s += B.at({i, j, k, l}) + B.at({j, i, k, l}) + B.at({i, j, l, k}) +
             B.at({j, i, l, k});
        return 0.25 * s;
      };
      double t1 = 0, t2 = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          t1 += Bs(i, i, j, j);
          t2 += Bs(i, j, i, j);
        }
      push(rep, tag("sphere B_ijkl y^4 (pair sym)"),
           integrate_sphere(
               [&](const Vec3& y) {
                 double s = 0;
                 for (int i = 0; i < 3; ++i)
                   for (int j = 0; j < 3; ++j)
                     for (int k = 0; k < 3; ++k)
                       for (int l = 0; l < 3; ++l)
                         s += Bs(i, j, k, l) * y[i] * y[j] * y[k] * y[l];
                 return s;
               },
               origin, r, *sph),
           4.0 * kPi / 15.0 * r6 * (t1 + 2.0 * t2));
    }
    push(rep, tag("sphere (y^1)^6"),
         integrate_sphere([](const Vec3& y) { return std::pow(y.x, 6); },
                          origin, r, *sph),
         4.0 * kPi / 7.0 * r8);
    push(rep, tag("sphere (y^1)^4 (y^2)^2"),
         integrate_sphere(
             [](const Vec3& y) { return std::pow(y.x, 4) * y.y * y.y; }, origin,
             r, *sph),
         4.0 * kPi / 35.0 * r8);
    push(rep, tag("sphere (y^1 y^2 y^3)^2"),
         integrate_sphere(
             [](const Vec3& y) { return std::pow(y.x * y.y * y.z, 2); }, origin,
             r, *sph),
         4.0 * kPi / 105.0 * r8);
    {
      // C symmetric in first four and last two indices
      Tensor<6> C;
      for (auto& x : C.v) x = nd(rng);
      auto Cs = [&](std::array<int, 6> idx) {
        std::array<int, 4> a{idx[0], idx[1], idx[2], idx[3]};
        std::array<int, 2> b{idx[4], idx[5]};
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        // average over permutations: sorting picks a canonical representative;
        // we symmetrize by assignment instead
        return C.at({a[0], a[1], a[2], a[3], b[0], b[1]});
      };
      double s1 = 0, s2 = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) {
            s1 += Cs({i, i, j, j, k, k});
            s2 += Cs({i, i, j, k, j, k});
          }
      push(rep, tag("sphere C_ijklmn y^6 (4+2 sym)"),
           integrate_sphere(
               [&](const Vec3& y) {
                 double s = 0;
                 for (int i = 0; i < 3; ++i)
                   for (int j = 0; j < 3; ++j)
                     for (int k = 0; k < 3; ++k)
                       for (int l = 0; l < 3; ++l)
                         for (int m = 0; m < 3; ++m)
                           for (int n = 0; n < 3; ++n)
                             s += Cs({i, j, k, l, m, n}) * y[i] * y[j] * y[k] *
                                  y[l] * y[m] * y[n];
                 return s;
               },
               origin, r, *sph),
           4.0 * kPi / 35.0 * r8 * (s1 + 4.0 * s2));
    }

    // auxiliary integrals with |a| values
    for (double an : a_norms) {
      std::normal_distribution<double> nd2(0.0, 1.0);
      Vec3 a{nd2(rng), nd2(rng), nd2(rng)};
      a = a * (an / a.norm());
      auto quad2 = [&](const Vec3& y) {
        double n2 = a.norm2() * y.norm2() - 3.0 * dot(a, y) * dot(a, y);
        return n2 / std::pow(an, 5);
      };
      push(rep,
           tag("sphere ((|a|^2|y|^2-3<a,y>^2)/|a|^5)^2 (|a|=" +
               std::to_string(an) + ")"),
           integrate_sphere([&](const Vec3& y) { return quad2(y) * quad2(y); },
                            origin, r, *sph),
           16.0 * kPi / 5.0 * r6 / std::pow(an, 6));
      Mat3 sig = random_symmetric(rng);
      double trs = sig.trace();
      push(rep,
           tag("sphere sigma(y,y)*quad (|a|=" + std::to_string(an) + ")"),
           integrate_sphere(
               [&](const Vec3& y) { return quad_form(sig, y, y) * quad2(y); },
               origin, r, *sph),
           8.0 * kPi / 15.0 * r6 / std::pow(an, 3) *
               (trs - 3.0 / (an * an) * quad_form(sig, a, a)));
      push(rep,
           tag("sphere traceless part squared (|a|=" + std::to_string(an) + ")"),
           integrate_sphere(
               [&](const Vec3& y) {
                 double v = quad_form(sig, y, y) - y.norm2() / 3.0 * trs;
                 return v * v;
               },
               origin, r, *sph),
           8.0 * kPi / 45.0 * r6 * (3.0 * sig.frobenius2() - trs * trs));
    }
  }
  // weights of the sphere rule sum to 4 pi
  {
    Kahan<double> acc;
    for (double w : sph->weights) acc.add(w);
    push(rep, "sphere rule weight sum", acc.get(), 4.0 * kPi);
  }
  return rep;
}

}  // namespace lsr
