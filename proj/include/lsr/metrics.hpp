#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lsr/errors.hpp"
#include "lsr/numeric.hpp"

namespace lsr {

struct Interval {
  double lo = 0, hi = 0;  // hi may be +inf
};

// Symmetric 2-tensor perturbation field with optional analytic derivatives.
// eval returns d^I sigma_ij at x for the multi-index I = (ix, iy, iz);
// |I| up to derivative_order() is available analytically, higher orders throw.
class SigmaField {
 public:
  virtual ~SigmaField() = default;
  virtual Mat3 eval(const Vec3& x, int ix = 0, int iy = 0, int iz = 0) const = 0;
  virtual int derivative_order() const { return 0; }
  // C_I with |d_I sigma| <= C_I |x|^(-2-|I|) for |x| >= support_radius_inner.
  virtual double decay_constant(int order) const = 0;
  virtual double support_radius_inner() const { return 0.0; }
};

// sigma_ij(x) = sum_q A^q_ij exp(-|x - c_q|^2 / w_q^2), truncated to zero where
// every Gaussian falls below 1e-250 (so the field is compactly supported).
// Derivatives of any order via Hermite polynomials.
class GaussianSigma : public SigmaField {
 public:
  struct Term {
    Mat3 amplitude;
    Vec3 center;
    double width = 1.0;
  };
  explicit GaussianSigma(std::vector<Term> terms);
  Mat3 eval(const Vec3& x, int ix = 0, int iy = 0, int iz = 0) const override;
  int derivative_order() const override { return 4; }
  double decay_constant(int order) const override;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

// sigma_ij(x) = M_ij * s0^2 / (s0^2 + |x|^2): smooth global |x|^-2 decay.
class RationalSigma : public SigmaField {
 public:
  RationalSigma(const Mat3& coeff, double scale);
  Mat3 eval(const Vec3& x, int ix = 0, int iy = 0, int iz = 0) const override;
  int derivative_order() const override { return 2; }
  double decay_constant(int order) const override;

 private:
  Mat3 coeff_;
  double s0_;
};

// Wraps the difference between a conformal metric and Schwarzschild of the
// same mass as a sigma-field (values only). Used for cross-checking the
// closed-form curvature path against the generic FD path.
class MetricSpec;
std::shared_ptr<SigmaField> conformal_difference_sigma(const MetricSpec& spec);

// Radial conformal correction: S <= 0 with decay order p in {4, 5}, and the
// derived correction phi(r) = (1/r) int_r^inf (rho - r) rho S(rho) drho.
// phi and phi' are evaluated from cached per-interval Legendre expansions of
// the antiderivatives (spectrally accurate, long double accumulation).
class RadialProfile {
 public:
  RadialProfile(std::function<double(double)> S, std::vector<Interval> support,
                int decay_order);

  double S(double r) const { return S_(r); }
  long double phi(long double r) const;
  long double phi_prime(long double r) const;
  // double-precision fast path for metric evaluation hot loops
  double phi_d(double r) const;
  const std::vector<Interval>& support() const { return support_; }
  int decay_order() const { return decay_order_; }

  // Bound on |phi| contributions omitted by pulse truncation; 0 when exact.
  double truncation_tail_bound(double r) const;
  void set_truncation_tail(std::function<double(double)> bound);

 private:
  struct Segment {
    double lo, hi;                       // finite; infinite tails are mapped
    bool mapped_tail = false;            // [lo, inf) via v = lo/rho
    std::vector<long double> coef_r2s;   // Legendre coeffs of rho^2 S (mapped var)
    std::vector<long double> coef_rs;    // Legendre coeffs of rho   S
    std::vector<double> coef_r2s_d, coef_rs_d;
    long double full_r2s = 0, full_rs = 0;
  };
  void build_segment(Segment& seg);
  // integral over [r, seg.hi] of rho^2 S and rho S
  void partial(const Segment& seg, long double r, long double& m2,
               long double& m1) const;

  std::function<double(double)> S_;
  std::vector<Interval> support_;
  int decay_order_;
  std::vector<Segment> segments_;
  std::vector<long double> suffix_r2s_, suffix_rs_;  // sums over segments >= i
  std::function<double(double)> tail_bound_;
};

enum class MetricKind { Flat, Schwarzschild, RadialConformal, GeneralSigma };

// A chart-at-infinity metric g = (1 + m/2|x|)^4 delta + sigma, in conformal
// flavors (sigma absorbed into a radial profile) or with a general sigma field.
class MetricSpec {
 public:
  MetricKind kind = MetricKind::Schwarzschild;
  double mass = 2.0;
  double r_min = 0.5;
  std::shared_ptr<const RadialProfile> profile;  // RadialConformal
  std::shared_ptr<const SigmaField> sigma;       // GeneralSigma
  std::string name = "schwarzschild";

  bool is_conformal() const { return kind != MetricKind::GeneralSigma; }
  // 1 + m/(2r) + phi(r); phi absent outside RadialConformal. Flat: 1.
  long double conformal_factor(long double r) const;
  long double conformal_factor_prime(long double r) const;
  double conformal_factor_d(double r) const;

  static MetricSpec flat();
  static MetricSpec schwarzschild(double mass = 2.0);
  static MetricSpec radial_conformal(double mass,
                                     std::shared_ptr<const RadialProfile> p,
                                     double r_min, std::string name);
  static MetricSpec general_sigma(double mass,
                                  std::shared_ptr<const SigmaField> s,
                                  double r_min, std::string name);
  // "flat" | "schwarzschild" | "thm13" (A = 8) | "thm17"
  static MetricSpec builtin(const std::string& name);
};

// g_ij(x). Throws ChartDomainError for |x| < r_min.
Mat3 metric_at(const MetricSpec& spec, const Vec3& x);
// Long double variant used by the FD curvature path.
void metric_at_ld(const MetricSpec& spec, const Vec3& x, long double g[3][3]);

struct PhiResult {
  double phi = 0;
  double phi_prime = 0;
};
// Adaptive-quadrature evaluation of phi(r), independent of the cached path.
PhiResult phi_from_S(const std::function<double(double)>& S,
                     const std::vector<Interval>& support, double r,
                     double tol = 1e-12, int max_depth = 48);

// Scalar curvature. Closed form -8 u^-5 S(r) on conformal metrics; full FD
// curvature of metric_at on GeneralSigma.
double scalar_curvature(const MetricSpec& spec, const Vec3& x);
// Generic FD path regardless of kind (cross-check route).
double scalar_curvature_fd(const MetricSpec& spec, const Vec3& x);

// Euclidean Laplacian of R: radial closed-form FD on conformal metrics,
// 3-D stencil of scalar_curvature otherwise.
double laplacian_scalar_curvature(const MetricSpec& spec, const Vec3& x);
// 3-D stencil path regardless of kind (cross-check route).
double laplacian_scalar_curvature_fd3d(const MetricSpec& spec, const Vec3& x);

// Origin-radial derivatives at x, for the radial-variation predictors.
double radial_derivative_R(const MetricSpec& spec, const Vec3& x);
double radial_derivative_laplacian_R(const MetricSpec& spec, const Vec3& x);

// chi(t) = exp(-1/((t-a)(b-t))) on (a,b), zero elsewhere.
std::function<double(double)> chi_bump(double a, double b);
// chi(t) = chi0(t) (7-t)/chi0(5) with chi0 = chi_bump(4,6): chi(5) = 2 and
// chi'(5) = -1 exactly.
std::function<double(double)> chi_bump_slope(double a = 4.0, double b = 6.0);

// Pulsed profiles. S(r) = -A sum_k 10^{-4k} chi(10^{-k} r), chi = chi_bump(3,4);
// truncated at k_max, with the omitted-tail bound recorded on the profile.
std::shared_ptr<RadialProfile> pulse_S_thm13(double A, int k_max = 8);
// S(r) = -sum_k 10^{-5k} chi(10^{-k} r), chi = chi_bump_slope(4,6).
std::shared_ptr<RadialProfile> pulse_S_thm17(int k_max = 6);

// FD steps: first derivatives per chart scale; second derivatives use a larger
// step (roundoff floor of second differences) and long double evaluation.
inline double fd_step1(double xnorm) { return std::max(1e-4 * xnorm, 1e-5); }
inline double fd_step2(double xnorm) { return std::max(2.6e-3 * xnorm, 1e-4); }

}  // namespace lsr
