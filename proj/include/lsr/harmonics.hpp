#pragma once

#include <memory>
#include <span>
#include <vector>

#include "lsr/quadrature.hpp"

namespace lsr {

// Real orthonormal spherical-harmonic basis evaluated on a SphereRule grid,
// together with first and second angular derivatives. Transforms are exact
// for band-limited fields when the rule's exactness degree is >= 2L.
class HarmonicBasis {
 public:
  HarmonicBasis(std::shared_ptr<const SphereRule> rule, int L);

  // Cached basis on the default product rule of exactness 2L (or better).
  static std::shared_ptr<const HarmonicBasis> get(int L);

  int degree_cap() const { return L_; }
  int n_coef() const { return (L_ + 1) * (L_ + 1); }
  const SphereRule& rule() const { return *rule_; }
  std::shared_ptr<const SphereRule> rule_ptr() const { return rule_; }

  static int index_of(int l, int m) { return l * l + (m + l); }
  int l_of(int idx) const { return l_of_[idx]; }

  std::vector<double> analyze(std::span<const double> values) const;
  std::vector<double> synthesize(std::span<const double> coefs) const;
  // value and (theta, phi) derivatives up to second order at every node
  void synthesize_with_derivs(std::span<const double> coefs,
                              std::vector<double>& u, std::vector<double>& ut,
                              std::vector<double>& up, std::vector<double>& utt,
                              std::vector<double>& utp,
                              std::vector<double>& upp) const;

  const std::vector<double>& Y() const { return Y_; }

 private:
  std::shared_ptr<const SphereRule> rule_;
  int L_;
  std::vector<int> l_of_;
  // row-major [node][coef]
  std::vector<double> Y_, Yt_, Yp_, Ytt_, Ytp_, Ypp_;
};

// A function on the unit sphere: harmonic coefficients up to the basis cap,
// with grid values synthesized on demand.
struct HarmonicField {
  std::shared_ptr<const HarmonicBasis> basis;
  std::vector<double> coefs;

  std::vector<double> values() const { return basis->synthesize(coefs); }
  double coef(int l, int m) const { return coefs[HarmonicBasis::index_of(l, m)]; }
  double l2_norm() const;
  double sup_norm() const;
};

HarmonicField analyze(std::shared_ptr<const HarmonicBasis> basis,
                      std::span<const double> values);

enum class Subspace { L0, L1, L2, GT1, GT2 };

HarmonicField project(const HarmonicField& f, Subspace s);
double subspace_l2_norm(const HarmonicField& f, Subspace s);

// Solves (Lap_{S_r} + 2/r^2) u = rhs with u orthogonal to the degree-1 kernel.
// Throws KernelViolation when rhs has a degree-1 component above tolerance.
HarmonicField invert_jacobi(const HarmonicField& rhs, double r,
                            double kernel_rel_tol = 1e-8);

// Lap_{S_r} f: coefficient-wise multiplication by -l(l+1)/r^2.
HarmonicField sphere_laplacian(const HarmonicField& f, double r);

}  // namespace lsr
