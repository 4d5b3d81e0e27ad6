#include "lsr/harmonics.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lsr/errors.hpp"

namespace lsr {

namespace {

// Fully normalized associated Legendre values and theta-derivatives at one
// node: p[l][m] with int_{S^2} (p_lm trig_m)^2 = 1 conventions.
void normalized_legendre(int L, double ct, double st,
                         std::vector<std::vector<double>>& p,
                         std::vector<std::vector<double>>& dp) {
  p.assign(L + 1, {});
  dp.assign(L + 1, {});
  for (int l = 0; l <= L; ++l) {
    p[l].assign(l + 1, 0.0);
    dp[l].assign(l + 1, 0.0);
  }
  p[0][0] = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 1; m <= L; ++m)
    p[m][m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * p[m - 1][m - 1];
  for (int m = 0; m < L; ++m)
    p[m + 1][m] = std::sqrt(2.0 * m + 3.0) * ct * p[m][m];
  for (int m = 0; m <= L; ++m)
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                           (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p[l][m] = a * (ct * p[l - 1][m] - b * p[l - 2][m]);
    }
  for (int l = 0; l <= L; ++l)
    for (int m = 0; m <= l; ++m) {
      double below = (l >= 1 && m <= l - 1) ? p[l - 1][m] : 0.0;
      double c = (l >= 1)
                     ? std::sqrt((double(l) * l - double(m) * m) * (2.0 * l + 1.0) /
                                 (2.0 * l - 1.0))
                     : 0.0;
      dp[l][m] = (l * ct * p[l][m] - c * below) / st;
    }
}

}  // namespace

HarmonicBasis::HarmonicBasis(std::shared_ptr<const SphereRule> rule, int L)
    : rule_(std::move(rule)), L_(L) {
  if (rule_->exactness_degree < 2 * L)
    throw std::invalid_argument(
        "HarmonicBasis: rule exactness must be >= 2L for exact transforms");
  size_t nn = rule_->size();
  int nc = n_coef();
  l_of_.resize(nc);
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m) l_of_[index_of(l, m)] = l;
  Y_.assign(nn * nc, 0.0);
  Yt_.assign(nn * nc, 0.0);
  Yp_.assign(nn * nc, 0.0);
  Ytt_.assign(nn * nc, 0.0);
  Ytp_.assign(nn * nc, 0.0);
  Ypp_.assign(nn * nc, 0.0);

  parallel_for(nn, [&](size_t k) {
    double ct = rule_->cos_theta[k], st = rule_->sin_theta[k];
    double ph = rule_->phi_az[k];
    std::vector<std::vector<double>> p, dp;
    normalized_legendre(L_, ct, st, p, dp);
    double* Y = &Y_[k * nc];
    double* Yt = &Yt_[k * nc];
    double* Yp = &Yp_[k * nc];
    double* Ytt = &Ytt_[k * nc];
    double* Ytp = &Ytp_[k * nc];
    double* Ypp = &Ypp_[k * nc];
    const double sqrt2 = std::sqrt(2.0);
    for (int l = 0; l <= L_; ++l)
      for (int m = -l; m <= l; ++m) {
        int am = std::abs(m);
        double pl = p[l][am], dpl = dp[l][am];
        // p'' from the associated Legendre equation
        double d2pl = -ct / st * dpl -
                      (l * (l + 1.0) - double(am) * am / (st * st)) * pl;
        double az, daz;  // azimuthal factor and its phi-derivative scale
        if (m == 0) {
          az = 1.0;
          daz = 0.0;
        } else if (m > 0) {
          az = sqrt2 * std::cos(m * ph);
          daz = -sqrt2 * m * std::sin(m * ph);
        } else {
          az = sqrt2 * std::sin(am * ph);
          daz = sqrt2 * am * std::cos(am * ph);
        }
        int idx = index_of(l, m);
        Y[idx] = pl * az;
        Yt[idx] = dpl * az;
        Yp[idx] = pl * daz;
        Ytt[idx] = d2pl * az;
        Ytp[idx] = dpl * daz;
        Ypp[idx] = -double(am) * am * pl * az;
      }
  });
}

std::shared_ptr<const HarmonicBasis> HarmonicBasis::get(int L) {
  static std::map<int, std::shared_ptr<const HarmonicBasis>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(L);
  if (it == cache.end()) {
    auto rule = SphereRule::product_gauss(2 * L);
    it = cache.emplace(L, std::make_shared<HarmonicBasis>(rule, L)).first;
  }
  return it->second;
}

std::vector<double> HarmonicBasis::analyze(std::span<const double> values) const {
  if (values.size() != rule_->size())
    throw std::invalid_argument("analyze: grid size mismatch");
  int nc = n_coef();
  size_t nn = rule_->size();
  std::vector<double> c(nc);
  parallel_for(static_cast<size_t>(nc), [&](size_t j) {
    long double acc = 0.0L;
    for (size_t k = 0; k < nn; ++k)
      acc += static_cast<long double>(rule_->weights[k]) * values[k] *
             Y_[k * nc + j];
    c[j] = static_cast<double>(acc);
  });
  return c;
}

std::vector<double> HarmonicBasis::synthesize(std::span<const double> coefs) const {
  if (static_cast<int>(coefs.size()) != n_coef())
    throw std::invalid_argument("synthesize: coefficient size mismatch");
  int nc = n_coef();
  size_t nn = rule_->size();
  std::vector<double> v(nn);
  parallel_for(nn, [&](size_t k) {
    long double acc = 0.0L;
    const double* row = &Y_[k * nc];
    for (int j = 0; j < nc; ++j) acc += static_cast<long double>(row[j]) * coefs[j];
    v[k] = static_cast<double>(acc);
  });
  return v;
}

void HarmonicBasis::synthesize_with_derivs(
    std::span<const double> coefs, std::vector<double>& u,
    std::vector<double>& ut, std::vector<double>& up, std::vector<double>& utt,
    std::vector<double>& utp, std::vector<double>& upp) const {
  int nc = n_coef();
  size_t nn = rule_->size();
  u.resize(nn); ut.resize(nn); up.resize(nn);
  utt.resize(nn); utp.resize(nn); upp.resize(nn);
  parallel_for(nn, [&](size_t k) {
    long double a0 = 0, a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0;
    const double* y = &Y_[k * nc];
    const double* yt = &Yt_[k * nc];
    const double* yp = &Yp_[k * nc];
    const double* ytt = &Ytt_[k * nc];
    const double* ytp = &Ytp_[k * nc];
    const double* ypp = &Ypp_[k * nc];
    for (int j = 0; j < nc; ++j) {
      long double c = coefs[j];
      a0 += y[j] * c;
      a1 += yt[j] * c;
      a2 += yp[j] * c;
      a3 += ytt[j] * c;
      a4 += ytp[j] * c;
      a5 += ypp[j] * c;
    }
    u[k] = static_cast<double>(a0);
    ut[k] = static_cast<double>(a1);
    up[k] = static_cast<double>(a2);
    utt[k] = static_cast<double>(a3);
    utp[k] = static_cast<double>(a4);
    upp[k] = static_cast<double>(a5);
  });
}

double HarmonicField::l2_norm() const {
  Kahan<double> acc;
  for (double c : coefs) acc.add(c * c);
  return std::sqrt(acc.get());
}

double HarmonicField::sup_norm() const {
  auto v = values();
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

HarmonicField analyze(std::shared_ptr<const HarmonicBasis> basis,
                      std::span<const double> values) {
  HarmonicField f;
  f.coefs = basis->analyze(values);
  f.basis = std::move(basis);
  return f;
}

namespace {

bool in_subspace(int l, Subspace s) {
  switch (s) {
    case Subspace::L0: return l == 0;
    case Subspace::L1: return l == 1;
    case Subspace::L2: return l == 2;
    case Subspace::GT1: return l > 1;
    case Subspace::GT2: return l > 2;
  }
  return false;
}

}  // namespace

HarmonicField project(const HarmonicField& f, Subspace s) {
  HarmonicField g = f;
  for (size_t j = 0; j < g.coefs.size(); ++j)
    if (!in_subspace(f.basis->l_of(static_cast<int>(j)), s)) g.coefs[j] = 0.0;
  return g;
}

double subspace_l2_norm(const HarmonicField& f, Subspace s) {
  Kahan<double> acc;
  for (size_t j = 0; j < f.coefs.size(); ++j)
    if (in_subspace(f.basis->l_of(static_cast<int>(j)), s))
      acc.add(f.coefs[j] * f.coefs[j]);
  return std::sqrt(acc.get());
}

HarmonicField invert_jacobi(const HarmonicField& rhs, double r,
                            double kernel_rel_tol) {
  double k1 = subspace_l2_norm(rhs, Subspace::L1);
  double total = rhs.l2_norm();
  if (k1 > kernel_rel_tol * std::max(total, 1e-280))
    throw KernelViolation("invert_jacobi: rhs has a degree-1 kernel component");
  HarmonicField u = rhs;
  for (size_t j = 0; j < u.coefs.size(); ++j) {
    int l = rhs.basis->l_of(static_cast<int>(j));
    if (l == 1) {
      u.coefs[j] = 0.0;
      continue;
    }
    double eig = (2.0 - l * (l + 1.0)) / (r * r);
    u.coefs[j] = rhs.coefs[j] / eig;
  }
  return u;
}

HarmonicField sphere_laplacian(const HarmonicField& f, double r) {
  HarmonicField g = f;
  for (size_t j = 0; j < g.coefs.size(); ++j) {
    int l = f.basis->l_of(static_cast<int>(j));
    g.coefs[j] *= -l * (l + 1.0) / (r * r);
  }
  return g;
}

}  // namespace lsr
