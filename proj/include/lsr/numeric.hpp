#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace lsr {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Dense symmetric 3x3, stored in full for simple index arithmetic.
struct Mat3 {
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

  static Mat3 identity() {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
    return r;
  }
  static Mat3 scaled_identity(double s) {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = s;
    return r;
  }
  double* operator[](int i) { return m[i]; }
  const double* operator[](int i) const { return m[i]; }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
    return r;
  }
  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
  Mat3 inverse() const {
    Mat3 r;
    double d = det();
    r.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
    r.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
    r.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
    r.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
    r.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
    r.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
    r.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
    r.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
    r.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
    return r;
  }
  double frobenius2() const {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
    return s;
  }
};

inline double quad_form(const Mat3& A, const Vec3& u, const Vec3& v) {
  return dot(u, A * v);
}

// 3x3 symmetric eigenvalues, ascending (cyclic Jacobi; plenty for n=3).
inline std::array<double, 3> sym_eigenvalues(const Mat3& A) {
  double a[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = 0.5 * (A.m[i][j] + A.m[j][i]);
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < 3; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::array<double, 3> ev = {a[0][0], a[1][1], a[2][2]};
  if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
  if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
  if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
  return ev;
}

// Neumaier compensated accumulator.
template <class T = double>
struct Kahan {
  T sum = 0, comp = 0;
  void add(T v) {
    T t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  T get() const { return sum + comp; }
};

// Central-difference Richardson combination: estimates with steps h and h/2,
// error order p (p = 2 for plain central differences).
inline double richardson(double d_h, double d_h2, int p = 2) {
  double f = std::pow(2.0, p);
  return (f * d_h2 - d_h) / (f - 1.0);
}

inline long double richardson_ld(long double d_h, long double d_h2, int p = 2) {
  long double f = powl(2.0L, p);
  return (f * d_h2 - d_h) / (f - 1.0L);
}

// Uniform random rotation (quaternion method) from a seeded engine.
inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  double q0 = nd(rng), q1 = nd(rng), q2 = nd(rng), q3 = nd(rng);
  double n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
  q0 /= n; q1 /= n; q2 /= n; q3 /= n;
  Mat3 R;
  R.m[0][0] = 1 - 2 * (q2 * q2 + q3 * q3);
  R.m[0][1] = 2 * (q1 * q2 - q0 * q3);
  R.m[0][2] = 2 * (q1 * q3 + q0 * q2);
  R.m[1][0] = 2 * (q1 * q2 + q0 * q3);
  R.m[1][1] = 1 - 2 * (q1 * q1 + q3 * q3);
  R.m[1][2] = 2 * (q2 * q3 - q0 * q1);
  R.m[2][0] = 2 * (q1 * q3 - q0 * q2);
  R.m[2][1] = 2 * (q2 * q3 + q0 * q1);
  R.m[2][2] = 1 - 2 * (q1 * q1 + q2 * q2);
  return R;
}

inline Mat3 random_symmetric(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat3 A;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) A.m[i][j] = A.m[j][i] = scale * nd(rng);
  return A;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace lsr
