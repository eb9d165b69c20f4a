#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace mf {

// Small fixed-capacity Euclidean vector with runtime dimension d <= 3.
// Everything in this project lives in d in {1,2,3}; keeping the storage
// inline avoids heap traffic in the particle and quadrature hot loops.
struct Vec {
  static constexpr int kMaxDim = 3;

  std::array<double, kMaxDim> c{0.0, 0.0, 0.0};
  int d = 0;

  Vec() = default;
  explicit Vec(int dim) : d(dim) { assert(dim >= 1 && dim <= kMaxDim); }
  Vec(std::initializer_list<double> xs) : d(static_cast<int>(xs.size())) {
    assert(d >= 1 && d <= kMaxDim);
    int i = 0;
    for (double x : xs) c[i++] = x;
  }

  static Vec zero(int dim) { return Vec(dim); }

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < d; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < d; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < d; ++i) c[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator/(Vec a, double s) { return a *= 1.0 / s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.d != b.d) return false;
    for (int i = 0; i < a.d; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i) s += a.c[i] * b.c[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

inline Vec normalized(const Vec& a) {
  double n = norm(a);
  return a / n;
}

inline bool is_finite(const Vec& a) {
  for (int i = 0; i < a.d; ++i)
    if (!std::isfinite(a.c[i])) return false;
  return true;
}

using Cloud = std::vector<Vec>;

}  // namespace mf
