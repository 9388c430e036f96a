#pragma once
// Truncated trivariate Taylor arithmetic ("jets") of total degree <= N.
// Used for closed-form ellipsoid potentials and as a derivative oracle in tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dribem {

// Multi-index bookkeeping shared by jets and derivative tables: all (i,j,k)
// with i+j+k <= N, sorted by total degree, then lexicographically.
constexpr int jet_num_coeffs(int n) { return (n + 1) * (n + 2) * (n + 3) / 6; }

template <int N>
struct JetTables {
  static constexpr int NC = jet_num_coeffs(N);
  std::array<std::array<int8_t, 3>, NC> exp{};
  // dense lookup (i + (N+1)*(j + (N+1)*k)) -> flat index, -1 if degree > N
  std::array<int16_t, (N + 1) * (N + 1) * (N + 1)> lut{};
  struct ProdTerm { int16_t a, b, r; };
  std::vector<ProdTerm> prod;

  JetTables() {
    for (auto& v : lut) v = -1;
    int n = 0;
    for (int d = 0; d <= N; ++d)
      for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j) {
          int k = d - i - j;
          exp[n] = {int8_t(i), int8_t(j), int8_t(k)};
          lut[i + (N + 1) * (j + (N + 1) * k)] = int16_t(n);
          ++n;
        }
    for (int a = 0; a < NC; ++a)
      for (int b = 0; b < NC; ++b) {
        int i = exp[a][0] + exp[b][0];
        int j = exp[a][1] + exp[b][1];
        int k = exp[a][2] + exp[b][2];
        if (i + j + k <= N)
          prod.push_back({int16_t(a), int16_t(b),
                          lut[i + (N + 1) * (j + (N + 1) * k)]});
      }
  }

  int index(int i, int j, int k) const { return lut[i + (N + 1) * (j + (N + 1) * k)]; }

  static const JetTables& get() {
    static const JetTables t;
    return t;
  }
};

template <int N>
class Jet3 {
 public:
  static constexpr int NC = jet_num_coeffs(N);
  std::array<double, NC> c{};

  Jet3() = default;
  explicit Jet3(double v) { c[0] = v; }

  static Jet3 variable(double v, int axis) {
    Jet3 r(v);
    if constexpr (N >= 1) r.c[1 + axis] = 1.0;
    return r;
  }

  double value() const { return c[0]; }

  // partial derivative d^(i+j+k) f / dx^i dy^j dz^k
  double deriv(int i, int j, int k) const {
    int idx = JetTables<N>::get().index(i, j, k);
    if (idx < 0) throw std::out_of_range("jet derivative order exceeds truncation");
    double fact = 1.0;
    for (int m = 2; m <= i; ++m) fact *= m;
    for (int m = 2; m <= j; ++m) fact *= m;
    for (int m = 2; m <= k; ++m) fact *= m;
    return c[idx] * fact;
  }

  Jet3& operator+=(const Jet3& o) { for (int i = 0; i < NC; ++i) c[i] += o.c[i]; return *this; }
  Jet3& operator-=(const Jet3& o) { for (int i = 0; i < NC; ++i) c[i] -= o.c[i]; return *this; }
  Jet3& operator*=(double s) { for (auto& x : c) x *= s; return *this; }
  Jet3& operator+=(double s) { c[0] += s; return *this; }
  Jet3& operator-=(double s) { c[0] -= s; return *this; }

  friend Jet3 operator+(Jet3 a, const Jet3& b) { a += b; return a; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { a -= b; return a; }
  friend Jet3 operator+(Jet3 a, double s) { a += s; return a; }
  friend Jet3 operator+(double s, Jet3 a) { a += s; return a; }
  friend Jet3 operator-(Jet3 a, double s) { a -= s; return a; }
  friend Jet3 operator-(double s, const Jet3& a) { Jet3 r = -a; r += s; return r; }
  friend Jet3 operator*(Jet3 a, double s) { a *= s; return a; }
  friend Jet3 operator*(double s, Jet3 a) { a *= s; return a; }
  Jet3 operator-() const { Jet3 r; for (int i = 0; i < NC; ++i) r.c[i] = -c[i]; return r; }

  friend Jet3 operator*(const Jet3& a, const Jet3& b) {
    Jet3 r;
    for (const auto& t : JetTables<N>::get().prod)
      r.c[t.r] += a.c[t.a] * b.c[t.b];
    return r;
  }

  // g(f) where g has Taylor coefficients d[k] about f.value(); Horner in the
  // nilpotent part p = f - f0.
  static Jet3 compose(const Jet3& f, const double (&d)[N + 1]) {
    Jet3 p = f;
    p.c[0] = 0.0;
    Jet3 r(d[N]);
    for (int k = N - 1; k >= 0; --k) {
      r = r * p;
      r.c[0] += d[k];
    }
    return r;
  }
};

namespace jetfun {

// Taylor coefficients of x^alpha about x0 (generalized binomial)
template <int N>
Jet3<N> pow(const Jet3<N>& f, double alpha) {
  double f0 = f.value();
  double d[N + 1];
  double coef = std::pow(f0, alpha);
  d[0] = coef;
  for (int k = 1; k <= N; ++k) {
    coef *= (alpha - (k - 1)) / (k * f0);
    d[k] = coef;
  }
  return Jet3<N>::compose(f, d);
}

template <int N>
Jet3<N> sqrt(const Jet3<N>& f) { return pow(f, 0.5); }

template <int N>
Jet3<N> recip(const Jet3<N>& f) { return pow(f, -1.0); }

template <int N>
Jet3<N> operator/(const Jet3<N>& a, const Jet3<N>& b) { return a * recip(b); }

template <int N>
Jet3<N> log(const Jet3<N>& f) {
  double f0 = f.value();
  double d[N + 1];
  d[0] = std::log(f0);
  double s = 1.0;
  for (int k = 1; k <= N; ++k) {
    d[k] = s / (k * std::pow(f0, k));
    s = -s;
  }
  return Jet3<N>::compose(f, d);
}

// atan(f0+t): series of the derivative 1/((1+f0^2) + 2 f0 t + t^2) by
// synthetic division, then termwise integration.
template <int N>
Jet3<N> atan(const Jet3<N>& f) {
  double f0 = f.value();
  double A = 1.0 + f0 * f0, B = 2.0 * f0, C = 1.0;
  double e[N + 1];  // coefficients of d/dt atan(f0+t), orders 0..N-1 used
  e[0] = 1.0 / A;
  for (int k = 1; k <= N; ++k)
    e[k] = -(B * e[k - 1] + (k >= 2 ? C * e[k - 2] : 0.0)) / A;
  double d[N + 1];
  d[0] = std::atan(f0);
  for (int k = 1; k <= N; ++k) d[k] = e[k - 1] / k;
  return Jet3<N>::compose(f, d);
}

}  // namespace jetfun

}  // namespace dribem
