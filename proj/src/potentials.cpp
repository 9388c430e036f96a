#include <dribem/potentials.hpp>

#include <dribem/jet.hpp>
#include <dribem/quadrature.hpp>

#include <cmath>
#include <iostream>
#include <mutex>
#include <stdexcept>

namespace dribem {

namespace {

double factorial3(int i, int j, int k) {
  double f = 1.0;
  for (int m = 2; m <= i; ++m) f *= m;
  for (int m = 2; m <= j; ++m) f *= m;
  for (int m = 2; m <= k; ++m) f *= m;
  return f;
}

// R(m,n) = int_{t0}^inf t^(-2m) (t^2+d)^(-n) dt for m+n <= 4. The two
// families below switch on |d|/t0^2: a power series in d near the sphere
// limit, closed forms plus recurrences otherwise.
struct RTable {
  double R[5][5] = {};
};

RTable r_table(double t0, double d) {
  RTable T;
  const double t02 = t0 * t0;
  if (std::abs(d) <= 0.1 * t02) {
    for (int m = 0; m <= 4; ++m)
      for (int n = 0; n <= 4 - m; ++n) {
        if (m + n == 0) continue;
        // sum_j (-d)^j C(n+j-1, j) t0^(1-2(m+n+j)) / (2(m+n+j)-1)
        double binom = 1.0, dpow = 1.0;
        double base = std::pow(t0, 1 - 2 * (m + n));
        double sum = 0.0;
        for (int j = 0; j < 48; ++j) {
          if (j > 0) {
            binom *= double(n + j - 1) / j;
            dpow *= -d / t02;
          }
          double term = binom * dpow * base / (2 * (m + n + j) - 1);
          sum += term;
          if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        T.R[m][n] = sum;
      }
    return T;
  }
  const double ael2 = t02 + d;  // equatorial axis squared plus lambda
  if (d > 0.0) {
    double sd = std::sqrt(d);
    T.R[0][1] = std::atan(sd / t0) / sd;
  } else {
    double sd = std::sqrt(-d);
    // stable log argument: t0 - sd = ael2 / (t0 + sd)
    T.R[0][1] = 0.5 / sd * std::log((t0 + sd) * (t0 + sd) / ael2);
  }
  for (int n = 1; n <= 3; ++n)
    T.R[0][n + 1] = ((2 * n - 1) * T.R[0][n] - t0 / std::pow(ael2, n)) / (2 * n * d);
  for (int m = 1; m <= 4; ++m) T.R[m][0] = std::pow(t0, 1 - 2 * m) / (2 * m - 1);
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 4 - m; ++n) T.R[m][n] = (T.R[m][n - 1] - T.R[m - 1][n]) / d;
  return T;
}

// Taylor coefficients of (A0 + h)^alpha for degrees 0..deg
void binom_series(double A0, double alpha, double* out, int deg) {
  double c = std::pow(A0, alpha);
  out[0] = c;
  for (int k = 1; k <= deg; ++k) {
    c *= (alpha - (k - 1)) / (k * A0);
    out[k] = c;
  }
}

double lambda_newton(const Vec3& y, const Vec3& a) {
  double lam = y.squaredNorm();
  double amax2 = a.maxCoeff() * a.maxCoeff();
  for (int it = 0; it < 100; ++it) {
    double F = -1.0, Fp = 0.0;
    for (int i = 0; i < 3; ++i) {
      double den = a[i] * a[i] + lam;
      F += y[i] * y[i] / den;
      Fp -= y[i] * y[i] / (den * den);
    }
    double step = F / Fp;
    lam -= step;
    if (std::abs(step) <= 1e-15 * (amax2 + lam)) break;
  }
  return std::max(lam, 0.0);
}

// turns master-potential jets M0, M1, M2 into the ten potentials and their
// derivatives. Identities used (a_p are the semi-axes, all in Taylor space):
//   phi    = M0
//   phi_p  = -(a_p^2/2) d_p M1
//   phi_pq = (a_p^2 a_q^2/8) d_p d_q M2 + delta_pq (a_p^2/2) M1
template <int NN>
void extract(PotentialSet& out, const Jet3<NN>& M0, const Jet3<NN>& M1, const Jet3<NN>& M2,
             const Vec3& a, int D) {
  const auto& tb = JetTables<NN>::get();
  out.order = D;
  const int nout = jet_num_coeffs(D);
  for (int n = 0; n < nout; ++n) {
    const int e0 = tb.exp[n][0], e1 = tb.exp[n][1], e2 = tb.exp[n][2];
    const double fct = factorial3(e0, e1, e2);
    out.phi[n] = fct * M0.c[n];
    for (int p = 0; p < 3; ++p) {
      int ep[3] = {e0, e1, e2};
      ep[p] += 1;
      int i1 = tb.index(ep[0], ep[1], ep[2]);
      out.phi_p[p][n] = -(0.5 * a[p] * a[p]) * fct * ep[p] * M1.c[i1];
    }
    for (int p = 0; p < 3; ++p)
      for (int q = p; q < 3; ++q) {
        int epq[3] = {e0, e1, e2};
        epq[p] += 1;
        double w1 = epq[p];
        epq[q] += 1;
        double w2 = epq[q];
        int i2 = tb.index(epq[0], epq[1], epq[2]);
        double v = (a[p] * a[p] * a[q] * a[q] / 8.0) * fct * w1 * w2 * M2.c[i2];
        if (p == q) v += (0.5 * a[p] * a[p]) * fct * M1.c[n];
        out.phi_pq[sym_index(p, q)][n] = v;
      }
  }
}

// sphere / axisymmetric spheroid (a1 = a2 = ae, pole axis a3): master
// potentials M_k = pi ae^2 a3/(k+1) * sum multinomial (-1)^(i+j) rho^2i z^2j
// I(i,j)(lambda) with I(i,j) = 2 R(j, i+1)
template <int NN>
void fill_spheroid(PotentialSet& out, const Vec3& y, double ae, double a3, int D) {
  using J = Jet3<NN>;
  const double ae2 = ae * ae, a32 = a3 * a3;
  J yj[3];
  for (int i = 0; i < 3; ++i) yj[i] = J::variable(y[i], i);
  J rho2 = yj[0] * yj[0] + yj[1] * yj[1];
  J z2 = yj[2] * yj[2];

  double xi2 = (y.x() * y.x() + y.y() * y.y()) / ae2 + y.z() * y.z() / a32;
  out.interior = xi2 <= 1.0;
  J L(0.0);
  if (!out.interior) {
    // largest root of lam^2 + b lam + c, branch chosen to avoid cancellation
    J b = (ae2 + a32) - rho2 - z2;
    J cc = (ae2 * a32) - rho2 * a32 - z2 * ae2;
    J sq = jetfun::sqrt(b * b - cc * 4.0);
    if (b.value() < 0.0)
      L = (sq - b) * 0.5;
    else
      L = cc * jetfun::recip((b + sq) * (-0.5));
  }
  out.lambda = L.value();

  const double lam = L.value();
  const double d = ae2 - a32;
  const double t0 = std::sqrt(a32 + lam);
  RTable RT = r_table(t0, d);

  J Iij[4][4];
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3 - i; ++j) {
      double tay[NN + 1];
      tay[0] = 2.0 * RT.R[j][i + 1];
      // dI/dlam = -(ae2+lam)^(-1-i) (a32+lam)^(-1/2-j); higher orders from
      // the product of the two binomial series
      double fa[NN], fb[NN];
      binom_series(ae2 + lam, -1.0 - i, fa, NN - 1);
      binom_series(a32 + lam, -0.5 - j, fb, NN - 1);
      for (int n = 1; n <= NN; ++n) {
        double s = 0.0;
        for (int u = 0; u < n; ++u) s += fa[u] * fb[n - 1 - u];
        tay[n] = -s / n;
      }
      Iij[i][j] = J::compose(L, tay);
    }

  J rp[4], zp[4];
  rp[0] = J(1.0);
  zp[0] = J(1.0);
  for (int i = 1; i <= 3; ++i) {
    rp[i] = rp[i - 1] * rho2;
    zp[i] = zp[i - 1] * z2;
  }

  const double fact[5] = {1, 1, 2, 6, 24};
  J M[3];
  for (int k = 0; k <= 2; ++k) {
    const int kp = k + 1;
    J sum(0.0);
    for (int i = 0; i <= kp; ++i)
      for (int j = 0; j <= kp - i; ++j) {
        double mult = fact[kp] / (fact[i] * fact[j] * fact[kp - i - j]);
        double sgn = ((i + j) % 2) ? -1.0 : 1.0;
        sum += (mult * sgn) * (rp[i] * (zp[j] * Iij[i][j]));
      }
    M[k] = sum * (M_PI * ae2 * a3 / kp);
  }
  extract<NN>(out, M[0], M[1], M[2], Vec3(ae, ae, a3), D);
}

std::once_flag triaxial_warned;

// general triaxial shape: numerical integration of the substituted master
// integrals M_k = pref * int_0^inf E(x, lambda(x)+v)^(k+1) / Delta dv carried
// out in jet arithmetic, plus a 1/sqrt tail transform
template <int NN>
void fill_triaxial(PotentialSet& out, const Vec3& y, const Vec3& a, int D) {
  std::call_once(triaxial_warned, [] {
    std::cerr << "note: triaxial ellipsoid potentials use numerical master-integral "
                 "quadrature; expect a slower run\n";
  });
  using J = Jet3<NN>;
  const double a2[3] = {a.x() * a.x(), a.y() * a.y(), a.z() * a.z()};
  J yj[3], y2[3];
  for (int i = 0; i < 3; ++i) {
    yj[i] = J::variable(y[i], i);
    y2[i] = yj[i] * yj[i];
  }
  double xi2 = 0.0;
  for (int i = 0; i < 3; ++i) xi2 += y[i] * y[i] / a2[i];
  out.interior = xi2 <= 1.0;
  double lam0 = 0.0;
  J L(0.0);
  if (!out.interior) {
    lam0 = lambda_newton(y, a);
    L = J(lam0);
    // implicit-function jet refinement of sum y_i^2/(a_i^2+L) = 1
    for (int it = 0; it < 5; ++it) {
      J G(-1.0), Gl(0.0);
      for (int i = 0; i < 3; ++i) {
        J inv = jetfun::recip(L + a2[i]);
        G += y2[i] * inv;
        Gl -= y2[i] * (inv * inv);
      }
      L = L - G * jetfun::recip(Gl);
    }
    L.c[0] = lam0;
  }
  out.lambda = lam0;

  const double amax2 = std::max({a2[0], a2[1], a2[2]});
  const double T = 4.0 * (amax2 + lam0);
  const double pref = M_PI * a.x() * a.y() * a.z();

  auto accumulate = [&](double v, double w, J M[3]) {
    J E(1.0), prod(1.0);
    for (int i = 0; i < 3; ++i) {
      J den = L + (a2[i] + v);
      E -= y2[i] * jetfun::recip(den);
      prod = prod * den;
    }
    J invD = jetfun::pow(prod, -0.5);
    J E2 = E * E;
    M[0] += (E * invD) * w;
    M[1] += (E2 * invD) * w;
    M[2] += (E2 * (E * invD)) * w;
  };

  auto eval = [&](int panels, J M[3]) {
    for (int k = 0; k < 3; ++k) M[k] = J(0.0);
    const GaussRule& g = gauss_legendre(12);
    for (int p = 0; p < panels; ++p) {
      double lo = T * p / panels, hi = T * (p + 1) / panels;
      for (size_t q = 0; q < g.x.size(); ++q) {
        double v = 0.5 * (hi + lo) + 0.5 * (hi - lo) * g.x[q];
        accumulate(v, 0.5 * (hi - lo) * g.w[q], M);
      }
    }
    // tail: v = T/tau^2, dv = 2T/tau^3 dtau, tau in (0,1]
    const GaussRule& gt = gauss_legendre(32);
    for (size_t q = 0; q < gt.x.size(); ++q) {
      double tau = 0.5 * (gt.x[q] + 1.0);
      double wt = 0.5 * gt.w[q];
      double v = T / (tau * tau);
      accumulate(v, wt * 2.0 * T / (tau * tau * tau), M);
    }
  };

  J M[3], Mref[3];
  eval(8, Mref);
  int panels = 16;
  for (;; panels *= 2) {
    eval(panels, M);
    double diff = 0.0, scale = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < Jet3<NN>::NC; ++i) {
        diff = std::max(diff, std::abs(M[k].c[i] - Mref[k].c[i]));
        scale = std::max(scale, std::abs(M[k].c[i]));
      }
    if (diff <= 1e-12 * scale || panels >= 64) break;
    for (int k = 0; k < 3; ++k) Mref[k] = M[k];
  }
  for (int k = 0; k < 3; ++k) M[k] *= pref / (k + 1);
  extract<NN>(out, M[0], M[1], M[2], a, D);
}

template <int NN>
void run_fill(PotentialSet& out, const Vec3& y, const Vec3& axes, bool axisym, int D) {
  if (axisym)
    fill_spheroid<NN>(out, y, axes.x(), axes.z(), D);
  else
    fill_triaxial<NN>(out, y, axes, D);
}

void check_axes(const Vec3& axes) {
  for (int k = 0; k < 3; ++k)
    if (!(axes[k] > 0.0)) throw ValidationError("ellipsoid semi-axes must be positive");
}

}  // namespace

int potential_deriv_index(int i, int j, int k) {
  if (i < 0 || j < 0 || k < 0 || i + j + k > 4)
    throw std::out_of_range("potential derivative order exceeds 4");
  return JetTables<6>::get().index(i, j, k);
}

double PotentialSet::get(int P, int i, int j, int k) const {
  int n = potential_deriv_index(i, j, k);
  if (P == 0) return phi[n];
  if (P <= 3) return phi_p[P - 1][n];
  return phi_pq[P - 4][n];
}

double lambda_of(const Vec3& x, const Vec3& center, const Vec3& semi_axes) {
  check_axes(semi_axes);
  Vec3 y = x - center;
  double xi2 = 0.0;
  for (int k = 0; k < 3; ++k) xi2 += y[k] * y[k] / (semi_axes[k] * semi_axes[k]);
  if (xi2 <= 1.0) return 0.0;
  double amax = semi_axes.maxCoeff();
  if (std::abs(semi_axes.x() - semi_axes.y()) <= 1e-12 * amax) {
    double ae2 = semi_axes.x() * semi_axes.x(), a32 = semi_axes.z() * semi_axes.z();
    double rho2 = y.x() * y.x() + y.y() * y.y(), z2 = y.z() * y.z();
    double b = ae2 + a32 - rho2 - z2;
    double cc = ae2 * a32 - rho2 * a32 - z2 * ae2;
    double sq = std::sqrt(b * b - 4.0 * cc);
    double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    return std::max(q, cc / q);
  }
  return lambda_newton(y, semi_axes);
}

PotentialSet phi_tensor(const Vec3& x, const Vec3& center, const Vec3& semi_axes,
                        int deriv_order) {
  if (deriv_order < 0 || deriv_order > 4)
    throw std::invalid_argument("phi_tensor: deriv_order must be in [0, 4]");
  check_axes(semi_axes);
  PotentialSet out;
  Vec3 y = x - center;
  bool axisym = std::abs(semi_axes.x() - semi_axes.y()) <= 1e-12 * semi_axes.maxCoeff();
  switch (deriv_order) {
    case 0: run_fill<2>(out, y, semi_axes, axisym, 0); break;
    case 1: run_fill<3>(out, y, semi_axes, axisym, 1); break;
    case 2: run_fill<4>(out, y, semi_axes, axisym, 2); break;
    case 3: run_fill<5>(out, y, semi_axes, axisym, 3); break;
    default: run_fill<6>(out, y, semi_axes, axisym, 4); break;
  }
  return out;
}

double integrate_over_ellipsoid(const Vec3& center, const Vec3& semi_axes,
                                const std::function<double(const Vec3&)>& f,
                                const Vec3* sing, double rel_tol) {
  check_axes(semi_axes);
  const double a2[3] = {semi_axes.x() * semi_axes.x(), semi_axes.y() * semi_axes.y(),
                        semi_axes.z() * semi_axes.z()};
  bool split = false;
  Vec3 x0 = Vec3::Zero();
  if (sing) {
    Vec3 yv = *sing - center;
    double xi2 = 0.0;
    for (int k = 0; k < 3; ++k) xi2 += yv[k] * yv[k] / a2[k];
    if (xi2 < 1.0) {
      split = true;
      x0 = *sing;
    }
  }

  auto eval_polar = [&](int nr, int nt, int np) {
    const GaussRule& gr = gauss_legendre(nr);
    const GaussRule& gt = gauss_legendre(nt);
    const double jac0 = semi_axes.x() * semi_axes.y() * semi_axes.z();
    double sum = 0.0;
    for (int ir = 0; ir < nr; ++ir) {
      double s = 0.5 * (gr.x[ir] + 1.0), ws = 0.5 * gr.w[ir];
      for (int it = 0; it < nt; ++it) {
        double ct = gt.x[it], wt = gt.w[it];
        double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int ip = 0; ip < np; ++ip) {
          double ph = 2.0 * M_PI * (ip + 0.5) / np, wp = 2.0 * M_PI / np;
          Vec3 xp = center + Vec3(semi_axes.x() * s * st * std::cos(ph),
                                  semi_axes.y() * s * st * std::sin(ph),
                                  semi_axes.z() * s * ct);
          sum += ws * wt * wp * jac0 * s * s * f(xp);
        }
      }
    }
    return sum;
  };

  auto eval_split = [&](int nr, int nt, int np) {
    const GaussRule& gr = gauss_legendre(nr);
    const GaussRule& gt = gauss_legendre(nt);
    Vec3 y0 = x0 - center;
    double gamma = -1.0;
    for (int k = 0; k < 3; ++k) gamma += y0[k] * y0[k] / a2[k];
    double sum = 0.0;
    for (int it = 0; it < nt; ++it) {
      double ct = gt.x[it], wt = gt.w[it];
      double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int ip = 0; ip < np; ++ip) {
        double ph = 2.0 * M_PI * (ip + 0.5) / np, wp = 2.0 * M_PI / np;
        Vec3 w(st * std::cos(ph), st * std::sin(ph), ct);
        double alpha = 0.0, beta = 0.0;
        for (int k = 0; k < 3; ++k) {
          alpha += w[k] * w[k] / a2[k];
          beta += 2.0 * y0[k] * w[k] / a2[k];
        }
        double disc = std::sqrt(beta * beta - 4.0 * alpha * gamma);
        double rmax = beta <= 0.0 ? (disc - beta) / (2.0 * alpha) : -2.0 * gamma / (beta + disc);
        for (int ir = 0; ir < nr; ++ir) {
          double r = rmax * 0.5 * (gr.x[ir] + 1.0), wr = rmax * 0.5 * gr.w[ir];
          sum += wt * wp * wr * r * r * f(x0 + r * w);
        }
      }
    }
    return sum;
  };

  const int sizes[4][3] = {{12, 12, 24}, {24, 24, 48}, {48, 48, 96}, {64, 64, 128}};
  double prev = 0.0, best = 0.0;
  for (int lev = 0; lev < 4; ++lev) {
    best = split ? eval_split(sizes[lev][0], sizes[lev][1], sizes[lev][2])
                 : eval_polar(sizes[lev][0], sizes[lev][1], sizes[lev][2]);
    if (lev > 0 && std::abs(best - prev) <= rel_tol * std::max(std::abs(best), 1e-300))
      return best;
    prev = best;
  }
  return best;
}

PotentialSet phi_quadrature_oracle(const Vec3& x, const Vec3& center, const Vec3& semi_axes,
                                   int deriv_order) {
  if (deriv_order < 0 || deriv_order > 1)
    throw std::invalid_argument("phi_quadrature_oracle: deriv_order must be 0 or 1");
  check_axes(semi_axes);
  PotentialSet out;
  out.order = deriv_order;
  out.lambda = lambda_of(x, center, semi_axes);
  Vec3 y = x - center;
  double xi2 = 0.0;
  for (int k = 0; k < 3; ++k) xi2 += y[k] * y[k] / (semi_axes[k] * semi_axes[k]);
  out.interior = xi2 <= 1.0;
  const Vec3* sing = out.interior ? &x : nullptr;

  static const int vp[6] = {0, 1, 2, 1, 0, 0};
  static const int vq[6] = {0, 1, 2, 2, 2, 1};
  const int nout = jet_num_coeffs(deriv_order);
  for (int n = 0; n < nout; ++n) {
    auto kern = [&](const Vec3& xp) {
      Vec3 dd = x - xp;
      double r = dd.norm();
      if (n == 0) return 1.0 / r;
      return -dd[n - 1] / (r * r * r);
    };
    for (int P = 0; P < 10; ++P) {
      auto integrand = [&](const Vec3& xp) {
        double m = 1.0;
        if (P >= 1 && P <= 3) m = (xp - center)[P - 1];
        if (P >= 4) m = (xp - center)[vp[P - 4]] * (xp - center)[vq[P - 4]];
        return m * kern(xp);
      };
      double val = integrate_over_ellipsoid(center, semi_axes, integrand, sing, 1e-9);
      if (P == 0)
        out.phi[n] = val;
      else if (P <= 3)
        out.phi_p[P - 1][n] = val;
      else
        out.phi_pq[P - 4][n] = val;
    }
  }
  return out;
}

}  // namespace dribem
