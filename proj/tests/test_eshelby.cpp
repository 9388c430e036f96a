#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dribem/eshelby.hpp>
#include <dribem/kernels.hpp>
#include <dribem/potentials.hpp>

#include <cmath>

using namespace dribem;

namespace {

constexpr double PI = 3.14159265358979323846;

int idx(int i, int j, int k) { return potential_deriv_index(i, j, k); }

double density(int P, const Vec3& y) {
  static const int vp[6] = {0, 1, 2, 1, 0, 0};
  static const int vq[6] = {0, 1, 2, 2, 2, 1};
  if (P == 0) return 1.0;
  if (P <= 3) return y[P - 1];
  return y[vp[P - 4]] * y[vq[P - 4]];
}

double oracle_L(const Vec3& x, const Inclusion& inc, double Ku, double Kl, int P) {
  bool in = inc.contains(x);
  const Vec3* sing = in ? &x : nullptr;
  return integrate_over_ellipsoid(
      inc.center, inc.semi_axes,
      [&](const Vec3& xp) { return density(P, xp - inc.center) * greens(x, xp, Ku, Kl); },
      sing, 1e-8);
}

double oracle_D(const Vec3& x, const Inclusion& inc, double Ku, double Kl, int i, int P) {
  double Ks = inc.upper() ? Ku : Kl;
  bool in = inc.contains(x);
  const Vec3* sing = in ? &x : nullptr;
  return Ks * integrate_over_ellipsoid(
                  inc.center, inc.semi_axes,
                  [&](const Vec3& xp) {
                    return density(P, xp - inc.center) *
                           greens_pair(x, xp, Ku, Kl).grad_src[i];
                  },
                  sing, 1e-8);
}

void compare_point(const Vec3& x, const Inclusion& inc, double Ku, double Kl, double tol) {
  EshelbyEval ev = eshelby_eval(x, inc, Ku, Kl, 0);
  double sL = 0.0, sD = 0.0;
  for (int P = 0; P < 10; ++P) {
    sL = std::max(sL, std::abs(ev.L[P][0]));
    for (int i = 0; i < 3; ++i) sD = std::max(sD, std::abs(ev.D[i][P][0]));
  }
  for (int P = 0; P < 10; ++P) {
    CHECK(oracle_L(x, inc, Ku, Kl, P) == doctest::Approx(ev.L[P][0]).epsilon(tol).scale(sL));
    for (int i = 0; i < 3; ++i)
      CHECK(oracle_D(x, inc, Ku, Kl, i, P) ==
            doctest::Approx(ev.D[i][P][0]).epsilon(tol).scale(sD));
  }
}

}  // namespace

TEST_CASE("matched phases reduce to the classical sphere influence") {
  Inclusion inc;
  inc.center = Vec3(0, 0, 0.5);
  inc.semi_axes = Vec3(0.2, 0.2, 0.2);
  inc.props = {30.0, 0.0};
  double K = 3.0;

  // interior: uniform eigen-gradient produces the linear field y_i / 3
  Vec3 xin(0.05, -0.03, 0.55);
  EshelbyEval in = eshelby_eval(xin, inc, K, K, 1);
  CHECK(in.interior);
  Vec3 y = xin - inc.center;
  for (int i = 0; i < 3; ++i) {
    CHECK(in.D[i][0][0] == doctest::Approx(y[i] / 3.0).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) {
      double expect = (i == j) ? 1.0 / 3.0 : 0.0;
      CHECK(in.D[i][0][idx(j == 0, j == 1, j == 2)] ==
            doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
  }
  // interior: uniform eigen-source value a^2/(2K) at the center
  EshelbyEval ctr = eshelby_eval(inc.center, inc, K, K, 0);
  CHECK(ctr.L[0][0] == doctest::Approx(0.04 / (2.0 * K)).epsilon(1e-12));

  // exterior: dipole decay a^3 y_i / (3 r^3)
  Vec3 xe(0.3, 0.2, 0.9);
  EshelbyEval ex = eshelby_eval(xe, inc, K, K, 0);
  Vec3 ye = xe - inc.center;
  double r3 = std::pow(ye.norm(), 3);
  for (int i = 0; i < 3; ++i)
    CHECK(ex.D[i][0][0] == doctest::Approx(0.008 * ye[i] / (3.0 * r3)).epsilon(1e-12));
}

TEST_CASE("dilute sphere: equivalent coefficient and interior gradient ratio") {
  Inclusion inc;
  inc.center = Vec3(0, 0, 0.5);
  inc.semi_axes = Vec3(0.2, 0.2, 0.2);
  double Km = 3.0, Ki = 30.0;  // tenfold contrast
  inc.props = {Ki, 0.0};
  EshelbyEval c = eshelby_eval(inc.center, inc, Km, Km, 1);

  double kappa = 1.0 - Ki / Km;
  double slope = c.D[2][0][idx(0, 0, 1)];
  CHECK(slope == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // self-consistency for a unit remote gradient along z
  double ustar = kappa / (1.0 - kappa * slope);
  CHECK(ustar == doctest::Approx(-2.25).epsilon(1e-12));
  double ratio = 1.0 + ustar * slope;
  CHECK(ratio == doctest::Approx(3.0 * Km / (Ki + 2.0 * Km)).epsilon(1e-12));
  CHECK(ratio == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("field equations of the influence tensors") {
  Inclusion inc;
  inc.center = Vec3(0.4, -0.1, 0.3);
  inc.semi_axes = Vec3(0.2, 0.2, 0.1);
  inc.props = {10.0, 5.0};
  double Ku = 4.0, Kl = 2.0, Ks = Ku;

  Vec3 xin = inc.center + Vec3(0.05, 0.06, 0.02);
  EshelbyEval in = eshelby_eval(xin, inc, Ku, Kl, 2);
  CHECK(in.interior);
  Vec3 y = xin - inc.center;
  auto lapL = [&](int P) {
    return in.L[P][idx(2, 0, 0)] + in.L[P][idx(0, 2, 0)] + in.L[P][idx(0, 0, 2)];
  };
  auto lapD = [&](int i, int P) {
    return in.D[i][P][idx(2, 0, 0)] + in.D[i][P][idx(0, 2, 0)] + in.D[i][P][idx(0, 0, 2)];
  };
  static const int vp[6] = {0, 1, 2, 1, 0, 0};
  static const int vq[6] = {0, 1, 2, 2, 2, 1};
  for (int P = 0; P < 10; ++P)
    CHECK(lapL(P) == doctest::Approx(-density(P, y) / Ks).epsilon(1e-10).scale(1.0 / Ks));
  for (int i = 0; i < 3; ++i) {
    CHECK(lapD(i, 0) == doctest::Approx(0.0).scale(1.0));
    for (int p = 0; p < 3; ++p)
      CHECK(lapD(i, 1 + p) == doctest::Approx(i == p ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    for (int s = 0; s < 6; ++s) {
      double expect = (vp[s] == i ? y[vq[s]] : 0.0) + (vq[s] == i ? y[vp[s]] : 0.0);
      CHECK(lapD(i, 4 + s) == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
    }
  }

  // harmonic outside on the same side and across the interface
  for (const Vec3& xe : {Vec3(inc.center + Vec3(0.4, 0.1, 0.3)), Vec3(0.2, 0.3, -0.4)}) {
    EshelbyEval ex = eshelby_eval(xe, inc, Ku, Kl, 2);
    CHECK(!ex.interior);
    for (int P = 0; P < 10; ++P) {
      double l = ex.L[P][idx(2, 0, 0)] + ex.L[P][idx(0, 2, 0)] + ex.L[P][idx(0, 0, 2)];
      CHECK(l == doctest::Approx(0.0).scale(std::abs(ex.L[P][idx(2, 0, 0)]) + 1e-12).epsilon(1e-9));
    }
  }
}

TEST_CASE("influence fields are compatible across the interface") {
  Inclusion inc;
  inc.center = Vec3(0.3, -0.2, 0.3);
  inc.semi_axes = Vec3(0.15, 0.15, 0.15);
  inc.props = {10.0, 5.0};
  double Ku = 4.0, Kl = 2.0;
  Vec3 xp(0.45, 0.1, 1e-10), xm(0.45, 0.1, -1e-10);
  EshelbyEval up = eshelby_eval(xp, inc, Ku, Kl, 1);
  EshelbyEval lo = eshelby_eval(xm, inc, Ku, Kl, 1);
  for (int P = 0; P < 10; ++P) {
    double s = std::abs(up.L[P][0]) + 1e-18;
    CHECK(lo.L[P][0] == doctest::Approx(up.L[P][0]).epsilon(1e-8).scale(s));
    double fu = Ku * up.L[P][idx(0, 0, 1)], fl = Kl * lo.L[P][idx(0, 0, 1)];
    CHECK(fl == doctest::Approx(fu).epsilon(1e-8).scale(std::abs(fu) + 1e-18));
    double gscale = 1e-18;
    for (int i = 0; i < 3; ++i)
      gscale = std::max(gscale, std::abs(Ku * up.D[i][P][idx(0, 0, 1)]));
    for (int i = 0; i < 3; ++i) {
      double sd = std::abs(up.D[i][P][0]) + 1e-18;
      CHECK(lo.D[i][P][0] == doctest::Approx(up.D[i][P][0]).epsilon(1e-8).scale(sd));
      double gu = Ku * up.D[i][P][idx(0, 0, 1)], gl = Kl * lo.D[i][P][idx(0, 0, 1)];
      CHECK(gl == doctest::Approx(gu).epsilon(1e-6).scale(gscale));
    }
  }
}

TEST_CASE("defining volume integrals reproduce both tensors") {
  double Ku = 4.0, Kl = 2.0;
  Inclusion sph;
  sph.center = Vec3(0.5, 0.5, 0.125);
  sph.semi_axes = Vec3(0.1, 0.1, 0.1);
  sph.props = {10.0, 5.0};
  compare_point(Vec3(0.62, 0.43, 0.21), sph, Ku, Kl, 1e-6);
  compare_point(Vec3(0.52, 0.48, 0.1), sph, Ku, Kl, 1e-4);
  compare_point(Vec3(0.3, 0.55, -0.2), sph, Ku, Kl, 1e-6);

  Inclusion sphd;
  sphd.center = Vec3(0.5, 0.5, -0.15);  // lower-side inclusion
  sphd.semi_axes = Vec3(0.2, 0.2, 0.1);
  sphd.props = {10.0, 5.0};
  compare_point(Vec3(0.75, 0.6, -0.3), sphd, Ku, Kl, 1e-6);
  compare_point(Vec3(0.55, 0.45, -0.125), sphd, Ku, Kl, 1e-4);
  compare_point(Vec3(0.45, 0.6, 0.15), sphd, Ku, Kl, 1e-6);
}

TEST_CASE("single-tensor views agree with the combined evaluation") {
  Inclusion inc;
  inc.center = Vec3(0.2, 0.1, 0.25);
  inc.semi_axes = Vec3(0.1, 0.1, 0.05);
  inc.props = {1.0, 1.0};
  Vec3 x(0.5, 0.4, 0.3);
  EshelbyEval both = eshelby_eval(x, inc, 4.0, 2.0, 1);
  EshelbyEval d = tensor_D(x, inc, 4.0, 2.0, 1);
  EshelbyEval l = tensor_L(x, inc, 4.0, 2.0, 1);
  CHECK(d.D[1][2][0] == both.D[1][2][0]);
  CHECK(l.L[4][0] == both.L[4][0]);
  CHECK_THROWS_AS(eshelby_eval(x, inc, 4.0, 2.0, 4), std::invalid_argument);
}
