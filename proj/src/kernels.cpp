#include <dribem/kernels.hpp>

#include <dribem/jet.hpp>

#include <cmath>

namespace dribem {

namespace {

struct SideInfo {
  double Ks, Kbar;  // source-side conductivity and the other one
  bool same;        // field point on the source side
};

SideInfo resolve_sides(const Vec3& x, const Vec3& xs, double K_up, double K_low,
                       SourceSide side) {
  bool src_up = side == SourceSide::automatic ? xs.z() >= 0.0 : side == SourceSide::upper;
  bool fld_up = x.z() >= 0.0;
  SideInfo s;
  s.Ks = src_up ? K_up : K_low;
  s.Kbar = src_up ? K_low : K_up;
  s.same = src_up == fld_up;
  return s;
}

// derivative tensors of 1/r for a multi-index (a,b,c) of order m <= 4,
// entries of the symmetric tensor d^m/dx^m (1/r) at separation d.
struct InvRTensor {
  Vec3 d;
  double r2, r, ir3, ir5, ir7, ir9;
  explicit InvRTensor(const Vec3& dd) : d(dd) {
    r2 = d.squaredNorm();
    r = std::sqrt(r2);
    double ir = 1.0 / r;
    double ir2 = ir * ir;
    ir3 = ir * ir2;
    ir5 = ir3 * ir2;
    ir7 = ir5 * ir2;
    ir9 = ir7 * ir2;
  }
  double dpow(int a, int b, int c) const {
    double v = 1.0;
    for (int m = 0; m < a; ++m) v *= d.x();
    for (int m = 0; m < b; ++m) v *= d.y();
    for (int m = 0; m < c; ++m) v *= d.z();
    return v;
  }
  // sum over delta pairings with one Kronecker pair
  double s1(int a, int b, int c) const {
    double v = 0.0;
    if (a >= 2) v += a * (a - 1) / 2 * dpow(a - 2, b, c);
    if (b >= 2) v += b * (b - 1) / 2 * dpow(a, b - 2, c);
    if (c >= 2) v += c * (c - 1) / 2 * dpow(a, b, c - 2);
    return v;
  }
  // number of partitions of the multi-index into two same-axis pairs (m = 4)
  static double s2(int a, int b, int c) {
    if (a == 4 || b == 4 || c == 4) return 3.0;
    if ((a == 2 && b == 2) || (a == 2 && c == 2) || (b == 2 && c == 2)) return 1.0;
    return 0.0;
  }
  double entry(int a, int b, int c) const {
    int m = a + b + c;
    switch (m) {
      case 0: return 1.0 / r;
      case 1: return -dpow(a, b, c) * ir3;
      case 2: return (3.0 * dpow(a, b, c) - r2 * s1(a, b, c)) * ir5;
      case 3: return -(15.0 * dpow(a, b, c) - 3.0 * r2 * s1(a, b, c)) * ir7;
      case 4:
        return (105.0 * dpow(a, b, c) - 15.0 * r2 * s1(a, b, c) + 3.0 * r2 * r2 * s2(a, b, c)) * ir9;
    }
    return 0.0;
  }
};

// all 35 multi-indices of order <= 4, degree-major (first 20 are order <= 3)
const JetTables<4>& tab4() { return JetTables<4>::get(); }

void fill_jets35(const Vec3& d, std::array<double, 35>& out) {
  InvRTensor t(d);
  const auto& tb = tab4();
  for (int n = 0; n < 35; ++n) out[n] = t.entry(tb.exp[n][0], tb.exp[n][1], tb.exp[n][2]);
}

}  // namespace

int field_jet_index(int i, int j, int k) { return tab4().index(i, j, k); }

double greens(const Vec3& x, const Vec3& xs, double K_up, double K_low, SourceSide side) {
  SideInfo s = resolve_sides(x, xs, K_up, K_low, side);
  double r = (x - xs).norm();
  if (r == 0.0) throw NumericalError("greens: field point coincides with source point");
  if (s.same) {
    double beta = (s.Ks - s.Kbar) / (s.Ks + s.Kbar);
    double rbar = (x - image_point(xs)).norm();
    return (1.0 / r + beta / rbar) / (4.0 * M_PI * s.Ks);
  }
  return 1.0 / (2.0 * M_PI * (s.Ks + s.Kbar) * r);
}

KernelPair greens_pair(const Vec3& x, const Vec3& xs, double K_up, double K_low,
                       SourceSide side) {
  SideInfo s = resolve_sides(x, xs, K_up, K_low, side);
  Vec3 d = x - xs;
  double r2 = d.squaredNorm();
  if (r2 == 0.0) throw NumericalError("greens_pair: coincident points");
  double ir = 1.0 / std::sqrt(r2);
  double ir3 = ir / r2;
  KernelPair out;
  if (s.same) {
    double beta = (s.Ks - s.Kbar) / (s.Ks + s.Kbar);
    Vec3 db = x - image_point(xs);
    double rb2 = db.squaredNorm();
    double irb = 1.0 / std::sqrt(rb2);
    double irb3 = irb / rb2;
    double pref = 1.0 / (4.0 * M_PI * s.Ks);
    out.G = pref * (ir + beta * irb);
    // d/dx'_i (1/r) = +d_i/r^3 ; d/dx'_i (1/rbar) = M_i dbar_i/rbar^3, M = (1,1,-1)
    out.grad_src = pref * (d * ir3 + beta * Vec3(db.x(), db.y(), -db.z()) * irb3);
  } else {
    double pref = 1.0 / (2.0 * M_PI * (s.Ks + s.Kbar));
    out.G = pref * ir;
    out.grad_src = pref * ir3 * d;
  }
  return out;
}

KernelEval1 greens_eval1(const Vec3& x, const Vec3& xs, double K_up, double K_low,
                         SourceSide side) {
  SideInfo s = resolve_sides(x, xs, K_up, K_low, side);
  Vec3 d = x - xs;
  if (d.squaredNorm() == 0.0) throw NumericalError("greens_eval1: coincident points");
  KernelEval1 out;
  // one 1/r pole at separation dd; mz = -1 mirrors the source x3 derivative
  auto add_pole = [&out](double p, const Vec3& dd, double mz) {
    double r2 = dd.squaredNorm();
    double ir = 1.0 / std::sqrt(r2);
    double ir3 = ir / r2;
    double ir5 = ir3 / r2;
    out.G += p * ir;
    out.Gx -= p * ir3 * dd;
    const double M[3] = {1.0, 1.0, mz};
    for (int i = 0; i < 3; ++i) {
      out.Gs[i] += p * M[i] * dd[i] * ir3;
      for (int b = 0; b < 3; ++b)
        out.Gsx(b, i) += p * M[i] * ((b == i ? ir3 : 0.0) - 3.0 * dd[i] * dd[b] * ir5);
    }
  };
  if (s.same) {
    double beta = (s.Ks - s.Kbar) / (s.Ks + s.Kbar);
    double pref = 1.0 / (4.0 * M_PI * s.Ks);
    add_pole(pref, d, 1.0);
    add_pole(pref * beta, x - image_point(xs), -1.0);
  } else {
    add_pole(1.0 / (2.0 * M_PI * (s.Ks + s.Kbar)), d, 1.0);
  }
  return out;
}

KernelEval greens_derivs(const Vec3& x, const Vec3& xs, double K_up, double K_low,
                         int max_order, SourceSide side) {
  if (max_order < 0 || max_order > 3)
    throw ValidationError("greens_derivs: field order must be within [0,3]");
  SideInfo s = resolve_sides(x, xs, K_up, K_low, side);
  if ((x - xs).squaredNorm() == 0.0)
    throw NumericalError("greens_derivs: coincident points");

  const auto& tb = tab4();
  std::array<double, 35> T{};
  fill_jets35(x - xs, T);

  KernelEval out;
  auto add_direct = [&](double coef) {
    for (int n = 0; n < 20; ++n) out.G[n] += coef * T[n];
    // dG/dx'_i of the direct part: field jet of -(d/dx_i) (1/r) times coef
    for (int i = 0; i < 3; ++i)
      for (int n = 0; n < 20; ++n) {
        auto e = tb.exp[n];
        int idx = tb.index(e[0] + (i == 0), e[1] + (i == 1), e[2] + (i == 2));
        out.Gs[i][n] += -coef * T[idx];
      }
  };

  if (s.same) {
    double beta = (s.Ks - s.Kbar) / (s.Ks + s.Kbar);
    double pref = 1.0 / (4.0 * M_PI * s.Ks);
    add_direct(pref);
    std::array<double, 35> Tb{};
    fill_jets35(x - image_point(xs), Tb);
    for (int n = 0; n < 20; ++n) out.G[n] += pref * beta * Tb[n];
    // d/dx'_i (1/rbar) = -M_i * (field derivative i of 1/rbar), M = (1,1,-1)
    const double Mi[3] = {1.0, 1.0, -1.0};
    for (int i = 0; i < 3; ++i)
      for (int n = 0; n < 20; ++n) {
        auto e = tb.exp[n];
        int idx = tb.index(e[0] + (i == 0), e[1] + (i == 1), e[2] + (i == 2));
        out.Gs[i][n] += -pref * beta * Mi[i] * Tb[idx];
      }
  } else {
    add_direct(1.0 / (2.0 * M_PI * (s.Ks + s.Kbar)));
  }
  return out;
}

}  // namespace dribem
