#include <dribem/quadrature.hpp>

#include <cmath>
#include <map>
#include <mutex>

namespace dribem {

static GaussRule make_gauss(int n) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // i-th largest root of P_n, refined by Newton on the recurrence
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int m = 0; m < n; ++m) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * m + 1) * x * p1 - m * p2) / (m + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    g.w[i] = w;
    g.w[n - 1 - i] = w;
  }
  return g;
}

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

RectPanel make_panel(const Vec3& origin, const Vec3& du, const Vec3& dv) {
  RectPanel p;
  p.origin = origin;
  p.du = du;
  p.dv = dv;
  Vec3 cr = du.cross(dv);
  p.area = cr.norm();
  if (p.area <= 0.0) throw ValidationError("degenerate panel");
  p.normal = cr / p.area;
  return p;
}

double panel_point_distance(const RectPanel& p, const Vec3& x) {
  Vec3 d = x - p.origin;
  double lu2 = p.du.squaredNorm(), lv2 = p.dv.squaredNorm();
  double s = std::min(1.0, std::max(0.0, d.dot(p.du) / lu2));
  double t = std::min(1.0, std::max(0.0, d.dot(p.dv) / lv2));
  Vec3 closest = p.origin + s * p.du + t * p.dv;
  return (x - closest).norm();
}

namespace {

// Subdivision acceptance ratio: a cell is integrated with the base rule
// once its longest edge is at most half its distance from the field point.
constexpr double kSizeOverDist = 0.5;
constexpr int kBaseRuleN = panel_base_order;
constexpr int kDuffyN = 16;
constexpr int kMaxDepth = 16;

struct SubRect {
  double xi0, eta0, xi1, eta1;
};

void rule_on_subrect(const RectPanel& p, const SubRect& r, int n, std::vector<Qp>& out) {
  const GaussRule& g = gauss_legendre(n);
  double wxi = r.xi1 - r.xi0, weta = r.eta1 - r.eta0;
  double jac = p.area * wxi * weta;  // physical area of the subcell (rule weights sum to 4)
  for (int a = 0; a < n; ++a) {
    double xi = r.xi0 + wxi * 0.5 * (g.x[a] + 1.0);
    for (int b = 0; b < n; ++b) {
      double eta = r.eta0 + weta * 0.5 * (g.x[b] + 1.0);
      Qp q;
      q.xi = xi;
      q.eta = eta;
      q.x = p.origin + xi * p.du + eta * p.dv;
      q.w = jac * 0.25 * g.w[a] * g.w[b];
      out.push_back(q);
    }
  }
}

double subrect_distance(const RectPanel& p, const SubRect& r, const Vec3& x) {
  RectPanel sp;
  sp.origin = p.origin + r.xi0 * p.du + r.eta0 * p.dv;
  sp.du = (r.xi1 - r.xi0) * p.du;
  sp.dv = (r.eta1 - r.eta0) * p.dv;
  return panel_point_distance(sp, x);
}

void subdivide(const RectPanel& p, const SubRect& r, const Vec3& xf, const Vec3& xi_img,
               int depth, std::vector<Qp>& out) {
  double hu = (r.xi1 - r.xi0) * p.du.norm();
  double hv = (r.eta1 - r.eta0) * p.dv.norm();
  double h = std::max(hu, hv);
  double d = std::min(subrect_distance(p, r, xf), subrect_distance(p, r, xi_img));
  if (depth >= kMaxDepth || h <= kSizeOverDist * d) {
    rule_on_subrect(p, r, kBaseRuleN, out);
    return;
  }
  double xm = 0.5 * (r.xi0 + r.xi1), em = 0.5 * (r.eta0 + r.eta1);
  subdivide(p, {r.xi0, r.eta0, xm, em}, xf, xi_img, depth + 1, out);
  subdivide(p, {xm, r.eta0, r.xi1, em}, xf, xi_img, depth + 1, out);
  subdivide(p, {r.xi0, em, xm, r.eta1}, xf, xi_img, depth + 1, out);
  subdivide(p, {xm, em, r.xi1, r.eta1}, xf, xi_img, depth + 1, out);
}

Vec3 mirror_z(const Vec3& x) { return Vec3(x.x(), x.y(), -x.z()); }

// Duffy map over the parameter-space triangle (A, B, C) with the kernel
// singularity at A: (u,v) in [0,1]^2 -> A + u*(B - A) + u*v*(C - B).
// The Jacobian factor u cancels a 1/r singularity at A.
void duffy_triangle(const RectPanel& p, const double A[2], const double B[2], const double C[2],
                    int n, std::vector<Qp>& out) {
  double area2 = (B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]);
  double aabs = std::abs(area2);
  if (aabs < 1e-14) return;  // degenerate fan triangle; skip
  const GaussRule& g = gauss_legendre(n);
  for (int a = 0; a < n; ++a) {
    double u = 0.5 * (g.x[a] + 1.0);
    for (int b = 0; b < n; ++b) {
      double v = 0.5 * (g.x[b] + 1.0);
      double xi = A[0] + u * ((B[0] - A[0]) + v * (C[0] - B[0]));
      double eta = A[1] + u * ((B[1] - A[1]) + v * (C[1] - B[1]));
      Qp q;
      q.xi = xi;
      q.eta = eta;
      q.x = p.origin + xi * p.du + eta * p.dv;
      // parameter-space Jacobian of the Duffy map is u*|area2|
      q.w = p.area * aabs * u * 0.25 * g.w[a] * g.w[b];
      out.push_back(q);
    }
  }
}

}  // namespace

bool panel_needs_subdivision(const RectPanel& p, const Vec3& xfield) {
  double h = std::max(p.du.norm(), p.dv.norm());
  double d = std::min(panel_point_distance(p, xfield), panel_point_distance(p, mirror_z(xfield)));
  return h > kSizeOverDist * d;
}

void panel_rule(const RectPanel& p, int n, std::vector<Qp>& out) {
  rule_on_subrect(p, {0.0, 0.0, 1.0, 1.0}, n, out);
}

void integrate_element(const RectPanel& p, const Vec3& xfield, std::vector<Qp>& out) {
  subdivide(p, {0.0, 0.0, 1.0, 1.0}, xfield, mirror_z(xfield), 0, out);
}

void integrate_singular(const RectPanel& p, double xi0, double eta0, std::vector<Qp>& out) {
  if (xi0 < -1e-12 || xi0 > 1.0 + 1e-12 || eta0 < -1e-12 || eta0 > 1.0 + 1e-12)
    throw ValidationError("singular point must lie on the panel");
  const double S[2] = {xi0, eta0};
  const double corners[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int k = 0; k < 4; ++k)
    duffy_triangle(p, S, corners[k], corners[(k + 1) % 4], kDuffyN, out);
}

}  // namespace dribem
