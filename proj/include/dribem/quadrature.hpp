#pragma once
// Numerical integration building blocks shared across modules.

#include <vector>

#include "dribem/model.hpp"

namespace dribem {

struct GaussRule {
  std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

// n-point Gauss-Legendre rule; computed once per n and cached
const GaussRule& gauss_legendre(int n);

// Flat rectangular panel. Points are x(xi, eta) = origin + xi*du + eta*dv
// with (xi, eta) in [0,1]^2; du and dv are orthogonal edge vectors and the
// unit normal points along du x dv. Corner k of the panel corresponds to
// parameters (0,0), (1,0), (1,1), (0,1) for k = 0..3.
struct RectPanel {
  Vec3 origin;
  Vec3 du, dv;
  Vec3 normal;
  double area = 0.0;
};

RectPanel make_panel(const Vec3& origin, const Vec3& du, const Vec3& dv);

// One surface quadrature point: physical location, weight (includes the
// surface Jacobian, so sums of w approximate area), and panel parameters.
struct Qp {
  Vec3 x;
  double w;
  double xi, eta;
};

// Order of the fixed tensor rule applied to well-separated panels and to the
// accepted cells of the adaptive subdivision.
inline constexpr int panel_base_order = 5;

// Distance from a point to the panel (exact for rectangles).
double panel_point_distance(const RectPanel& p, const Vec3& x);

// True when the fixed base rule is not accurate enough for a field point
// this close to the panel. The test also considers the mirror image of the
// field point across the material interface plane x3 = 0, because kernels
// contain an image-source term that peaks there.
bool panel_needs_subdivision(const RectPanel& p, const Vec3& xfield);

// Fixed n x n tensor Gauss rule over the whole panel; appends to out.
void panel_rule(const RectPanel& p, int n, std::vector<Qp>& out);

// Regular or near-singular integration: recursively subdivides the panel
// until each cell is small relative to its distance from xfield (and from
// the image of xfield across x3 = 0), then applies the base rule per cell.
// xfield must not lie on the panel itself.
void integrate_element(const RectPanel& p, const Vec3& xfield, std::vector<Qp>& out);

// Singular integration for a collocation point located on the panel at
// parameters (xi0, eta0): fans the rectangle into triangles around the
// singular point and applies a Duffy transform per triangle, which removes
// a 1/r kernel singularity. Works for vertex, edge and interior locations.
void integrate_singular(const RectPanel& p, double xi0, double eta0, std::vector<Qp>& out);

}  // namespace dribem
