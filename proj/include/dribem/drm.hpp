#pragma once

// Dual reciprocity machinery. The capacity (heat storage) volume term is
// interpolated over radial basis functions centred at the boundary nodes and
// a set of interior points; each basis function has a closed-form particular
// solution, which converts its volume integral against the point-source
// response into boundary integrals over the outer surface plus, in the
// two-layer case, correction integrals over the interface plane and a local
// free term.

#include <Eigen/Dense>

#include <vector>

#include <dribem/bem.hpp>
#include <dribem/kernels.hpp>
#include <dribem/model.hpp>

namespace dribem {

// Interpolation basis chi(rhat) = 1 + rhat + rhat^2 with rhat = r / ell.
double rbf_chi(double rhat);

// Particular solution Gamma of laplacian(Gamma) = chi(r/ell), radial about
// `center`:
//   Gamma(r) = ell^2 * (rhat^2/6 + rhat^3/12 + rhat^4/20).
// Returns true partial derivatives with respect to x up to max_order
// (0..3) in the 20-slot layout shared with greens_derivs; slots above the
// requested order are zero. The third derivative is bounded but
// discontinuous at r = 0; at the centre the second derivative is
// delta_ij / 3 and the third-derivative slots are left at zero.
FieldJet20 rbf_gamma(const Vec3& x, const Vec3& center, double ell, int max_order = 1);

// Interpolation system: centers are the boundary nodes followed by the
// interior interpolation points, ell is the common length scale, and
// F(a, b) = chi(|x_a - x_b| / ell).
struct RbfSystem {
  std::vector<Vec3> centers;
  double ell = 0;
  Eigen::MatrixXd F;
};

// Builds the interpolation system. Throws ValidationError when two centers
// coincide (closer than 1e-12 * ell), which would make F singular.
RbfSystem assemble_interpolation(const BilayerScenario& s, const BoundaryMesh& m,
                                 const std::vector<Vec3>& interior_pts);

// One fixed-rule quadrature point of the converted capacity integral, with
// the layer factors folded in: a basis function's contribution to a
// collocation point x is
//   c1 * G(x, x') * dGamma/dn(x') + c2 * F(x, x') * Gamma(x')
// where F = Kass * dG/dn' and Kass is the conductivity the flux kernel is
// scaled by (the element's layer, or the upper value on the interface where
// K dG/dz' is side independent). elem indexes the owning outer element, or
// the interface panel when iface is set; both are needed to replace the
// fixed-rule points near a collocation point with refined ones.
struct DrmSrcPt {
  Vec3 x = Vec3::Zero();
  Vec3 n = Vec3::Zero();
  double c1 = 0.0;
  double c2 = 0.0;
  double Kass = 0.0;
  int elem = -1;
  bool iface = false;
};

// Fixed-rule source points over the outer elements followed by the
// interface panels (interface weights vanish when the layers match).
std::vector<DrmSrcPt> drm_source_points(const BilayerScenario& s, const BoundaryMesh& m);

// S(r, m): response of collocation row r to a unit interpolation weight on
// basis m, i.e. the volume integral of Cp(x') chi_m(x') G(x_r, x')
// rewritten as surface work. Enters the system as
//   H*u - Gm*q + S*adot - ED*c - EL*s = 0.
Eigen::MatrixXd assemble_drm_blocks(const BilayerScenario& s, const BoundaryMesh& m,
                                    const std::vector<CollocRow>& rows, const RbfSystem& rbf);

}  // namespace dribem
