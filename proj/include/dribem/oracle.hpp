#pragma once

// Independent reference computations used to validate the boundary element
// pipeline: direct volume quadrature of the capacity integral, a
// finite-difference solver on a voxel grid, and closed-form slab solutions.
// The finite-difference path shares only the scenario description with the
// boundary element modules; none of their kernels or quadratures.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include <dribem/model.hpp>

namespace dribem {

// Direct volume quadrature of
//   integral over the box of Cp(x') chi(|x' - center| / ell) G(x, x') dV'
// computed by adaptive octree subdivision with apex-anchored pyramid cells
// around the collocation point. Shares nothing with the surface conversion
// it cross-checks except the point-source kernel itself.
double capacity_volume_integral(const BilayerScenario& s, const Vec3& x, const Vec3& center,
                                double ell);

// Cell-centered voxel grid over the box. Each voxel carries the material of
// its center (inclusion material when the center falls inside one). Unknowns
// are voxel-center temperatures, x fastest, then y, then z.
struct FdGrid {
  BilayerScenario s;
  int nx = 0, ny = 0, nz = 0;
  double hx = 0.0, hy = 0.0, hz = 0.0;
  Vec3 origin = Vec3::Zero();  // box minimum corner
  std::vector<double> K, Cp;   // one value per voxel

  int idx(int i, int j, int k) const { return (k * ny + j) * nx + i; }
  Vec3 center(int i, int j, int k) const {
    return origin + Vec3((i + 0.5) * hx, (j + 0.5) * hy, (k + 0.5) * hz);
  }
};

// Builds the grid. Requires the interface plane x3 = 0 to coincide with a
// voxel face and every inclusion to span at least six voxels per diameter
// along each axis; throws ValidationError otherwise.
FdGrid make_fd_grid(const BilayerScenario& s, int nx, int ny, int nz);

// Implicit second-order finite differences: harmonic-mean face conductance
// between voxels, half-cell conductance against Dirichlet faces, prescribed
// outward flux on Neumann faces. Fields are changes from the initial state,
// so time stepping starts from zero.
Eigen::VectorXd fd_solve_steady(const FdGrid& g);

// One backward-difference step ladder (first order at the first step,
// second order after) over the scenario's time grid; records the probe
// temperature and vertical flux at every station.
struct FdSeries {
  std::vector<double> t;
  Eigen::MatrixXd u, q3;   // station rows, probe columns
  Eigen::VectorXd u_final;
};
FdSeries fd_solve_transient(const FdGrid& g, const std::vector<Vec3>& probes);

// Direct complex solve of (i omega M + A) U = b for the amplitude field of
// u(x, t) = Re[U(x) e^{i omega t}] under the boundary amplitudes.
Eigen::VectorXcd fd_solve_harmonic(const FdGrid& g, double omega);

// Trilinear sampling of a solved field: temperature over voxel centers,
// vertical flux over the staggered face lattice (exact on the interface
// plane). Coordinates are clamped into the sampled lattice hull.
double fd_sample_u(const FdGrid& g, const Eigen::VectorXd& u, const Vec3& x);
double fd_sample_q3(const FdGrid& g, const Eigen::VectorXd& u, const Vec3& x);
std::complex<double> fd_sample_u(const FdGrid& g, const Eigen::VectorXcd& u, const Vec3& x);
std::complex<double> fd_sample_q3(const FdGrid& g, const Eigen::VectorXcd& u, const Vec3& x);

// Complex temperature amplitude of the laterally adiabatic two-layer slab
// driven by the scenario's top and bottom Dirichlet amplitudes,
//   U(z) = a cosh(g z) + b sinh(g z),  g = sqrt(i omega Cp / K)
// per layer, with temperature and flux continuity at z = 0. Requires
// Dirichlet top and bottom and zero-flux sides.
std::complex<double> slab_harmonic_amplitude(const BilayerScenario& s, double omega, double z);

// Relative difference norms of a test vector against a reference.
struct FieldDiff {
  double linf = 0.0, l2 = 0.0;
};
FieldDiff compare_fields(const std::vector<double>& test, const std::vector<double>& ref);

}  // namespace dribem
