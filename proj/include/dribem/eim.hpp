#pragma once

// Equivalent-inclusion coupling. Each ellipsoidal inhomogeneity is replaced
// by matrix material carrying polynomial eigen temperature-gradient and
// eigen source fields. Their coefficients become extra unknowns, fixed by
// Taylor-matching the consistency conditions
//   ustar_i = kappa_K du/dx_i,   s = kappa_C du/dt,
//   kappa_K = 1 - K_incl / K_matrix,   kappa_C = 1 - Cp_incl / Cp_matrix,
// at the inclusion centroid, where u is the total temperature field
// (boundary, capacity and all eigen contributions, own included).

#include <Eigen/Dense>

#include <vector>

#include <dribem/bem.hpp>
#include <dribem/drm.hpp>
#include <dribem/model.hpp>

namespace dribem {

// Derivative rows of the interior representation at one evaluation point x,
// strictly inside the box (the interface plane is allowed, the outer
// boundary is not). Row b holds derivative slot b (shared 20-slot layout),
// so that
//   d^b u(x) = -u_rows.row(b) * u + q_rows.row(b) * q - a_rows.row(b) * adot
//              + c_rows.row(b) * c + s_rows.row(b) * s
// with u spanning boundary nodes then interior interpolation points.
struct RepJet {
  Eigen::MatrixXd u_rows, q_rows, a_rows, c_rows, s_rows;
};

RepJet build_rep_jet_rows(const BilayerScenario& s, const BoundaryMesh& m, const DofTables& dofs,
                          const RbfSystem& rbf, const Vec3& x, int max_order);

// Temperature disturbance derivative slots (up to max_order) produced at x
// by given eigen coefficient vectors.
std::vector<double> eval_disturbance(const BilayerScenario& s, const Vec3& x,
                                     const Eigen::VectorXd& cvec, const Eigen::VectorXd& svec,
                                     int max_order);

// Factor-independent part of the eigen-coefficient equations: one row per
// eigen dof (all gradient dofs first, then all source dofs), each holding
// the representation derivative it constrains at its inclusion centroid,
// plus the kappa * Taylor-weight factor and the dof's own column.
struct EimRowBlock {
  EigenDofLayout lay;
  int nc = 0;  // gradient rows
  int ns = 0;  // source rows
  Eigen::MatrixXd rep_u, rep_q, rep_a, rep_c, rep_s;
  Eigen::VectorXd kappa_w;    // kappa_K * w for gradient rows, kappa_C * w for source rows
  std::vector<int> ident_col;  // own column within the c (or s) block
};

// Builds the block. Throws ValidationError when an inclusion stores heat in
// a layer that cannot (Cp_incl != 0 while the layer's Cp == 0); when both
// vanish the source rows degenerate to s = 0.
EimRowBlock build_eim_row_block(const BilayerScenario& s, const BoundaryMesh& m,
                                const DofTables& dofs, const RbfSystem& rbf);

// System rows in the shared sign convention
//   H*u - Gm*q + S*adot - ED*c - EL*s = rhs,
// where rhs carries the time-history part of the source rows (zero here;
// the stepper forms it from stored states). bdf_factor is the weight of the
// current value in the backward-difference derivative (1/dt or 3/(2*dt)).
struct EimRows {
  Eigen::MatrixXd H, Gm, S, ED, EL;
};
EimRows assemble_eim_rows_transient(const EimRowBlock& blk, double bdf_factor);

// Same rows for time-harmonic states, where d/dt becomes i*omega.
struct EimRowsC {
  Eigen::MatrixXcd H, Gm, S, ED, EL;
};
EimRowsC assemble_eim_rows_harmonic(const EimRowBlock& blk, double omega);

// Representation derivative each source row constrains, evaluated from a
// grouped solution state; the stepper keeps these as time history.
Eigen::VectorXd eim_srow_state(const EimRowBlock& blk, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& q, const Eigen::VectorXd& adot,
                               const Eigen::VectorXd& c, const Eigen::VectorXd& s);

}  // namespace dribem
