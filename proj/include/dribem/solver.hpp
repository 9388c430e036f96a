#pragma once

// Coupled solve. The boundary-integral rows, the capacity interpolation rows
// and the inclusion consistency rows are stacked into one dense linear system
// in the grouped unknowns
//   [ temperatures | fluxes | interpolation weights | eigen gradients | eigen sources ]
// and either stepped in time with backward differences (one-step start,
// two-step afterwards), solved directly for the steady state, or solved as a
// complex time-harmonic system where d/dt becomes i*omega.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <dribem/bem.hpp>
#include <dribem/drm.hpp>
#include <dribem/eim.hpp>
#include <dribem/model.hpp>

namespace dribem {

// Validated scenario plus every time-independent operator block, with the
// column bookkeeping separating prescribed boundary values from unknowns.
struct GlobalSystem {
  BilayerScenario s;  // validated copy; microstructure block expanded
  BoundaryMesh mesh;
  std::vector<Vec3> interior_pts;
  RbfSystem rbf;
  BieBlocks bie;       // collocation rows, dof tables, H / Gm / ED / EL
  Eigen::MatrixXd S;   // capacity block against the interpolation weights
  EimRowBlock eim;     // factor-independent inclusion rows (empty if none)

  int nM = 0;  // interpolation centers: boundary nodes + interior points
  int nQ = 0;  // flux dofs
  int n_unknown = 0;

  // Unknown column of each temperature / flux dof, -1 when the value is
  // prescribed by a boundary condition.
  std::vector<int> ucol, qcol;
  int adot0 = 0, c0 = 0, s0 = 0;  // segment offsets in the unknown vector

  // Prescribed dofs in known-column order: ('u', node) or ('q', flux dof).
  std::vector<std::pair<char, int>> known;

  // Conditioning scale of the eigen coefficient columns (gradients then
  // sources); the solved unknown is coefficient / scale.
  Eigen::VectorXd eig_scale;

  std::vector<std::string> warnings;
};

// Builds every operator block for the scenario. Throws ValidationError on an
// inconsistent scenario and NumericalError if the row/unknown counts disagree.
GlobalSystem build_global(const BilayerScenario& s);

// Prescribed boundary values at time t in known-column order (temperatures on
// Dirichlet faces; fluxes K du/dn = -outward flux on Neumann faces).
Eigen::VectorXd known_values(const GlobalSystem& g, double t);

// Grouped fields at one time level plus the backward-difference history the
// next step needs. A checkpoint stores exactly these members (see the config
// module for the JSON round trip).
struct TimeState {
  double t = 0.0;
  int step = 0;            // completed steps since t0
  double residual = 0.0;   // relative solve residual of the latest level
  Eigen::VectorXd u;       // temperatures at nodes then interior points
  Eigen::VectorXd q;       // fluxes K du/dn at the flux dofs
  Eigen::VectorXd adot;    // interpolation weights of the capacity rate
  Eigen::VectorXd c;       // eigen gradient coefficients
  Eigen::VectorXd se;      // eigen source coefficients
  Eigen::VectorXd u_prev;  // temperatures one level back (zeros before step 1)
  Eigen::VectorXd v_cur;   // source-row derivative states at this level
  Eigen::VectorXd v_prev;  // and one level back
};

// Zero fields at the scenario start time (fields are changes from u0).
TimeState initial_state(const GlobalSystem& g);

// Factored backward-difference operators, built lazily: the one-step variant
// on the first step, the two-step variant afterwards, each reused across all
// later steps of its kind.
struct TransientWork {
  struct Variant {
    bool ready = false;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd Au;          // equilibrated unknown-column matrix
    Eigen::MatrixXd Ak;          // prescribed-value columns, row scaling applied
    Eigen::VectorXd row_scale;
  };
  Variant bdf1, bdf2;
};

// Advances st by one time level of s.time.dt.
void step_transient(const GlobalSystem& g, TransientWork& w, TimeState& st);

// Direct solve with all time derivatives zero; boundary values at t0.
TimeState solve_steady(const GlobalSystem& g);

// Complex amplitudes of the time-harmonic state u(x, t) = Re[U(x) e^{i w t}];
// boundary amplitudes are the FaceBc amplitudes with zero phase.
struct HarmonicResult {
  double omega = 0.0;
  double residual = 0.0;  // relative solve residual
  Eigen::VectorXcd u, q, adot, c, se;
};
HarmonicResult solve_harmonic(const GlobalSystem& g, double omega);

}  // namespace dribem
