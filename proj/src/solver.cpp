#include <dribem/solver.hpp>

#include <cmath>
#include <string>
#include <utility>

namespace dribem {

namespace {

using Cplx = std::complex<double>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// start of each segment in the full column space [u | q | adot | c | s]
struct FullCols {
  int u0, q0, a0, c0, s0, total;
};

FullCols full_cols(const GlobalSystem& g) {
  FullCols fc;
  fc.u0 = 0;
  fc.q0 = g.nM;
  fc.a0 = fc.q0 + g.nQ;
  fc.c0 = fc.a0 + g.nM;
  fc.s0 = fc.c0 + g.eim.lay.total_c;
  fc.total = fc.s0 + g.eim.lay.total_s;
  return fc;
}

// Full-column system matrix for one time-derivative factor. ufac multiplies
// the temperature in the interpolation rows (the backward-difference leading
// coefficient, or i*omega in the harmonic case); er carries the inclusion
// rows assembled with the matching factor.
template <class Scalar, class ER>
Mat<Scalar> full_matrix(const GlobalSystem& g, const ER& er, Scalar ufac) {
  const FullCols fc = full_cols(g);
  const int nb = (int)g.bie.rows.size();
  const int tc = g.eim.lay.total_c;
  const int ts = g.eim.lay.total_s;
  const int ne = g.eim.nc + g.eim.ns;
  Mat<Scalar> A = Mat<Scalar>::Zero(nb + g.nM + ne, fc.total);

  // boundary integral rows: H u - Gm q + S adot - ED c - EL s = 0
  A.block(0, fc.u0, nb, g.nM) = g.bie.H.template cast<Scalar>();
  A.block(0, fc.q0, nb, g.nQ) = (-g.bie.Gm).template cast<Scalar>();
  A.block(0, fc.a0, nb, g.nM) = g.S.template cast<Scalar>();
  if (tc > 0) A.block(0, fc.c0, nb, tc) = (-g.bie.ED).template cast<Scalar>();
  if (ts > 0) A.block(0, fc.s0, nb, ts) = (-g.bie.EL).template cast<Scalar>();

  // interpolation rows: F adot = du/dt at each center
  A.block(nb, fc.a0, g.nM, g.nM) = g.rbf.F.template cast<Scalar>();
  for (int m = 0; m < g.nM; ++m) A(nb + m, fc.u0 + m) -= ufac;

  // inclusion consistency rows, same sign convention as the integral rows
  if (ne > 0) {
    const int r0 = nb + g.nM;
    A.block(r0, fc.u0, ne, g.nM) = er.H;
    A.block(r0, fc.q0, ne, g.nQ) = -er.Gm;
    A.block(r0, fc.a0, ne, g.nM) = er.S;
    A.block(r0, fc.c0, ne, tc) = -er.ED;
    A.block(r0, fc.s0, ne, ts) = -er.EL;
  }
  return A;
}

template <class Scalar>
struct SplitOps {
  Mat<Scalar> Au, Ak;
  Eigen::VectorXd row_scale;
};

// Applies the eigen-column conditioning, separates prescribed-value columns
// from unknown ones and equilibrates the rows.
template <class Scalar>
SplitOps<Scalar> split_and_scale(const GlobalSystem& g, Mat<Scalar>& A) {
  const FullCols fc = full_cols(g);
  const int neig = g.eim.lay.total_c + g.eim.lay.total_s;
  for (int j = 0; j < neig; ++j) A.col(fc.c0 + j) *= g.eig_scale[j];

  SplitOps<Scalar> out;
  out.Au.resize(A.rows(), g.n_unknown);
  out.Ak.resize(A.rows(), (int)g.known.size());
  int kslot = 0;
  for (int k = 0; k < g.nM; ++k) {
    if (g.ucol[k] >= 0)
      out.Au.col(g.ucol[k]) = A.col(fc.u0 + k);
    else
      out.Ak.col(kslot++) = A.col(fc.u0 + k);
  }
  for (int d = 0; d < g.nQ; ++d) {
    if (g.qcol[d] >= 0)
      out.Au.col(g.qcol[d]) = A.col(fc.q0 + d);
    else
      out.Ak.col(kslot++) = A.col(fc.q0 + d);
  }
  out.Au.middleCols(g.adot0, g.nM) = A.middleCols(fc.a0, g.nM);
  if (neig > 0) out.Au.middleCols(g.c0, neig) = A.middleCols(fc.c0, neig);

  out.row_scale.resize(A.rows());
  for (int r = 0; r < A.rows(); ++r) {
    double m = out.Au.row(r).cwiseAbs().maxCoeff();
    if (out.Ak.cols() > 0) m = std::max(m, out.Ak.row(r).cwiseAbs().maxCoeff());
    if (!(m > 0.0))
      throw NumericalError("system row " + std::to_string(r) + " is identically zero");
    out.row_scale[r] = 1.0 / m;
    out.Au.row(r) *= out.row_scale[r];
    if (out.Ak.cols() > 0) out.Ak.row(r) *= out.row_scale[r];
  }
  return out;
}

// Distributes one solution vector back into the grouped fields, merging the
// prescribed values in.
template <class Scalar>
void scatter(const GlobalSystem& g, const Vec<Scalar>& y, const Vec<Scalar>& gv,
             Vec<Scalar>& u, Vec<Scalar>& q, Vec<Scalar>& adot, Vec<Scalar>& c,
             Vec<Scalar>& se) {
  u.resize(g.nM);
  q.resize(g.nQ);
  int kslot = 0;
  for (int k = 0; k < g.nM; ++k) u[k] = g.ucol[k] >= 0 ? y[g.ucol[k]] : gv[kslot++];
  for (int d = 0; d < g.nQ; ++d) q[d] = g.qcol[d] >= 0 ? y[g.qcol[d]] : gv[kslot++];
  adot = y.segment(g.adot0, g.nM);
  const int tc = g.eim.lay.total_c;
  const int ts = g.eim.lay.total_s;
  c = g.eig_scale.head(tc).template cast<Scalar>().cwiseProduct(y.segment(g.c0, tc));
  se = g.eig_scale.tail(ts).template cast<Scalar>().cwiseProduct(y.segment(g.s0, ts));
}

void build_variant(const GlobalSystem& g, double bdf0, TransientWork::Variant& v) {
  EimRows er = assemble_eim_rows_transient(g.eim, bdf0);
  Mat<double> A = full_matrix<double>(g, er, bdf0);
  SplitOps<double> ops = split_and_scale<double>(g, A);
  v.lu.compute(ops.Au);
  v.Au = std::move(ops.Au);
  v.Ak = std::move(ops.Ak);
  v.row_scale = std::move(ops.row_scale);
  v.ready = true;
}

template <class Scalar>
double relative_residual(const Mat<Scalar>& Au, const Vec<Scalar>& y, const Vec<Scalar>& b) {
  const double bn = b.cwiseAbs().maxCoeff();
  if (bn == 0.0) return (Au * y).cwiseAbs().maxCoeff();
  return (Au * y - b).cwiseAbs().maxCoeff() / bn;
}

}  // namespace

GlobalSystem build_global(const BilayerScenario& scen) {
  GlobalSystem g;
  g.s = scen;
  validate_scenario(g.s);
  g.mesh = build_box_mesh(g.s);
  g.interior_pts = interior_interpolation_points(g.s, &g.warnings);
  g.bie = assemble_bie_blocks(g.s, g.mesh, g.interior_pts);
  g.rbf = assemble_interpolation(g.s, g.mesh, g.interior_pts);
  g.S = assemble_drm_blocks(g.s, g.mesh, g.bie.rows, g.rbf);
  g.eim = build_eim_row_block(g.s, g.mesh, g.bie.dofs, g.rbf);

  const int nn = g.mesh.num_nodes();
  g.nM = nn + (int)g.interior_pts.size();
  g.nQ = g.bie.dofs.num_qdofs();
  g.ucol.assign(g.nM, -1);
  g.qcol.assign(g.nQ, -1);
  int col = 0;
  for (int k = 0; k < g.nM; ++k) {
    const bool pinned = k < nn && g.bie.dofs.u_known[k];
    if (!pinned) g.ucol[k] = col++;
  }
  for (int d = 0; d < g.nQ; ++d)
    if (!g.bie.dofs.q_known[d]) g.qcol[d] = col++;
  g.adot0 = col;
  col += g.nM;
  g.c0 = col;
  col += g.eim.lay.total_c;
  g.s0 = col;
  col += g.eim.lay.total_s;
  g.n_unknown = col;
  for (int k = 0; k < nn; ++k)
    if (g.bie.dofs.u_known[k]) g.known.push_back({'u', k});
  for (int d = 0; d < g.nQ; ++d)
    if (g.bie.dofs.q_known[d]) g.known.push_back({'q', d});

  const int n_rows = (int)g.bie.rows.size() + g.nM + g.eim.nc + g.eim.ns;
  if (n_rows != g.n_unknown)
    throw NumericalError("assembled " + std::to_string(n_rows) + " rows for " +
                         std::to_string(g.n_unknown) + " unknowns");

  const int tc = g.eim.lay.total_c;
  const int ts = g.eim.lay.total_s;
  g.eig_scale = Eigen::VectorXd::Ones(tc + ts);
  for (int I = 0; I < (int)g.s.inclusions.size(); ++I) {
    const Vec3& a = g.s.inclusions[I].semi_axes;
    const double ag = std::cbrt(a.x() * a.y() * a.z());
    const int np = g.eim.lay.np[I];
    for (int P = 0; P < np; ++P) {
      const int ord = P == 0 ? 0 : (P <= 3 ? 1 : 2);
      const double sc = std::pow(ag, ord);
      for (int i = 0; i < 3; ++i) g.eig_scale[g.eim.lay.c_offset[I] + i * np + P] = sc;
      g.eig_scale[tc + g.eim.lay.s_offset[I] + P] = sc;
    }
  }
  return g;
}

Eigen::VectorXd known_values(const GlobalSystem& g, double t) {
  Eigen::VectorXd gv((int)g.known.size());
  for (int i = 0; i < (int)g.known.size(); ++i) {
    const auto& slot = g.known[i];
    if (slot.first == 'u')
      gv[i] = g.s.bc[g.bie.dofs.u_bc_face[slot.second]].value(t);
    else
      gv[i] = -g.s.bc[g.bie.dofs.qdofs[slot.second].face].value(t);
  }
  return gv;
}

TimeState initial_state(const GlobalSystem& g) {
  TimeState st;
  st.t = g.s.time.t0;
  st.u = Eigen::VectorXd::Zero(g.nM);
  st.q = Eigen::VectorXd::Zero(g.nQ);
  st.adot = Eigen::VectorXd::Zero(g.nM);
  st.c = Eigen::VectorXd::Zero(g.eim.lay.total_c);
  st.se = Eigen::VectorXd::Zero(g.eim.lay.total_s);
  st.u_prev = Eigen::VectorXd::Zero(g.nM);
  st.v_cur = Eigen::VectorXd::Zero(g.eim.ns);
  st.v_prev = Eigen::VectorXd::Zero(g.eim.ns);
  return st;
}

void step_transient(const GlobalSystem& g, TransientWork& w, TimeState& st) {
  const double dt = g.s.time.dt;
  if (!(dt > 0.0)) throw ValidationError("time step must be positive for transient stepping");
  const bool first = st.step == 0;
  const double bdf0 = first ? 1.0 / dt : 1.5 / dt;
  TransientWork::Variant& v = first ? w.bdf1 : w.bdf2;
  if (!v.ready) build_variant(g, bdf0, v);

  // histories: the backward difference of x' at level n reads
  //   bdf0 * x'(n) - hist(x'(n-1), x'(n-2))
  Eigen::VectorXd hist_u, hist_v;
  if (first) {
    hist_u = st.u / dt;
    hist_v = st.v_cur / dt;
  } else {
    hist_u = (4.0 * st.u - st.u_prev) / (2.0 * dt);
    hist_v = (4.0 * st.v_cur - st.v_prev) / (2.0 * dt);
  }

  const int nb = (int)g.bie.rows.size();
  Eigen::VectorXd bh = Eigen::VectorXd::Zero(nb + g.nM + g.eim.nc + g.eim.ns);
  bh.segment(nb, g.nM) = -hist_u;
  if (g.eim.ns > 0)
    bh.segment(nb + g.nM + g.eim.nc, g.eim.ns) =
        -g.eim.kappa_w.tail(g.eim.ns).cwiseProduct(hist_v);

  const double tn = st.t + dt;
  Eigen::VectorXd gv = known_values(g, tn);
  Eigen::VectorXd b = v.row_scale.cwiseProduct(bh);
  if (gv.size() > 0) b -= v.Ak * gv;
  Eigen::VectorXd y = v.lu.solve(b);
  st.residual = relative_residual<double>(v.Au, y, b);

  st.u_prev = st.u;
  st.v_prev = st.v_cur;
  scatter<double>(g, y, gv, st.u, st.q, st.adot, st.c, st.se);
  st.v_cur = g.eim.ns > 0 ? eim_srow_state(g.eim, st.u, st.q, st.adot, st.c, st.se)
                          : Eigen::VectorXd::Zero(0);
  st.t = tn;
  ++st.step;
}

TimeState solve_steady(const GlobalSystem& g) {
  EimRows er = assemble_eim_rows_transient(g.eim, 0.0);
  Mat<double> A = full_matrix<double>(g, er, 0.0);
  SplitOps<double> ops = split_and_scale<double>(g, A);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(ops.Au);
  Eigen::VectorXd gv = known_values(g, g.s.time.t0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ops.Au.rows());
  if (gv.size() > 0) b = -ops.Ak * gv;
  Eigen::VectorXd y = lu.solve(b);

  TimeState st = initial_state(g);
  st.residual = relative_residual<double>(ops.Au, y, b);
  scatter<double>(g, y, gv, st.u, st.q, st.adot, st.c, st.se);
  // the interpolation rows force a zero time derivative here, so the solved
  // adot is pure roundoff; scrub it so field recovery can skip capacity work
  st.adot.setZero();
  if (g.eim.ns > 0) st.v_cur = eim_srow_state(g.eim, st.u, st.q, st.adot, st.c, st.se);
  return st;
}

HarmonicResult solve_harmonic(const GlobalSystem& g, double omega) {
  EimRowsC er = assemble_eim_rows_harmonic(g.eim, omega);
  Mat<Cplx> A = full_matrix<Cplx>(g, er, Cplx(0.0, omega));
  SplitOps<Cplx> ops = split_and_scale<Cplx>(g, A);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ops.Au);

  // boundary amplitudes with zero phase: the FaceBc amplitude itself
  Eigen::VectorXd gr((int)g.known.size());
  for (int i = 0; i < (int)g.known.size(); ++i) {
    const auto& slot = g.known[i];
    if (slot.first == 'u')
      gr[i] = g.s.bc[g.bie.dofs.u_bc_face[slot.second]].amplitude;
    else
      gr[i] = -g.s.bc[g.bie.dofs.qdofs[slot.second].face].amplitude;
  }
  Eigen::VectorXcd gv = gr.cast<Cplx>();
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(ops.Au.rows());
  if (gv.size() > 0) b = -ops.Ak * gv;
  Eigen::VectorXcd y = lu.solve(b);

  HarmonicResult out;
  out.omega = omega;
  out.residual = relative_residual<Cplx>(ops.Au, y, b);
  scatter<Cplx>(g, y, gv, out.u, out.q, out.adot, out.c, out.se);
  return out;
}

}  // namespace dribem
