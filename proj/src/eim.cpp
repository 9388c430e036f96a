#include <dribem/eim.hpp>

#include <dribem/eshelby.hpp>
#include <dribem/jet.hpp>
#include <dribem/kernels.hpp>
#include <dribem/quadrature.hpp>

#include <cmath>
#include <string>

namespace dribem {

namespace {

// Voigt pair tables shared with the influence tensors
constexpr int kVp[6] = {0, 1, 2, 1, 0, 0};
constexpr int kVq[6] = {0, 1, 2, 2, 2, 1};

void monomial_exponents(int P, int e[3]) {
  e[0] = e[1] = e[2] = 0;
  if (P == 0) return;
  if (P <= 3) {
    e[P - 1] = 1;
    return;
  }
  ++e[kVp[P - 4]];
  ++e[kVq[P - 4]];
}

// Taylor weight of monomial P when matching a smooth field's expansion
double taylor_weight(int P) { return (P == 4 || P == 5 || P == 6) ? 0.5 : 1.0; }

inline void gamma_vg(const Vec3& d, double ell, double& val, Vec3& grad) {
  double r2 = d.squaredNorm();
  double rho = std::sqrt(r2) / ell;
  val = r2 * (1.0 / 6.0 + rho / 12.0 + rho * rho / 20.0);
  grad = (1.0 / 3.0 + rho / 4.0 + rho * rho / 5.0) * d;
}

}  // namespace

RepJet build_rep_jet_rows(const BilayerScenario& s, const BoundaryMesh& m, const DofTables& dofs,
                          const RbfSystem& rbf, const Vec3& x, int max_order) {
  if (max_order < 0 || max_order > 3)
    throw ValidationError("build_rep_jet_rows: derivative order must be in 0..3");
  if (!(x.x() > s.x1min() && x.x() < s.x1max() && x.y() > s.x2min() && x.y() < s.x2max() &&
        x.z() > -s.h2 && x.z() < s.h1))
    throw ValidationError("build_rep_jet_rows: point must lie strictly inside the box");

  const int nb = jet_num_coeffs(max_order);
  const int nu = (int)rbf.centers.size();  // nodes + interior points
  const int nq = dofs.num_qdofs();
  EigenDofLayout lay = eigen_dof_layout(s);
  const double Ku = s.upper.K, Kl = s.lower.K;
  const double Cpu = s.upper.Cp, Cpl = s.lower.Cp;

  RepJet out;
  out.u_rows = Eigen::MatrixXd::Zero(nb, nu);
  out.q_rows = Eigen::MatrixXd::Zero(nb, nq);
  out.a_rows = Eigen::MatrixXd::Zero(nb, nu);
  out.c_rows = Eigen::MatrixXd::Zero(nb, lay.total_c);
  out.s_rows = Eigen::MatrixXd::Zero(nb, lay.total_s);

  std::vector<Qp> qps;
  for (int e = 0; e < m.num_elements(); ++e) {
    const RectPanel& p = m.elem_panel[e];
    qps.clear();
    if (panel_needs_subdivision(p, x))
      integrate_element(p, x, qps);
    else
      panel_rule(p, panel_base_order, qps);
    const double Ke = m.elem_upper[e] ? Ku : Kl;
    const double Cpe = m.elem_upper[e] ? Cpu : Cpl;
    const auto& en = m.elem_nodes[e];
    const auto& eq = dofs.elem_qdof[e];
    for (const Qp& q : qps) {
      KernelEval ke = greens_derivs(x, q.x, Ku, Kl, max_order);
      double nsh[4];
      shape4(q.xi, q.eta, nsh);
      for (int b = 0; b < nb; ++b) {
        double hn = p.normal.x() * ke.Gs[0][b] + p.normal.y() * ke.Gs[1][b] +
                    p.normal.z() * ke.Gs[2][b];
        double fk = Ke * hn;
        for (int c = 0; c < 4; ++c) {
          out.u_rows(b, en[c]) += q.w * fk * nsh[c];
          out.q_rows(b, eq[c]) += q.w * ke.G[b] * nsh[c];
        }
        for (int mm = 0; mm < nu; ++mm) {
          double val;
          Vec3 grad;
          gamma_vg(q.x - rbf.centers[mm], rbf.ell, val, grad);
          out.a_rows(b, mm) += q.w * Cpe * (ke.G[b] * grad.dot(p.normal) - hn * val);
        }
      }
    }
  }

  const double c1i = Cpl - Cpu;
  const double c2i = Cpu / Ku - Cpl / Kl;
  if (c1i != 0.0 || c2i != 0.0) {
    for (const RectPanel& p : m.interface_panels) {
      qps.clear();
      if (panel_needs_subdivision(p, x))
        integrate_element(p, x, qps);
      else
        panel_rule(p, panel_base_order, qps);
      for (const Qp& q : qps) {
        KernelEval ke = greens_derivs(x, q.x, Ku, Kl, max_order);
        for (int b = 0; b < nb; ++b) {
          double fk = Ku * ke.Gs[2][b];  // flux kernel, continuous across the plane
          for (int mm = 0; mm < nu; ++mm) {
            double val;
            Vec3 grad;
            gamma_vg(q.x - rbf.centers[mm], rbf.ell, val, grad);
            out.a_rows(b, mm) += q.w * (c1i * ke.G[b] * grad.z() + c2i * fk * val);
          }
        }
      }
    }
  }

  // capacity free term: interior points capture the full point-source
  // weight of their layer; on the interface plane the near field is
  // 1/(2 pi (K_up + K_lo) rho) from both sides
  double coef;
  if (x.z() > 0.0)
    coef = Cpu / Ku;
  else if (x.z() < 0.0)
    coef = Cpl / Kl;
  else
    coef = (Cpu + Cpl) / (Ku + Kl);
  for (int mm = 0; mm < nu; ++mm) {
    FieldJet20 g = rbf_gamma(x, rbf.centers[mm], rbf.ell, max_order);
    for (int b = 0; b < nb; ++b) out.a_rows(b, mm) -= coef * g[b];
  }

  for (int I = 0; I < (int)s.inclusions.size(); ++I) {
    const Inclusion& inc = s.inclusions[I];
    EshelbyEval ev = eshelby_eval(x, inc, Ku, Kl, max_order);
    const int np = lay.np[I];
    const double cps = material_at(inc.center, s).Cp;  // matrix side of the inclusion
    for (int b = 0; b < nb; ++b) {
      for (int i = 0; i < 3; ++i)
        for (int P = 0; P < np; ++P) out.c_rows(b, lay.c_offset[I] + i * np + P) = ev.D[i][P][b];
      for (int P = 0; P < np; ++P) out.s_rows(b, lay.s_offset[I] + P) = cps * ev.L[P][b];
    }
  }
  return out;
}

std::vector<double> eval_disturbance(const BilayerScenario& s, const Vec3& x,
                                     const Eigen::VectorXd& cvec, const Eigen::VectorXd& svec,
                                     int max_order) {
  EigenDofLayout lay = eigen_dof_layout(s);
  if (cvec.size() != lay.total_c || svec.size() != lay.total_s)
    throw ValidationError("eval_disturbance: coefficient vector sizes do not match the layout");
  const int nb = jet_num_coeffs(max_order);
  std::vector<double> out(nb, 0.0);
  for (int I = 0; I < (int)s.inclusions.size(); ++I) {
    const Inclusion& inc = s.inclusions[I];
    EshelbyEval ev = eshelby_eval(x, inc, s.upper.K, s.lower.K, max_order);
    const int np = lay.np[I];
    const double cps = material_at(inc.center, s).Cp;
    for (int b = 0; b < nb; ++b) {
      double acc = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int P = 0; P < np; ++P) acc += ev.D[i][P][b] * cvec[lay.c_offset[I] + i * np + P];
      for (int P = 0; P < np; ++P) acc += cps * ev.L[P][b] * svec[lay.s_offset[I] + P];
      out[b] += acc;
    }
  }
  return out;
}

EimRowBlock build_eim_row_block(const BilayerScenario& s, const BoundaryMesh& m,
                                const DofTables& dofs, const RbfSystem& rbf) {
  EimRowBlock blk;
  blk.lay = eigen_dof_layout(s);
  blk.nc = blk.lay.total_c;
  blk.ns = blk.lay.total_s;
  const int rows = blk.nc + blk.ns;
  if (rows == 0) return blk;

  blk.kappa_w = Eigen::VectorXd::Zero(rows);
  blk.ident_col.assign(rows, -1);

  bool sized = false;
  for (int I = 0; I < (int)s.inclusions.size(); ++I) {
    const Inclusion& inc = s.inclusions[I];
    const MaterialProps& mat = material_at(inc.center, s);
    const double kappa_k = 1.0 - inc.props.K / mat.K;
    double kappa_c = 0.0;
    if (mat.Cp == 0.0) {
      if (inc.props.Cp != 0.0)
        throw ValidationError("inclusion " + std::to_string(I) +
                              " stores heat in a layer with zero heat capacity");
      // both capacities vanish: source rows reduce to s = 0
    } else {
      kappa_c = 1.0 - inc.props.Cp / mat.Cp;
    }

    const int np = blk.lay.np[I];
    const int order = np == 1 ? 0 : (np == 4 ? 1 : 2);
    RepJet jet = build_rep_jet_rows(s, m, dofs, rbf, inc.center, order + 1);
    if (!sized) {
      blk.rep_u = Eigen::MatrixXd::Zero(rows, jet.u_rows.cols());
      blk.rep_q = Eigen::MatrixXd::Zero(rows, jet.q_rows.cols());
      blk.rep_a = Eigen::MatrixXd::Zero(rows, jet.a_rows.cols());
      blk.rep_c = Eigen::MatrixXd::Zero(rows, jet.c_rows.cols());
      blk.rep_s = Eigen::MatrixXd::Zero(rows, jet.s_rows.cols());
      sized = true;
    }

    for (int P = 0; P < np; ++P) {
      int e[3];
      monomial_exponents(P, e);
      const double w = taylor_weight(P);
      for (int i = 0; i < 3; ++i) {
        int ei[3] = {e[0], e[1], e[2]};
        ++ei[i];
        const int slot = field_jet_index(ei[0], ei[1], ei[2]);
        const int r = blk.lay.c_offset[I] + i * np + P;
        blk.rep_u.row(r) = jet.u_rows.row(slot);
        blk.rep_q.row(r) = jet.q_rows.row(slot);
        blk.rep_a.row(r) = jet.a_rows.row(slot);
        blk.rep_c.row(r) = jet.c_rows.row(slot);
        blk.rep_s.row(r) = jet.s_rows.row(slot);
        blk.kappa_w[r] = kappa_k * w;
        blk.ident_col[r] = r;
      }
      const int slot = field_jet_index(e[0], e[1], e[2]);
      const int r = blk.nc + blk.lay.s_offset[I] + P;
      blk.rep_u.row(r) = jet.u_rows.row(slot);
      blk.rep_q.row(r) = jet.q_rows.row(slot);
      blk.rep_a.row(r) = jet.a_rows.row(slot);
      blk.rep_c.row(r) = jet.c_rows.row(slot);
      blk.rep_s.row(r) = jet.s_rows.row(slot);
      blk.kappa_w[r] = kappa_c * w;
      blk.ident_col[r] = blk.lay.s_offset[I] + P;
    }
  }
  return blk;
}

EimRows assemble_eim_rows_transient(const EimRowBlock& blk, double bdf_factor) {
  EimRows out;
  const int rows = blk.nc + blk.ns;
  out.H = Eigen::MatrixXd::Zero(rows, blk.rep_u.cols());
  out.Gm = Eigen::MatrixXd::Zero(rows, blk.rep_q.cols());
  out.S = Eigen::MatrixXd::Zero(rows, blk.rep_a.cols());
  out.ED = Eigen::MatrixXd::Zero(rows, blk.rep_c.cols());
  out.EL = Eigen::MatrixXd::Zero(rows, blk.rep_s.cols());
  for (int r = 0; r < rows; ++r) {
    const double f = r < blk.nc ? blk.kappa_w[r] : blk.kappa_w[r] * bdf_factor;
    out.H.row(r) = f * blk.rep_u.row(r);
    out.Gm.row(r) = f * blk.rep_q.row(r);
    out.S.row(r) = f * blk.rep_a.row(r);
    out.ED.row(r) = f * blk.rep_c.row(r);
    out.EL.row(r) = f * blk.rep_s.row(r);
    if (r < blk.nc)
      out.ED(r, blk.ident_col[r]) -= 1.0;
    else
      out.EL(r, blk.ident_col[r]) -= 1.0;
  }
  return out;
}

EimRowsC assemble_eim_rows_harmonic(const EimRowBlock& blk, double omega) {
  EimRowsC out;
  const int rows = blk.nc + blk.ns;
  out.H = Eigen::MatrixXcd::Zero(rows, blk.rep_u.cols());
  out.Gm = Eigen::MatrixXcd::Zero(rows, blk.rep_q.cols());
  out.S = Eigen::MatrixXcd::Zero(rows, blk.rep_a.cols());
  out.ED = Eigen::MatrixXcd::Zero(rows, blk.rep_c.cols());
  out.EL = Eigen::MatrixXcd::Zero(rows, blk.rep_s.cols());
  const std::complex<double> iw(0.0, omega);
  for (int r = 0; r < rows; ++r) {
    const std::complex<double> f =
        r < blk.nc ? std::complex<double>(blk.kappa_w[r], 0.0) : blk.kappa_w[r] * iw;
    out.H.row(r) = f * blk.rep_u.row(r).cast<std::complex<double>>();
    out.Gm.row(r) = f * blk.rep_q.row(r).cast<std::complex<double>>();
    out.S.row(r) = f * blk.rep_a.row(r).cast<std::complex<double>>();
    out.ED.row(r) = f * blk.rep_c.row(r).cast<std::complex<double>>();
    out.EL.row(r) = f * blk.rep_s.row(r).cast<std::complex<double>>();
    if (r < blk.nc)
      out.ED(r, blk.ident_col[r]) -= 1.0;
    else
      out.EL(r, blk.ident_col[r]) -= 1.0;
  }
  return out;
}

Eigen::VectorXd eim_srow_state(const EimRowBlock& blk, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& q, const Eigen::VectorXd& adot,
                               const Eigen::VectorXd& c, const Eigen::VectorXd& s) {
  if (blk.ns == 0) return Eigen::VectorXd();
  auto bu = blk.rep_u.bottomRows(blk.ns);
  auto bq = blk.rep_q.bottomRows(blk.ns);
  auto ba = blk.rep_a.bottomRows(blk.ns);
  auto bc = blk.rep_c.bottomRows(blk.ns);
  auto bs = blk.rep_s.bottomRows(blk.ns);
  return -bu * u + bq * q - ba * adot + bc * c + bs * s;
}

}  // namespace dribem
