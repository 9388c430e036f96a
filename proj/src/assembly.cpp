#include <dribem/bem.hpp>
#include <dribem/eshelby.hpp>
#include <dribem/kernels.hpp>

#include <cmath>

namespace dribem {

int row_singular_corner(const BoundaryMesh& m, const CollocRow& row, int e) {
  if (row.kind == RowKind::node) {
    for (int c = 0; c < 4; ++c)
      if (m.elem_nodes[e][c] == row.node) return c;
    return -1;
  }
  if (row.kind == RowKind::extra && row.elem == e) return 4;
  return -1;
}

int panel_corner_index(const RectPanel& p, const Vec3& x) {
  const double tol = 1e-10 * (p.du.norm() + p.dv.norm());
  const Vec3 corners[4] = {p.origin, Vec3(p.origin + p.du), Vec3(p.origin + p.du + p.dv),
                           Vec3(p.origin + p.dv)};
  for (int c = 0; c < 4; ++c)
    if ((x - corners[c]).norm() < tol) return c;
  return -1;
}

BieBlocks assemble_bie_blocks(const BilayerScenario& s, const BoundaryMesh& m,
                              const std::vector<Vec3>& interior_pts) {
  BieBlocks b;
  b.dofs = build_dof_tables(s, m);
  b.rows = build_colloc_rows(s, m, b.dofs, interior_pts);
  b.num_boundary_nodes = m.num_nodes();
  b.num_interior = (int)interior_pts.size();

  const int nrows = (int)b.rows.size();
  const int nu = b.num_boundary_nodes + b.num_interior;
  const int nq = b.dofs.num_qdofs();
  EigenDofLayout lay = eigen_dof_layout(s);
  b.H = Eigen::MatrixXd::Zero(nrows, nu);
  b.Gm = Eigen::MatrixXd::Zero(nrows, nq);
  b.ED = Eigen::MatrixXd::Zero(nrows, lay.total_c);
  b.EL = Eigen::MatrixXd::Zero(nrows, lay.total_s);

  std::vector<std::vector<Qp>> base(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) panel_rule(m.elem_panel[e], panel_base_order, base[e]);

  const double Ku = s.upper.K, Kl = s.lower.K;

#pragma omp parallel for schedule(dynamic, 8)
  for (int r = 0; r < nrows; ++r) {
    const CollocRow& row = b.rows[r];
    std::vector<Qp> scratch;
    for (int e = 0; e < m.num_elements(); ++e) {
      const RectPanel& p = m.elem_panel[e];
      const double Ke = m.elem_upper[e] ? Ku : Kl;
      const std::vector<Qp>* qps = &base[e];
      int sing = row_singular_corner(m, row, e);
      if (sing >= 0) {
        static const double cp[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        double xi0 = sing < 4 ? cp[sing][0] : row.xi;
        double eta0 = sing < 4 ? cp[sing][1] : row.eta;
        scratch.clear();
        integrate_singular(p, xi0, eta0, scratch);
        qps = &scratch;
      } else if (panel_needs_subdivision(p, row.x)) {
        scratch.clear();
        integrate_element(p, row.x, scratch);
        qps = &scratch;
      }
      const auto& en = m.elem_nodes[e];
      const auto& eq = b.dofs.elem_qdof[e];
      for (const Qp& q : *qps) {
        KernelPair kp = greens_pair(row.x, q.x, Ku, Kl);
        double fker = Ke * kp.grad_src.dot(p.normal);
        double nsh[4];
        shape4(q.xi, q.eta, nsh);
        for (int c = 0; c < 4; ++c) {
          b.H(r, en[c]) += q.w * fker * nsh[c];
          b.Gm(r, eq[c]) += q.w * kp.G * nsh[c];
        }
      }
    }
    for (size_t I = 0; I < s.inclusions.size(); ++I) {
      const Inclusion& inc = s.inclusions[I];
      EshelbyEval ev = eshelby_eval(row.x, inc, Ku, Kl, 0);
      double cp_side = inc.upper() ? s.upper.Cp : s.lower.Cp;
      int np = lay.np[I];
      for (int i = 0; i < 3; ++i)
        for (int P = 0; P < np; ++P)
          b.ED(r, lay.c_offset[I] + i * np + P) = ev.D[i][P][0];
      for (int P = 0; P < np; ++P)
        b.EL(r, lay.s_offset[I] + P) = cp_side * ev.L[P][0];
    }
  }

  free_terms_and_diagonal(b);
  return b;
}

namespace {

// the row applied to a constant unit field, accumulated term by term in
// column order; this fixed order is what the closure drives to exact zero
double ordered_row_sum(const Eigen::MatrixXd& H, int r) {
  double acc = 0.0;
  for (int k = 0; k < H.cols(); ++k) acc += H(r, k);
  return acc;
}

}  // namespace

void free_terms_and_diagonal(BieBlocks& b) {
  for (int r = 0; r < (int)b.rows.size(); ++r) {
    CollocRow& row = b.rows[r];
    if (row.unity.empty()) continue;
    if (row.unity.size() == 1) {
      int own = row.unity[0].first;
      b.H(r, own) = 0.0;
      double others = b.H.row(r).sum();
      b.H(r, own) = -others;
    } else {
      double total = b.H.row(r).sum();
      for (const auto& cw : row.unity) b.H(r, cw.first) += -total * cw.second;
    }
    // The single write above leaves the ordered sum a few ulp away from zero
    // because the later partial sums round differently once the closure value
    // lands mid row. Feed the leftover back into the heaviest closure column;
    // when the needed correction falls below that entry's quantization step,
    // retire the rest on the final column, whose value enters the ordered sum
    // last and therefore cancels the leading partial sum exactly.
    int touch = row.unity[0].first;
    double wbest = std::abs(row.unity[0].second);
    for (const auto& cw : row.unity)
      if (std::abs(cw.second) > wbest) {
        wbest = std::abs(cw.second);
        touch = cw.first;
      }
    for (int it = 0; it < 16; ++it) {
      double res = ordered_row_sum(b.H, r);
      if (res == 0.0) break;
      b.H(r, touch) -= res;
    }
    if (ordered_row_sum(b.H, r) != 0.0) {
      const int last = (int)b.H.cols() - 1;
      double head = 0.0;
      for (int k = 0; k < last; ++k) head += b.H(r, k);
      b.H(r, last) = -head;
    }
  }
}

}  // namespace dribem
