#include <dribem/drm.hpp>

#include <dribem/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace dribem {

namespace {

// hot-path value + gradient of the particular solution, d = x - center
inline void gamma_value_grad(const Vec3& d, double ell, double& val, Vec3& grad) {
  double r2 = d.squaredNorm();
  double r = std::sqrt(r2);
  double rho = r / ell;
  val = r2 * (1.0 / 6.0 + rho / 12.0 + rho * rho / 20.0);
  grad = (1.0 / 3.0 + rho / 4.0 + rho * rho / 5.0) * d;
}

}  // namespace

double rbf_chi(double rhat) { return 1.0 + rhat + rhat * rhat; }

FieldJet20 rbf_gamma(const Vec3& x, const Vec3& center, double ell, int max_order) {
  if (ell <= 0.0) throw ValidationError("rbf_gamma: length scale must be positive");
  if (max_order < 0 || max_order > 3)
    throw ValidationError("rbf_gamma: derivative order must be in 0..3");
  FieldJet20 out{};
  Vec3 d = x - center;
  double r2 = d.squaredNorm();
  double r = std::sqrt(r2);
  double rho = r / ell;
  out[0] = r2 * (1.0 / 6.0 + rho / 12.0 + rho * rho / 20.0);
  if (max_order < 1) return out;

  // radial factorization: dGamma/dx_i = g1 d_i with g1 = Gamma'(r)/r, and the
  // recurrences g1'(r)/r = g2, g2'(r)/r = g3
  double g1 = 1.0 / 3.0 + rho / 4.0 + rho * rho / 5.0;
  for (int i = 0; i < 3; ++i) {
    int e[3] = {0, 0, 0};
    e[i] = 1;
    out[field_jet_index(e[0], e[1], e[2])] = g1 * d[i];
  }
  if (max_order < 2) return out;

  if (r == 0.0) {
    // limit of the Hessian; the third derivative is direction dependent at
    // the centre, those slots stay zero
    for (int i = 0; i < 3; ++i) {
      int e[3] = {0, 0, 0};
      e[i] = 2;
      out[field_jet_index(e[0], e[1], e[2])] = 1.0 / 3.0;
    }
    return out;
  }

  double g2 = 1.0 / (4.0 * ell * r) + 2.0 / (5.0 * ell * ell);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      int e[3] = {0, 0, 0};
      ++e[i];
      ++e[j];
      out[field_jet_index(e[0], e[1], e[2])] = (i == j ? g1 : 0.0) + g2 * d[i] * d[j];
    }
  if (max_order < 3) return out;

  double g3 = -1.0 / (4.0 * ell * r2 * r);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        int e[3] = {0, 0, 0};
        ++e[i];
        ++e[j];
        ++e[k];
        double v = g3 * d[i] * d[j] * d[k];
        if (i == j) v += g2 * d[k];
        if (i == k) v += g2 * d[j];
        if (j == k) v += g2 * d[i];
        out[field_jet_index(e[0], e[1], e[2])] = v;
      }
  return out;
}

RbfSystem assemble_interpolation(const BilayerScenario& s, const BoundaryMesh& m,
                                 const std::vector<Vec3>& interior_pts) {
  RbfSystem r;
  r.centers = m.nodes;
  r.centers.insert(r.centers.end(), interior_pts.begin(), interior_pts.end());
  r.ell = std::max({s.la, s.lb, s.h1 + s.h2});
  const int M = (int)r.centers.size();
  const double tol = 1e-12 * r.ell;
  r.F.resize(M, M);
  for (int a = 0; a < M; ++a) {
    r.F(a, a) = 1.0;
    for (int b = a + 1; b < M; ++b) {
      double dist = (r.centers[a] - r.centers[b]).norm();
      if (dist < tol)
        throw ValidationError("assemble_interpolation: coincident centers " +
                              std::to_string(a) + " and " + std::to_string(b));
      double v = rbf_chi(dist / r.ell);
      r.F(a, b) = v;
      r.F(b, a) = v;
    }
  }
  return r;
}

std::vector<DrmSrcPt> drm_source_points(const BilayerScenario& s, const BoundaryMesh& m) {
  const double Ku = s.upper.K, Kl = s.lower.K;
  const double Cpu = s.upper.Cp, Cpl = s.lower.Cp;
  std::vector<DrmSrcPt> srcs;
  std::vector<Qp> q;
  for (int e = 0; e < m.num_elements(); ++e) {
    const RectPanel& p = m.elem_panel[e];
    double cp = m.elem_upper[e] ? Cpu : Cpl;
    double k = m.elem_upper[e] ? Ku : Kl;
    q.clear();
    panel_rule(p, panel_base_order, q);
    for (const Qp& g : q)
      srcs.push_back({g.x, p.normal, g.w * cp, -g.w * cp / k, k, e, false});
  }
  // interface corrections survive only with mismatched layers: continuity of
  // the temperature kernel G and of the flux kernel F = K dG/dz' across the
  // plane leaves the paired upper/lower boundary terms
  //   (Cp_lo - Cp_up) G dGamma/dz' + (Cp_up/K_up - Cp_lo/K_lo) F Gamma
  for (int ip = 0; ip < (int)m.interface_panels.size(); ++ip) {
    const RectPanel& p = m.interface_panels[ip];
    q.clear();
    panel_rule(p, panel_base_order, q);
    for (const Qp& g : q)
      srcs.push_back({g.x, p.normal, g.w * (Cpl - Cpu), g.w * (Cpu / Ku - Cpl / Kl), Ku, ip, true});
  }
  return srcs;
}

namespace {

// centers in column form so per-point basis sweeps vectorize
struct CenterCols {
  Eigen::ArrayXd x, y, z;
};

CenterCols center_cols(const std::vector<Vec3>& centers) {
  const int M = (int)centers.size();
  CenterCols c;
  c.x.resize(M);
  c.y.resize(M);
  c.z.resize(M);
  for (int m = 0; m < M; ++m) {
    c.x[m] = centers[m].x();
    c.y[m] = centers[m].y();
    c.z[m] = centers[m].z();
  }
  return c;
}

struct GammaScratch {
  Eigen::ArrayXd cn, r2, r, acc;
};

// adds sign * (quadrature sum) of one row/panel pair to W's row r; the basis
// sweep over all centers runs on whole arrays, which is what keeps the
// refined-quadrature correction pass affordable
void accum_row_panel(const Vec3& xc, const Vec3& n, const std::vector<Qp>& qps, double sign,
                     double c1, double c2, double Kass, double Ku, double Kl,
                     const CenterCols& C, double ell, GammaScratch& ws, Eigen::MatrixXd& W,
                     int r) {
  const int M = (int)C.x.size();
  const double e1 = 0.25 / ell, e2 = 0.2 / (ell * ell);
  const double v1 = 1.0 / (12.0 * ell), v2 = 1.0 / (20.0 * ell * ell);
  ws.cn = n.x() * C.x + n.y() * C.y + n.z() * C.z;
  if (ws.acc.size() != M) ws.acc.resize(M);
  ws.acc.setZero();
  for (const Qp& q : qps) {
    KernelPair kp = greens_pair(xc, q.x, Ku, Kl);
    double a1 = sign * q.w * c1 * kp.G;
    double a2 = sign * q.w * c2 * Kass * kp.grad_src.dot(n);
    ws.r2 = (q.x.x() - C.x).square() + (q.x.y() - C.y).square() + (q.x.z() - C.z).square();
    ws.r = ws.r2.sqrt();
    ws.acc += (a1 * (q.x.dot(n) - ws.cn)) * (1.0 / 3.0 + e1 * ws.r + e2 * ws.r2) +
              a2 * (ws.r2 * (1.0 / 6.0 + v1 * ws.r + v2 * ws.r2));
  }
  W.row(r) += ws.acc.matrix().transpose();
}

}  // namespace

Eigen::MatrixXd assemble_drm_blocks(const BilayerScenario& s, const BoundaryMesh& m,
                                    const std::vector<CollocRow>& rows, const RbfSystem& rbf) {
  const int nr = (int)rows.size();
  const int M = (int)rbf.centers.size();
  const double Ku = s.upper.K, Kl = s.lower.K;
  const double Cpu = s.upper.Cp, Cpl = s.lower.Cp;
  const double ell = rbf.ell;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(nr, M);

  std::vector<DrmSrcPt> srcs = drm_source_points(s, m);
  const int ns = (int)srcs.size();

  // bulk of the matrix: fixed-rule points batched into two rank products,
  //   W += A1 * B1 + A2 * B2
  // with the temperature kernel against the basis normal derivative and the
  // flux kernel against the basis value
  const int chunk = 1024;
  Eigen::MatrixXd A1(nr, chunk), A2(nr, chunk), B1(chunk, M), B2(chunk, M);
  for (int q0 = 0; q0 < ns; q0 += chunk) {
    const int nc = std::min(chunk, ns - q0);
#pragma omp parallel for schedule(static)
    for (int q = 0; q < nc; ++q) {
      const DrmSrcPt& sp = srcs[q0 + q];
      for (int mm = 0; mm < M; ++mm) {
        double val;
        Vec3 grad;
        gamma_value_grad(sp.x - rbf.centers[mm], ell, val, grad);
        B1(q, mm) = sp.c1 * grad.dot(sp.n);
        B2(q, mm) = sp.c2 * val;
      }
    }
#pragma omp parallel for schedule(static)
    for (int r = 0; r < nr; ++r)
      for (int q = 0; q < nc; ++q) {
        const DrmSrcPt& sp = srcs[q0 + q];
        KernelPair kp = greens_pair(rows[r].x, sp.x, Ku, Kl);
        A1(r, q) = kp.G;
        A2(r, q) = sp.Kass * kp.grad_src.dot(sp.n);
      }
    W.noalias() += A1.leftCols(nc) * B1.topRows(nc) + A2.leftCols(nc) * B2.topRows(nc);
  }

  // fixed-rule base sets, recomputed so corrections subtract exactly what
  // the batched pass added
  std::vector<std::vector<Qp>> base_el(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e)
    panel_rule(m.elem_panel[e], panel_base_order, base_el[e]);
  std::vector<std::vector<Qp>> base_if(m.interface_panels.size());
  for (int ip = 0; ip < (int)m.interface_panels.size(); ++ip)
    panel_rule(m.interface_panels[ip], panel_base_order, base_if[ip]);

  static const double cp[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

  const CenterCols cc = center_cols(rbf.centers);

#pragma omp parallel for schedule(dynamic, 4)
  for (int r = 0; r < nr; ++r) {
    const CollocRow& row = rows[r];
    std::vector<Qp> ref;
    GammaScratch ws;
    for (int e = 0; e < m.num_elements(); ++e) {
      const RectPanel& p = m.elem_panel[e];
      int sing = row_singular_corner(m, row, e);
      if (sing < 0 && !panel_needs_subdivision(p, row.x)) continue;
      ref.clear();
      if (sing >= 0) {
        double xi0 = sing < 4 ? cp[sing][0] : row.xi;
        double eta0 = sing < 4 ? cp[sing][1] : row.eta;
        integrate_singular(p, xi0, eta0, ref);
      } else {
        integrate_element(p, row.x, ref);
      }
      double cpe = m.elem_upper[e] ? Cpu : Cpl;
      double ke = m.elem_upper[e] ? Ku : Kl;
      accum_row_panel(row.x, p.normal, base_el[e], -1.0, cpe, -cpe / ke, ke, Ku, Kl,
                      cc, ell, ws, W, r);
      accum_row_panel(row.x, p.normal, ref, 1.0, cpe, -cpe / ke, ke, Ku, Kl,
                      cc, ell, ws, W, r);
    }
    double c1i = Cpl - Cpu;
    double c2i = Cpu / Ku - Cpl / Kl;
    if (c1i != 0.0 || c2i != 0.0) {
      for (int ip = 0; ip < (int)m.interface_panels.size(); ++ip) {
        const RectPanel& p = m.interface_panels[ip];
        int sing = row.x.z() == 0.0 ? panel_corner_index(p, row.x) : -1;
        if (sing < 0 && !panel_needs_subdivision(p, row.x)) continue;
        ref.clear();
        if (sing >= 0)
          integrate_singular(p, cp[sing][0], cp[sing][1], ref);
        else
          integrate_element(p, row.x, ref);
        accum_row_panel(row.x, p.normal, base_if[ip], -1.0, c1i, c2i, Ku, Ku, Kl,
                        cc, ell, ws, W, r);
        accum_row_panel(row.x, p.normal, ref, 1.0, c1i, c2i, Ku, Ku, Kl,
                        cc, ell, ws, W, r);
      }
    }
  }

  // local free term: the capacity volume integral captures the point-source
  // singularity with the solid-angle fraction each layer subtends at the
  // collocation point. Off the interface the source strength scales with the
  // local conductivity; exactly on the plane the near field of G is
  // 1/(2 pi (K_up + K_lo) rho) from both sides, which replaces 1/K by
  // 2/(K_up + K_lo) for both fractions.
#pragma omp parallel for schedule(static)
  for (int r = 0; r < nr; ++r) {
    const CollocRow& row = rows[r];
    double coef;
    if (row.omega_up > 0.0 && row.omega_lo > 0.0)
      coef = 2.0 * (row.omega_up * Cpu + row.omega_lo * Cpl) / (Ku + Kl);
    else
      coef = row.omega_up * Cpu / Ku + row.omega_lo * Cpl / Kl;
    for (int mm = 0; mm < M; ++mm) {
      double val;
      Vec3 grad;
      gamma_value_grad(row.x - rbf.centers[mm], ell, val, grad);
      W(r, mm) -= coef * val;
    }
  }

  return W;
}

}  // namespace dribem
