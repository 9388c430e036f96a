#include <dribem/postprocess.hpp>

#include <dribem/kernels.hpp>
#include <dribem/quadrature.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace dribem {

namespace {

template <class T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// hot-path value + gradient of the capacity particular solution
inline void gamma_vg(const Vec3& d, double ell, double& val, Vec3& grad) {
  double r2 = d.squaredNorm();
  double rho = std::sqrt(r2) / ell;
  val = r2 * (1.0 / 6.0 + rho / 12.0 + rho * rho / 20.0);
  grad = (1.0 / 3.0 + rho / 4.0 + rho * rho / 5.0) * d;
}

// interpolation centers in column form; the per-point basis sweeps run on
// whole arrays, which keeps the capacity terms affordable at refined
// quadrature points
struct GammaCols {
  Eigen::ArrayXd x, y, z;
  double ell = 0.0;
};

GammaCols gamma_cols(const RbfSystem& rbf) {
  GammaCols c;
  const int M = (int)rbf.centers.size();
  c.x.resize(M);
  c.y.resize(M);
  c.z.resize(M);
  for (int m = 0; m < M; ++m) {
    c.x[m] = rbf.centers[m].x();
    c.y[m] = rbf.centers[m].y();
    c.z[m] = rbf.centers[m].z();
  }
  c.ell = rbf.ell;
  return c;
}

struct GammaWork {
  Eigen::ArrayXd r2, r, val, gn;
};

// basis values and normal derivatives over all centers at one source point
inline void gamma_arrays(const GammaCols& C, const Vec3& xp, const Vec3& n, GammaWork& ws) {
  const double e1 = 0.25 / C.ell, e2 = 0.2 / (C.ell * C.ell);
  const double v1 = 1.0 / (12.0 * C.ell), v2 = 1.0 / (20.0 * C.ell * C.ell);
  ws.r2 = (xp.x() - C.x).square() + (xp.y() - C.y).square() + (xp.z() - C.z).square();
  ws.r = ws.r2.sqrt();
  ws.val = ws.r2 * (1.0 / 6.0 + v1 * ws.r + v2 * ws.r2);
  ws.gn = (xp.dot(n) - (n.x() * C.x + n.y() * C.y + n.z() * C.z)) *
          (1.0 / 3.0 + e1 * ws.r + e2 * ws.r2);
}

inline void gamma_contract(const GammaWork& ws, const Eigen::VectorXd& adot, double& ghat,
                           double& ghn) {
  ghat = ws.val.matrix().dot(adot);
  ghn = ws.gn.matrix().dot(adot);
}

inline void gamma_contract(const GammaWork& ws, const Eigen::VectorXcd& adot,
                           std::complex<double>& ghat, std::complex<double>& ghn) {
  ghat = {ws.val.matrix().dot(adot.real()), ws.val.matrix().dot(adot.imag())};
  ghn = {ws.gn.matrix().dot(adot.real()), ws.gn.matrix().dot(adot.imag())};
}

// One fixed-rule source point of the evaluation sum. elem is -1 for points
// on the virtual interface panels, which carry only the capacity term.
struct SrcGeom {
  Vec3 x, n;
  double w = 0.0;
  double xi = 0.0, eta = 0.0;
  double Ke = 0.0, Cpe = 0.0;
  int elem = -1;
};

struct SrcTable {
  std::vector<SrcGeom> pts;
  std::vector<int> el_start, if_start;  // first point of each panel
  int per_panel = 0;
  double c1i = 0.0, c2i = 0.0;  // interface capacity factors
};

SrcTable build_sources(const BilayerScenario& s, const BoundaryMesh& m) {
  SrcTable tab;
  tab.per_panel = panel_base_order * panel_base_order;
  tab.c1i = s.lower.Cp - s.upper.Cp;
  tab.c2i = s.upper.Cp / s.upper.K - s.lower.Cp / s.lower.K;
  std::vector<Qp> q;
  tab.el_start.resize(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) {
    const RectPanel& p = m.elem_panel[e];
    tab.el_start[e] = (int)tab.pts.size();
    q.clear();
    panel_rule(p, panel_base_order, q);
    for (const Qp& g : q) {
      SrcGeom sp;
      sp.x = g.x;
      sp.n = p.normal;
      sp.w = g.w;
      sp.xi = g.xi;
      sp.eta = g.eta;
      sp.Ke = m.elem_upper[e] ? s.upper.K : s.lower.K;
      sp.Cpe = m.elem_upper[e] ? s.upper.Cp : s.lower.Cp;
      sp.elem = e;
      tab.pts.push_back(sp);
    }
  }
  if (tab.c1i != 0.0 || tab.c2i != 0.0) {
    tab.if_start.resize(m.interface_panels.size());
    for (int ip = 0; ip < (int)m.interface_panels.size(); ++ip) {
      const RectPanel& p = m.interface_panels[ip];
      tab.if_start[ip] = (int)tab.pts.size();
      q.clear();
      panel_rule(p, panel_base_order, q);
      for (const Qp& g : q) {
        SrcGeom sp;
        sp.x = g.x;
        sp.n = p.normal;
        sp.w = g.w;
        sp.xi = g.xi;
        sp.eta = g.eta;
        tab.pts.push_back(sp);
      }
    }
  }
  return tab;
}

// solved densities carried by one source point
template <class T>
struct Density {
  T uhat{}, qhat{};  // temperature and flux interpolants (outer points)
  T ghat{}, ghn{};   // capacity basis sum and its normal derivative
};

template <class T>
std::vector<Density<T>> make_densities(const GlobalSystem& g, const SrcTable& tab,
                                       const VecX<T>& u, const VecX<T>& q, const VecX<T>& adot,
                                       bool with_cap) {
  const int M = (int)g.rbf.centers.size();
  std::vector<Density<T>> den(tab.pts.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < (int)tab.pts.size(); ++i) {
    const SrcGeom& sp = tab.pts[i];
    Density<T> d;
    if (sp.elem >= 0) {
      double nsh[4];
      shape4(sp.xi, sp.eta, nsh);
      const auto& en = g.mesh.elem_nodes[sp.elem];
      const auto& eq = g.bie.dofs.elem_qdof[sp.elem];
      for (int k = 0; k < 4; ++k) {
        d.uhat += nsh[k] * u[en[k]];
        d.qhat += nsh[k] * q[eq[k]];
      }
    }
    if (with_cap) {
      for (int mm = 0; mm < M; ++mm) {
        double val;
        Vec3 grad;
        gamma_vg(sp.x - g.rbf.centers[mm], g.rbf.ell, val, grad);
        d.ghat += adot[mm] * val;
        d.ghn += adot[mm] * grad.dot(sp.n);
      }
    }
    den[i] = d;
  }
  return den;
}

// capacity basis sum at a refined quadrature point
template <class T>
void gamma_hat_at(const RbfSystem& rbf, const VecX<T>& adot, const Vec3& x, const Vec3& n,
                  T& ghat, T& ghn) {
  ghat = T{};
  ghn = T{};
  for (int mm = 0; mm < (int)rbf.centers.size(); ++mm) {
    double val;
    Vec3 grad;
    gamma_vg(x - rbf.centers[mm], rbf.ell, val, grad);
    ghat += adot[mm] * val;
    ghn += adot[mm] * grad.dot(n);
  }
}

std::vector<double> disturbance4(const BilayerScenario& s, const Vec3& x,
                                 const Eigen::VectorXd& c, const Eigen::VectorXd& se) {
  return eval_disturbance(s, x, c, se, 1);
}

std::vector<std::complex<double>> disturbance4(const BilayerScenario& s, const Vec3& x,
                                               const Eigen::VectorXcd& c,
                                               const Eigen::VectorXcd& se) {
  std::vector<double> re = eval_disturbance(s, x, c.real(), se.real(), 1);
  std::vector<double> im = eval_disturbance(s, x, c.imag(), se.imag(), 1);
  std::vector<std::complex<double>> out(re.size());
  for (size_t b = 0; b < re.size(); ++b) out[b] = {re[b], im[b]};
  return out;
}

// value and first derivatives of the representation at one interior point;
// slot maps 0..3 to the shared derivative-slot layout
template <class T>
std::array<T, 4> eval_one(const GlobalSystem& g, const SrcTable& tab,
                          const std::vector<Density<T>>& den, const VecX<T>& u, const VecX<T>& q,
                          const VecX<T>& adot, const std::vector<T>& dist, const Vec3& x,
                          const int slot[4], bool with_cap) {
  const BoundaryMesh& m = g.mesh;
  const double Ku = g.s.upper.K, Kl = g.s.lower.K;
  const double Cpu = g.s.upper.Cp, Cpl = g.s.lower.Cp;
  std::array<T, 4> vals{};

  auto add_outer = [&](const Vec3& n, double w, double Ke, double Cpe, const Vec3& xq, T uh, T qh,
                       T gh, T ghn, double sign) {
    KernelEval1 ke = greens_eval1(x, xq, Ku, Kl);
    const Vec3 gsn = ke.Gsx * n;
    const double Gb[4] = {ke.G, ke.Gx[0], ke.Gx[1], ke.Gx[2]};
    const double hb[4] = {ke.Gs.dot(n), gsn[0], gsn[1], gsn[2]};
    for (int b = 0; b < 4; ++b) {
      vals[b] += sign * w * (Gb[b] * qh - Ke * hb[b] * uh);
      vals[b] -= sign * w * Cpe * (Gb[b] * ghn - hb[b] * gh);
    }
  };
  auto add_iface = [&](const Vec3& n, double w, const Vec3& xq, T gh, T ghn, double sign) {
    KernelEval1 ke = greens_eval1(x, xq, Ku, Kl);
    const Vec3 gsn = ke.Gsx * n;
    const double Gb[4] = {ke.G, ke.Gx[0], ke.Gx[1], ke.Gx[2]};
    const double hb[4] = {ke.Gs.dot(n), gsn[0], gsn[1], gsn[2]};
    for (int b = 0; b < 4; ++b)
      vals[b] -= sign * w * (tab.c1i * Gb[b] * ghn + tab.c2i * Ku * hb[b] * gh);
  };

  for (int i = 0; i < (int)tab.pts.size(); ++i) {
    const SrcGeom& sp = tab.pts[i];
    const Density<T>& d = den[i];
    if (sp.elem >= 0)
      add_outer(sp.n, sp.w, sp.Ke, sp.Cpe, sp.x, d.uhat, d.qhat, d.ghat, d.ghn, 1.0);
    else if (with_cap)
      add_iface(sp.n, sp.w, sp.x, d.ghat, d.ghn, 1.0);
  }

  // near panels: remove the fixed-rule share and add an adaptive one
  std::vector<Qp> ref;
  for (int e = 0; e < m.num_elements(); ++e) {
    const RectPanel& p = m.elem_panel[e];
    if (!panel_needs_subdivision(p, x)) continue;
    for (int i = tab.el_start[e]; i < tab.el_start[e] + tab.per_panel; ++i) {
      const SrcGeom& sp = tab.pts[i];
      const Density<T>& d = den[i];
      add_outer(sp.n, sp.w, sp.Ke, sp.Cpe, sp.x, d.uhat, d.qhat, d.ghat, d.ghn, -1.0);
    }
    ref.clear();
    integrate_element(p, x, ref);
    const double Ke = m.elem_upper[e] ? Ku : Kl;
    const double Cpe = m.elem_upper[e] ? Cpu : Cpl;
    const auto& en = m.elem_nodes[e];
    const auto& eq = g.bie.dofs.elem_qdof[e];
    for (const Qp& rq : ref) {
      double nsh[4];
      shape4(rq.xi, rq.eta, nsh);
      T uh{}, qh{};
      for (int k = 0; k < 4; ++k) {
        uh += nsh[k] * u[en[k]];
        qh += nsh[k] * q[eq[k]];
      }
      T gh{}, ghn{};
      if (with_cap) gamma_hat_at(g.rbf, adot, rq.x, p.normal, gh, ghn);
      add_outer(p.normal, rq.w, Ke, Cpe, rq.x, uh, qh, gh, ghn, 1.0);
    }
  }
  if (with_cap && (tab.c1i != 0.0 || tab.c2i != 0.0)) {
    for (int ip = 0; ip < (int)m.interface_panels.size(); ++ip) {
      const RectPanel& p = m.interface_panels[ip];
      // a point exactly on this panel needs the singular fan; the kernels
      // there are one-sided limits, which stay integrable
      bool on_panel = false;
      double xi0 = 0.0, eta0 = 0.0;
      if (x.z() == 0.0) {
        xi0 = (x - p.origin).dot(p.du) / p.du.squaredNorm();
        eta0 = (x - p.origin).dot(p.dv) / p.dv.squaredNorm();
        const double ep = 1e-12;
        if (xi0 > -ep && xi0 < 1.0 + ep && eta0 > -ep && eta0 < 1.0 + ep) {
          on_panel = true;
          xi0 = std::min(1.0, std::max(0.0, xi0));
          eta0 = std::min(1.0, std::max(0.0, eta0));
        }
      }
      if (!on_panel && !panel_needs_subdivision(p, x)) continue;
      for (int i = tab.if_start[ip]; i < tab.if_start[ip] + tab.per_panel; ++i) {
        const SrcGeom& sp = tab.pts[i];
        const Density<T>& d = den[i];
        add_iface(sp.n, sp.w, sp.x, d.ghat, d.ghn, -1.0);
      }
      ref.clear();
      if (on_panel)
        integrate_singular(p, xi0, eta0, ref);
      else
        integrate_element(p, x, ref);
      for (const Qp& rq : ref) {
        T gh, ghn;
        gamma_hat_at(g.rbf, adot, rq.x, p.normal, gh, ghn);
        add_iface(p.normal, rq.w, rq.x, gh, ghn, 1.0);
      }
    }
  }

  // capacity free term of the point's own layer
  if (with_cap) {
    double coef;
    if (x.z() > 0.0)
      coef = Cpu / Ku;
    else if (x.z() < 0.0)
      coef = Cpl / Kl;
    else
      coef = (Cpu + Cpl) / (Ku + Kl);
    for (int mm = 0; mm < (int)g.rbf.centers.size(); ++mm) {
      double val;
      Vec3 grad;
      gamma_vg(x - g.rbf.centers[mm], g.rbf.ell, val, grad);
      vals[0] += coef * adot[mm] * val;
      for (int b = 1; b < 4; ++b) vals[b] += coef * adot[mm] * grad[b - 1];
    }
  }

  for (int b = 0; b < 4; ++b) vals[b] += dist[slot[b]];
  return vals;
}

Vec3 nudge_off_surfaces(const BilayerScenario& s, Vec3 x) {
  for (const Inclusion& inc : s.inclusions) {
    Vec3 d = x - inc.center;
    const Vec3& a = inc.semi_axes;
    double xi = std::sqrt(d.x() * d.x() / (a.x() * a.x()) + d.y() * d.y() / (a.y() * a.y()) +
                          d.z() * d.z() / (a.z() * a.z()));
    if (std::abs(xi - 1.0) >= 1e-6) continue;
    Vec3 nrm(d.x() / (a.x() * a.x()), d.y() / (a.y() * a.y()), d.z() / (a.z() * a.z()));
    nrm.normalize();
    double step = 2e-6 * std::cbrt(a.x() * a.y() * a.z());
    x += (xi >= 1.0 ? step : -step) * nrm;
  }
  return x;
}

void require_interior(const BilayerScenario& s, const Vec3& x) {
  if (!(x.x() > s.x1min() && x.x() < s.x1max() && x.y() > s.x2min() && x.y() < s.x2max() &&
        x.z() > s.x3min() && x.z() < s.x3max()))
    throw ValidationError("eval_fields: point (" + std::to_string(x.x()) + ", " +
                          std::to_string(x.y()) + ", " + std::to_string(x.z()) +
                          ") must lie strictly inside the box");
}

void jet_slots(int slot[4]) {
  slot[0] = field_jet_index(0, 0, 0);
  slot[1] = field_jet_index(1, 0, 0);
  slot[2] = field_jet_index(0, 1, 0);
  slot[3] = field_jet_index(0, 0, 1);
}

double local_conductivity(const BilayerScenario& s, int phase) {
  if (phase >= 2) return s.inclusions[phase - 2].props.K;
  return phase == 0 ? s.upper.K : s.lower.K;
}

}  // namespace

int phase_tag(const BilayerScenario& s, const Vec3& x) {
  for (int i = 0; i < (int)s.inclusions.size(); ++i) {
    const Inclusion& inc = s.inclusions[i];
    Vec3 d = x - inc.center;
    const Vec3& a = inc.semi_axes;
    double xi2 = d.x() * d.x() / (a.x() * a.x()) + d.y() * d.y() / (a.y() * a.y()) +
                 d.z() * d.z() / (a.z() * a.z());
    if (xi2 < 1.0) return 2 + i;
  }
  return x.z() >= 0.0 ? 0 : 1;
}

std::vector<FieldSample> eval_fields(const GlobalSystem& g, const TimeState& st,
                                     const std::vector<Vec3>& pts) {
  std::vector<Vec3> xs(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    xs[i] = nudge_off_surfaces(g.s, pts[i]);
    require_interior(g.s, xs[i]);
  }
  SrcTable tab = build_sources(g.s, g.mesh);
  const bool cap = st.adot.size() > 0 && st.adot.cwiseAbs().maxCoeff() > 0.0;
  std::vector<Density<double>> den = make_densities<double>(g, tab, st.u, st.q, st.adot, cap);
  int slot[4];
  jet_slots(slot);
  std::vector<FieldSample> out(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < (int)pts.size(); ++i) {
    std::vector<double> dist = disturbance4(g.s, xs[i], st.c, st.se);
    std::array<double, 4> v =
        eval_one<double>(g, tab, den, st.u, st.q, st.adot, dist, xs[i], slot, cap);
    FieldSample f;
    f.x = xs[i];
    f.t = st.t;
    f.u = v[0];
    f.grad = Vec3(v[1], v[2], v[3]);
    f.phase = phase_tag(g.s, xs[i]);
    f.q = -local_conductivity(g.s, f.phase) * f.grad;
    out[i] = f;
  }
  return out;
}

FieldSample eval_field(const GlobalSystem& g, const TimeState& st, const Vec3& x) {
  return eval_fields(g, st, std::vector<Vec3>{x}).front();
}

std::vector<HarmonicSample> eval_fields(const GlobalSystem& g, const HarmonicResult& h,
                                        const std::vector<Vec3>& pts) {
  using Cplx = std::complex<double>;
  std::vector<Vec3> xs(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    xs[i] = nudge_off_surfaces(g.s, pts[i]);
    require_interior(g.s, xs[i]);
  }
  SrcTable tab = build_sources(g.s, g.mesh);
  const bool cap = h.adot.size() > 0 && h.adot.cwiseAbs().maxCoeff() > 0.0;
  std::vector<Density<Cplx>> den = make_densities<Cplx>(g, tab, h.u, h.q, h.adot, cap);
  int slot[4];
  jet_slots(slot);
  std::vector<HarmonicSample> out(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < (int)pts.size(); ++i) {
    std::vector<Cplx> dist = disturbance4(g.s, xs[i], h.c, h.se);
    std::array<Cplx, 4> v = eval_one<Cplx>(g, tab, den, h.u, h.q, h.adot, dist, xs[i], slot, cap);
    HarmonicSample f;
    f.x = xs[i];
    f.omega = h.omega;
    f.u = v[0];
    f.grad << v[1], v[2], v[3];
    f.phase = phase_tag(g.s, xs[i]);
    f.q = -local_conductivity(g.s, f.phase) * f.grad;
    out[i] = f;
  }
  return out;
}

HarmonicSample eval_field(const GlobalSystem& g, const HarmonicResult& h, const Vec3& x) {
  return eval_fields(g, h, std::vector<Vec3>{x}).front();
}

LayerProfile layer_average(const GlobalSystem& g, const TimeState& st, int nlayers) {
  if (nlayers < 1) throw ValidationError("layer_average: need at least one layer");
  const int nxy = 10, nz = 20;
  const BilayerScenario& s = g.s;
  const double thick = (s.x3max() - s.x3min()) / nlayers;
  std::vector<Vec3> pts;
  pts.reserve((size_t)nlayers * nxy * nxy * nz);
  for (int l = 0; l < nlayers; ++l) {
    const double zlo = s.x3min() + l * thick;
    for (int k = 0; k < nz; ++k) {
      const double z = zlo + (k + 0.5) * thick / nz;
      for (int i = 0; i < nxy; ++i) {
        const double x1 = s.x1min() + (i + 0.5) * s.la / nxy;
        for (int j = 0; j < nxy; ++j)
          pts.emplace_back(x1, s.x2min() + (j + 0.5) * s.lb / nxy, z);
      }
    }
  }
  std::vector<FieldSample> fs = eval_fields(g, st, pts);
  LayerProfile prof;
  prof.per_layer = nxy * nxy * nz;
  prof.z.resize(nlayers);
  prof.u_avg.assign(nlayers, 0.0);
  prof.q3_avg.assign(nlayers, 0.0);
  for (int l = 0; l < nlayers; ++l) {
    prof.z[l] = s.x3min() + (l + 0.5) * thick;
    const size_t base = (size_t)l * prof.per_layer;
    for (int k = 0; k < prof.per_layer; ++k) {
      prof.u_avg[l] += fs[base + k].u;
      prof.q3_avg[l] += fs[base + k].q.z();
    }
    prof.u_avg[l] /= prof.per_layer;
    prof.q3_avg[l] /= prof.per_layer;
  }
  return prof;
}

namespace {

void append_num(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void write_field_csv(std::ostream& os, const std::vector<FieldSample>& rows) {
  os << "x1,x2,x3,t,u,q1,q2,q3,phase\n";
  std::string line;
  for (const FieldSample& f : rows) {
    line.clear();
    const double cols[8] = {f.x.x(), f.x.y(), f.x.z(), f.t, f.u, f.q.x(), f.q.y(), f.q.z()};
    for (double v : cols) {
      append_num(line, v);
      line += ',';
    }
    line += std::to_string(f.phase);
    os << line << '\n';
  }
}

void write_field_csv(const std::string& path, const std::vector<FieldSample>& rows) {
  std::ofstream os(path);
  if (!os) throw ValidationError("write_field_csv: cannot open " + path);
  write_field_csv(os, rows);
}

std::vector<FieldSample> read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x1,x2,x3,t,u,q1,q2,q3,phase")
    throw ValidationError("read_field_csv: missing or unexpected header line");
  std::vector<FieldSample> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    FieldSample f;
    double c[8];
    int phase = 0;
    int got = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%d", &c[0], &c[1], &c[2],
                          &c[3], &c[4], &c[5], &c[6], &c[7], &phase);
    if (got != 9) throw ValidationError("read_field_csv: malformed row: " + line);
    f.x = Vec3(c[0], c[1], c[2]);
    f.t = c[3];
    f.u = c[4];
    f.q = Vec3(c[5], c[6], c[7]);
    f.phase = phase;
    rows.push_back(f);
  }
  return rows;
}

std::vector<FieldSample> read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("read_field_csv: cannot open " + path);
  return read_field_csv(is);
}

}  // namespace dribem
