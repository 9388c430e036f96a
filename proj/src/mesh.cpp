#include <dribem/bem.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dribem {

namespace {

int lattice_index(int i, int j, int k, int nx, int ny) {
  return (k * (ny + 1) + j) * (nx + 1) + i;
}

}  // namespace

BoundaryMesh build_box_mesh(const BilayerScenario& s) {
  const MeshCounts& mc = s.mesh;
  if (mc.nx < 1 || mc.ny < 1 || mc.nz_upper < 1 || mc.nz_lower < 1)
    throw ValidationError("mesh counts must be at least 1 in each direction");

  BoundaryMesh m;
  m.nx = mc.nx;
  m.ny = mc.ny;
  m.nzu = mc.nz_upper;
  m.nzl = mc.nz_lower;
  const int nx = m.nx, ny = m.ny, nzl = m.nzl, nzu = m.nzu;
  const int nz = nzl + nzu;

  std::vector<double> xs(nx + 1), ys(ny + 1), zs(nz + 1);
  for (int i = 0; i <= nx; ++i) xs[i] = s.x1_0 + s.la * i / nx;
  for (int j = 0; j <= ny; ++j) ys[j] = s.x2_0 + s.lb * j / ny;
  for (int k = 0; k <= nz; ++k)
    zs[k] = (k <= nzl) ? -s.h2 * (nzl - k) / nzl : s.h1 * (k - nzl) / nzu;

  std::vector<int> id((nx + 1) * (ny + 1) * (nz + 1), -1);
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        bool surf = (i == 0 || i == nx || j == 0 || j == ny || k == 0 || k == nz);
        if (!surf) continue;
        id[lattice_index(i, j, k, nx, ny)] = (int)m.nodes.size();
        m.nodes.push_back(Vec3(xs[i], ys[j], zs[k]));
      }

  m.node_faces.resize(m.nodes.size());
  m.node_omega_upper.assign(m.nodes.size(), 0.0);
  m.node_omega_lower.assign(m.nodes.size(), 0.0);
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        int n = id[lattice_index(i, j, k, nx, ny)];
        if (n < 0) continue;
        auto& faces = m.node_faces[n];
        if (i == 0) faces.push_back(F_X1MIN);
        if (i == nx) faces.push_back(F_X1MAX);
        if (j == 0) faces.push_back(F_X2MIN);
        if (j == ny) faces.push_back(F_X2MAX);
        if (k == 0) faces.push_back(F_X3MIN);
        if (k == nz) faces.push_back(F_X3MAX);
        std::sort(faces.begin(), faces.end());
        double c = std::ldexp(1.0, -(int)faces.size());
        double z = m.nodes[n].z();
        if (z > 0.0) {
          m.node_omega_upper[n] = c;
        } else if (z < 0.0) {
          m.node_omega_lower[n] = c;
        } else {
          m.node_omega_upper[n] = 0.5 * c;
          m.node_omega_lower[n] = 0.5 * c;
        }
      }

  auto add_elem = [&](int c0, int c1, int c2, int c3, int face, bool upper) {
    std::array<int, 4> corners = {c0, c1, c2, c3};
    m.elem_nodes.push_back(corners);
    m.elem_face.push_back(face);
    m.elem_upper.push_back(upper ? 1 : 0);
    const Vec3& p0 = m.nodes[c0];
    m.elem_panel.push_back(
        make_panel(p0, Vec3(m.nodes[c1] - p0), Vec3(m.nodes[c3] - p0)));
  };
  auto nid = [&](int i, int j, int k) { return id[lattice_index(i, j, k, nx, ny)]; };

  // bottom (outward normal -e3) and top (+e3)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      add_elem(nid(i, j, 0), nid(i, j + 1, 0), nid(i + 1, j + 1, 0), nid(i + 1, j, 0),
               F_X3MIN, false);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      add_elem(nid(i, j, nz), nid(i + 1, j, nz), nid(i + 1, j + 1, nz), nid(i, j + 1, nz),
               F_X3MAX, true);
  // lateral faces; the layer is decided by the cell's position against the
  // interface lattice plane k = nzl
  for (int k = 0; k < nz; ++k) {
    bool upper = (k >= nzl);
    for (int j = 0; j < ny; ++j) {
      add_elem(nid(0, j, k), nid(0, j, k + 1), nid(0, j + 1, k + 1), nid(0, j + 1, k),
               F_X1MIN, upper);
      add_elem(nid(nx, j, k), nid(nx, j + 1, k), nid(nx, j + 1, k + 1), nid(nx, j, k + 1),
               F_X1MAX, upper);
    }
    for (int i = 0; i < nx; ++i) {
      add_elem(nid(i, 0, k), nid(i + 1, 0, k), nid(i + 1, 0, k + 1), nid(i, 0, k + 1),
               F_X2MIN, upper);
      add_elem(nid(i, ny, k), nid(i, ny, k + 1), nid(i + 1, ny, k + 1), nid(i + 1, ny, k),
               F_X2MAX, upper);
    }
  }

  m.node_elems.resize(m.nodes.size());
  for (int e = 0; e < m.num_elements(); ++e)
    for (int c = 0; c < 4; ++c) m.node_elems[m.elem_nodes[e][c]].push_back(e);

  // virtual interface panels, one per plan cell, normal +e3
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Vec3 origin(xs[i], ys[j], 0.0);
      m.interface_panels.push_back(make_panel(
          origin, Vec3(xs[i + 1] - xs[i], 0, 0), Vec3(0, ys[j + 1] - ys[j], 0)));
    }

  return m;
}

std::vector<Vec3> interior_interpolation_points(const BilayerScenario& s,
                                                std::vector<std::string>* warnings) {
  int cx = s.interior_counts[0], cy = s.interior_counts[1], cz = s.interior_counts[2];
  if (cx < 1 || cy < 1 || cz < 1)
    throw ValidationError("interior point counts must be at least 1");
  double dx = s.la / cx, dy = s.lb / cy, dz = (s.h1 + s.h2) / cz;
  std::vector<Vec3> pts;
  pts.reserve((size_t)cx * cy * cz);
  for (int k = 0; k < cz; ++k) {
    double z = -s.h2 + (k + 0.5) * dz;
    // keep the lattice clear of the material interface
    if (std::abs(z) < 0.25 * dz) z = (z >= 0.0) ? 0.25 * dz : -0.25 * dz;
    for (int j = 0; j < cy; ++j)
      for (int i = 0; i < cx; ++i)
        pts.push_back(Vec3(s.x1_0 + (i + 0.5) * dx, s.x2_0 + (j + 0.5) * dy, z));
  }

  // Push points that fall inside an inclusion out along the ray from its
  // centre until they reach 1.25 times the inclusion surface.
  const double target = 1.25;
  for (auto& p : pts) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      const Inclusion* hit = nullptr;
      for (const auto& inc : s.inclusions)
        if (inc.contains(p, target - 1e-12)) {
          hit = &inc;
          break;
        }
      if (!hit) break;
      Vec3 off = p - hit->center;
      Vec3 scaled(off.x() / hit->semi_axes.x(), off.y() / hit->semi_axes.y(),
                  off.z() / hit->semi_axes.z());
      double rho = scaled.norm();
      Vec3 moved;
      if (rho < 1e-12) {
        moved = hit->center + Vec3(target * hit->semi_axes.x(), 0.0, 0.0);
      } else {
        moved = hit->center + (target / rho) * off;
      }
      // stay inside the box and on the original side of the interface
      moved.x() = std::min(std::max(moved.x(), s.x1min() + 0.01 * dx), s.x1max() - 0.01 * dx);
      moved.y() = std::min(std::max(moved.y(), s.x2min() + 0.01 * dy), s.x2max() - 0.01 * dy);
      double zmin = (p.z() > 0.0) ? 0.05 * dz : -s.h2 + 0.01 * dz;
      double zmax = (p.z() > 0.0) ? s.h1 - 0.01 * dz : -0.05 * dz;
      moved.z() = std::min(std::max(moved.z(), zmin), zmax);
      if (warnings) {
        std::ostringstream os;
        os << "interior interpolation point (" << p.x() << ", " << p.y() << ", " << p.z()
           << ") lies within an inclusion; moved to (" << moved.x() << ", " << moved.y()
           << ", " << moved.z() << ")";
        warnings->push_back(os.str());
      }
      if ((moved - p).norm() < 1e-15) break;  // clamped back; accept as is
      p = moved;
    }
  }
  return pts;
}

DofTables build_dof_tables(const BilayerScenario& s, const BoundaryMesh& m) {
  DofTables t;
  int nn = m.num_nodes();
  t.u_known.assign(nn, 0);
  t.u_bc_face.assign(nn, -1);
  // flux dof ids per (face, node)
  std::vector<std::array<int, 6>> node_q(nn, {-1, -1, -1, -1, -1, -1});
  t.elem_qdof.resize(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) {
    int f = m.elem_face[e];
    for (int c = 0; c < 4; ++c) {
      int n = m.elem_nodes[e][c];
      int& q = node_q[n][f];
      if (q < 0) {
        q = (int)t.qdofs.size();
        t.qdofs.push_back({f, n});
        t.q_known.push_back(s.bc[f].kind == BcKind::neumann ? 1 : 0);
      }
      t.elem_qdof[e][c] = q;
    }
  }
  for (int n = 0; n < nn; ++n)
    for (int f : m.node_faces[n])
      if (s.bc[f].kind == BcKind::dirichlet) {
        t.u_known[n] = 1;
        if (t.u_bc_face[n] < 0) t.u_bc_face[n] = f;
      }
  return t;
}

EigenDofLayout eigen_dof_layout(const BilayerScenario& s) {
  EigenDofLayout lay;
  for (const auto& inc : s.inclusions) {
    int np = inc.eigen_order == EigenOrder::uniform ? 1
             : inc.eigen_order == EigenOrder::linear ? 4
                                                     : 10;
    lay.np.push_back(np);
    lay.c_offset.push_back(lay.total_c);
    lay.s_offset.push_back(lay.total_s);
    lay.total_c += 3 * np;
    lay.total_s += np;
  }
  return lay;
}

std::vector<CollocRow> build_colloc_rows(const BilayerScenario& s, const BoundaryMesh& m,
                                         const DofTables& dofs,
                                         const std::vector<Vec3>& interior_pts) {
  std::vector<CollocRow> rows;
  int nn = m.num_nodes();
  rows.reserve(nn + interior_pts.size());
  for (int n = 0; n < nn; ++n) {
    CollocRow r;
    r.kind = RowKind::node;
    r.x = m.nodes[n];
    r.node = n;
    r.omega_up = m.node_omega_upper[n];
    r.omega_lo = m.node_omega_lower[n];
    r.unity = {{n, 1.0}};
    rows.push_back(r);
  }
  // Nodes carrying several Dirichlet-face fluxes need one extra collocation
  // point per additional flux dof; place it inside an element of that face,
  // nudged 30% from the node's corner towards the element centre.
  for (int n = 0; n < nn; ++n) {
    std::vector<int> dfaces;
    for (int f : m.node_faces[n])
      if (s.bc[f].kind == BcKind::dirichlet) dfaces.push_back(f);
    for (size_t di = 1; di < dfaces.size(); ++di) {
      int face = dfaces[di];
      int host = -1, corner = -1;
      for (int e : m.node_elems[n]) {
        if (m.elem_face[e] != face) continue;
        host = e;
        for (int c = 0; c < 4; ++c)
          if (m.elem_nodes[e][c] == n) corner = c;
        break;
      }
      if (host < 0) continue;
      const double cp[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      CollocRow r;
      r.kind = RowKind::extra;
      r.node = n;
      r.elem = host;
      r.xi = cp[corner][0] + 0.3 * (0.5 - cp[corner][0]);
      r.eta = cp[corner][1] + 0.3 * (0.5 - cp[corner][1]);
      const RectPanel& p = m.elem_panel[host];
      r.x = p.origin + r.xi * p.du + r.eta * p.dv;
      if (r.x.z() > 0.0) {
        r.omega_up = 0.5;
      } else if (r.x.z() < 0.0) {
        r.omega_lo = 0.5;
      } else {
        r.omega_up = r.omega_lo = 0.25;
      }
      double nsh[4];
      shape4(r.xi, r.eta, nsh);
      for (int c = 0; c < 4; ++c) r.unity.push_back({m.elem_nodes[host][c], nsh[c]});
      rows.push_back(r);
    }
  }
  for (size_t ip = 0; ip < interior_pts.size(); ++ip) {
    CollocRow r;
    r.kind = RowKind::interior;
    r.x = interior_pts[ip];
    r.interior = (int)ip;
    if (r.x.z() > 0.0)
      r.omega_up = 1.0;
    else
      r.omega_lo = 1.0;
    r.unity = {{nn + (int)ip, 1.0}};
    rows.push_back(r);
  }
  (void)dofs;
  return rows;
}

}  // namespace dribem
