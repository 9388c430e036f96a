#include <dribem/oracle.hpp>

#include <dribem/drm.hpp>
#include <dribem/kernels.hpp>
#include <dribem/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Sparse>

namespace dribem {

namespace {

struct Cell {
  Vec3 lo, hi;
};

double cell_distance(const Cell& c, const Vec3& p) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    double d = std::max({c.lo[i] - p[i], p[i] - c.hi[i], 0.0});
    d2 += d * d;
  }
  return std::sqrt(d2);
}

using Integrand = std::function<double(const Vec3&)>;

// n-point rule remapped to [0, 1]
struct UnitRule {
  std::vector<double> t, w;
  explicit UnitRule(int n) {
    const GaussRule& g = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
      t.push_back(0.5 * (g.x[i] + 1.0));
      w.push_back(0.5 * g.w[i]);
    }
  }
};

double gauss_cell(const Cell& c, const Integrand& f) {
  static const UnitRule rule(6);
  const int n = (int)rule.t.size();
  Vec3 ext = c.hi - c.lo;
  double vol = ext.x() * ext.y() * ext.z();
  double sum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        Vec3 p(c.lo.x() + rule.t[a] * ext.x(), c.lo.y() + rule.t[b] * ext.y(),
               c.lo.z() + rule.t[d] * ext.z());
        sum += rule.w[a] * rule.w[b] * rule.w[d] * f(p);
      }
  return sum * vol;
}

// signed pyramid decomposition of the cell about an apex: one pyramid per
// face, collapsed radially onto the apex so a 1/rho kernel there becomes a
// bounded integrand. Valid for any apex position; a face coplanar with the
// apex contributes zero and is skipped.
double pyramids_about_apex(const Cell& c, const Vec3& apex, const Integrand& f) {
  static const UnitRule rule(8);
  const int n = (int)rule.t.size();
  Vec3 ext = c.hi - c.lo;
  struct FaceDef {
    Vec3 c0, ev, ew;
  };
  // outward-oriented bilinear faces
  const FaceDef faces[6] = {
      {Vec3(c.hi.x(), c.lo.y(), c.lo.z()), Vec3(0, ext.y(), 0), Vec3(0, 0, ext.z())},
      {c.lo, Vec3(0, 0, ext.z()), Vec3(0, ext.y(), 0)},
      {Vec3(c.lo.x(), c.hi.y(), c.lo.z()), Vec3(0, 0, ext.z()), Vec3(ext.x(), 0, 0)},
      {c.lo, Vec3(ext.x(), 0, 0), Vec3(0, 0, ext.z())},
      {Vec3(c.lo.x(), c.lo.y(), c.hi.z()), Vec3(ext.x(), 0, 0), Vec3(0, ext.y(), 0)},
      {c.lo, Vec3(0, ext.y(), 0), Vec3(ext.x(), 0, 0)}};
  double scale = ext.norm();
  double total = 0.0;
  for (const FaceDef& fd : faces) {
    Vec3 nf = fd.ev.cross(fd.ew);
    double hn = (fd.c0 - apex).dot(nf);
    if (std::abs(hn) < 1e-14 * scale * scale * scale) continue;
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
      double u = rule.t[a];
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
          Vec3 y = fd.c0 + rule.t[b] * fd.ev + rule.t[d] * fd.ew;
          Vec3 p = apex + u * (y - apex);
          sum += rule.w[a] * rule.w[b] * rule.w[d] * u * u * f(p);
        }
    }
    total += hn * sum;
  }
  return total;
}

// adaptive refinement toward the listed attractor points; cells still
// holding the primary point at the depth cap are integrated with the
// pyramid decomposition
double integrate_cell(const Cell& c, const Vec3& primary, const std::vector<Vec3>& attract,
                      const Integrand& f, int depth) {
  constexpr int kMaxDepth = 10;
  double h = (c.hi - c.lo).maxCoeff();
  double d = cell_distance(c, attract[0]);
  for (size_t i = 1; i < attract.size(); ++i) d = std::min(d, cell_distance(c, attract[i]));
  if (h <= 0.5 * d) return gauss_cell(c, f);
  if (depth >= kMaxDepth) {
    if (cell_distance(c, primary) == 0.0) return pyramids_about_apex(c, primary, f);
    return gauss_cell(c, f);
  }
  Vec3 mid = 0.5 * (c.lo + c.hi);
  double total = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e) {
        Cell sub;
        sub.lo = Vec3(a ? mid.x() : c.lo.x(), b ? mid.y() : c.lo.y(), e ? mid.z() : c.lo.z());
        sub.hi = Vec3(a ? c.hi.x() : mid.x(), b ? c.hi.y() : mid.y(), e ? c.hi.z() : mid.z());
        total += integrate_cell(sub, primary, attract, f, depth + 1);
      }
  return total;
}

}  // namespace

double capacity_volume_integral(const BilayerScenario& s, const Vec3& x, const Vec3& center,
                                double ell) {
  const double Ku = s.upper.K, Kl = s.lower.K;
  Vec3 xbar = image_point(x);
  std::vector<Vec3> attract = {x, xbar, center};
  Cell up{Vec3(s.x1min(), s.x2min(), 0.0), Vec3(s.x1max(), s.x2max(), s.h1)};
  Cell lo{Vec3(s.x1min(), s.x2min(), -s.h2), Vec3(s.x1max(), s.x2max(), 0.0)};
  auto make_f = [&](double cpv) {
    return Integrand([&, cpv](const Vec3& p) {
      return cpv * rbf_chi((p - center).norm() / ell) * greens(x, p, Ku, Kl);
    });
  };
  return integrate_cell(up, x, attract, make_f(s.upper.Cp), 0) +
         integrate_cell(lo, x, attract, make_f(s.lower.Cp), 0);
}

namespace {

// b(t) = sum over terms of coef * bc[face].value(t); Dirichlet terms carry
// the half-cell conductance, Neumann terms the negated face area.
struct BcTerm {
  int v = 0;
  double coef = 0.0;
  int face = 0;
};

struct FdSystem {
  Eigen::SparseMatrix<double> A;  // conduction operator, symmetric positive
  Eigen::VectorXd Mdiag;          // heat capacity times voxel volume
  std::vector<BcTerm> terms;
};

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

FdSystem build_fd_system(const FdGrid& g) {
  const int n = g.nx * g.ny * g.nz;
  const double vol = g.hx * g.hy * g.hz;
  const double ax = g.hy * g.hz, ay = g.hx * g.hz, az = g.hx * g.hy;
  FdSystem sys;
  sys.Mdiag.resize(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n) * 7);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int v = g.idx(i, j, k);
        sys.Mdiag[v] = g.Cp[v] * vol;
        double diag = 0.0;
        // one entry per (axis, direction): neighbor coupling or boundary face
        const struct {
          int di, dj, dk, face;
          double area, h;
        } sides[6] = {{-1, 0, 0, F_X1MIN, ax, g.hx}, {1, 0, 0, F_X1MAX, ax, g.hx},
                      {0, -1, 0, F_X2MIN, ay, g.hy}, {0, 1, 0, F_X2MAX, ay, g.hy},
                      {0, 0, -1, F_X3MIN, az, g.hz}, {0, 0, 1, F_X3MAX, az, g.hz}};
        for (const auto& sd : sides) {
          const int ii = i + sd.di, jj = j + sd.dj, kk = k + sd.dk;
          const bool in = ii >= 0 && ii < g.nx && jj >= 0 && jj < g.ny && kk >= 0 && kk < g.nz;
          if (in) {
            const int w = g.idx(ii, jj, kk);
            const double c = harmonic_mean(g.K[v], g.K[w]) * sd.area / sd.h;
            trip.emplace_back(v, w, -c);
            diag += c;
          } else {
            const FaceBc& bc = g.s.bc[sd.face];
            if (bc.kind == BcKind::dirichlet) {
              const double c = 2.0 * g.K[v] * sd.area / sd.h;
              diag += c;
              sys.terms.push_back({v, c, sd.face});
            } else if (bc.amplitude != 0.0) {
              sys.terms.push_back({v, -sd.area, sd.face});
            }
          }
        }
        trip.emplace_back(v, v, diag);
      }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

Eigen::VectorXd bc_vector(const FdGrid& g, const FdSystem& sys, double t) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(g.nx * g.ny * g.nz);
  for (const BcTerm& bt : sys.terms) b[bt.v] += bt.coef * g.s.bc[bt.face].value(t);
  return b;
}

// trilinear weights along one axis of a lattice with nodes at
// base + (start + m) * h for m = 0 .. count-1, clamped into the hull
void lattice_coord(double x, double base, double h, double start, int count, int& m0,
                   double& frac) {
  double f = (x - base) / h - start;
  f = std::min(std::max(f, 0.0), static_cast<double>(count - 1));
  m0 = std::min(static_cast<int>(f), std::max(count - 2, 0));
  frac = count > 1 ? f - m0 : 0.0;
}

// vertical interpolation along one voxel column between centers k0 and
// k0 + 1. When the conductivity jumps across the separating face the kink is
// placed on the face with the value that keeps the one-sided fluxes equal;
// plain linear interpolation there would lose an order of accuracy.
template <class Scalar>
Scalar column_z_interp(const FdGrid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u, int i,
                       int j, int k0, double fk) {
  const int ka = g.idx(i, j, k0);
  if (fk == 0.0 || g.nz == 1) return u[ka];
  const int kb = g.idx(i, j, std::min(k0 + 1, g.nz - 1));
  const Scalar ua = u[ka], ub = u[kb];
  const double Ka = g.K[ka], Kb = g.K[kb];
  if (Ka == Kb) return (1.0 - fk) * ua + fk * ub;
  const Scalar uf = (Ka * ua + Kb * ub) / (Ka + Kb);
  if (fk <= 0.5) return ua + (uf - ua) * (2.0 * fk);
  return uf + (ub - uf) * (2.0 * fk - 1.0);
}

template <class Scalar>
Scalar sample_center_lattice(const FdGrid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u,
                             const Vec3& x) {
  int i0, j0, k0;
  double fi, fj, fk;
  lattice_coord(x.x(), g.origin.x(), g.hx, 0.5, g.nx, i0, fi);
  lattice_coord(x.y(), g.origin.y(), g.hy, 0.5, g.ny, j0, fj);
  lattice_coord(x.z(), g.origin.z(), g.hz, 0.5, g.nz, k0, fk);
  Scalar val = Scalar(0);
  for (int dj = 0; dj < 2; ++dj)
    for (int di = 0; di < 2; ++di) {
      const double w = (di ? fi : 1.0 - fi) * (dj ? fj : 1.0 - fj);
      if (w == 0.0) continue;
      val += w * column_z_interp(g, u, std::min(i0 + di, g.nx - 1),
                                 std::min(j0 + dj, g.ny - 1), k0, fk);
    }
  return val;
}

// vertical flux on the interior z-face lattice: laterally at voxel centers,
// vertically on the planes between voxel layers
template <class Scalar>
Scalar face_flux3(const FdGrid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u, int i,
                  int j, int kf) {
  const int lo = g.idx(i, j, kf - 1), hi = g.idx(i, j, kf);
  const double c = harmonic_mean(g.K[lo], g.K[hi]) / g.hz;
  return -c * (u[hi] - u[lo]);
}

template <class Scalar>
Scalar sample_face_lattice(const FdGrid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u,
                           const Vec3& x) {
  if (g.nz < 2) throw ValidationError("flux sampling needs at least two voxel layers");
  int i0, j0, k0;
  double fi, fj, fk;
  lattice_coord(x.x(), g.origin.x(), g.hx, 0.5, g.nx, i0, fi);
  lattice_coord(x.y(), g.origin.y(), g.hy, 0.5, g.ny, j0, fj);
  lattice_coord(x.z(), g.origin.z(), g.hz, 1.0, g.nz - 1, k0, fk);
  Scalar val = Scalar(0);
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? fi : 1.0 - fi) * (dj ? fj : 1.0 - fj) * (dk ? fk : 1.0 - fk);
        if (w == 0.0) continue;
        val += w * face_flux3(g, u, std::min(i0 + di, g.nx - 1), std::min(j0 + dj, g.ny - 1),
                              std::min(k0 + dk + 1, g.nz - 1));
      }
  return val;
}

}  // namespace

FdGrid make_fd_grid(const BilayerScenario& s, int nx, int ny, int nz) {
  if (nx < 1 || ny < 1 || nz < 2) throw ValidationError("voxel grid needs nx, ny >= 1, nz >= 2");
  FdGrid g;
  g.s = s;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.hx = s.la / nx;
  g.hy = s.lb / ny;
  g.hz = (s.h1 + s.h2) / nz;
  g.origin = Vec3(s.x1min(), s.x2min(), s.x3min());
  const double kf0 = s.h2 / g.hz;
  if (std::abs(kf0 - std::round(kf0)) > 1e-9 * nz || std::round(kf0) < 1.0 ||
      std::round(kf0) > nz - 1.0)
    throw ValidationError("interface plane must coincide with an interior voxel face");
  for (const Inclusion& inc : s.inclusions) {
    const double h[3] = {g.hx, g.hy, g.hz};
    for (int a = 0; a < 3; ++a)
      if (2.0 * inc.semi_axes[a] < 6.0 * h[a] * (1.0 - 1e-12))
        throw ValidationError("voxel grid too coarse: inclusions need six voxels per diameter");
  }
  const int n = nx * ny * nz;
  g.K.resize(n);
  g.Cp.resize(n);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Vec3 c = g.center(i, j, k);
        MaterialProps mp = material_at(c, s);
        for (const Inclusion& inc : s.inclusions)
          if (inc.contains(c)) {
            mp = inc.props;
            break;
          }
        const int v = g.idx(i, j, k);
        g.K[v] = mp.K;
        g.Cp[v] = mp.Cp;
      }
  return g;
}

Eigen::VectorXd fd_solve_steady(const FdGrid& g) {
  FdSystem sys = build_fd_system(g);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> lu(sys.A);
  if (lu.info() != Eigen::Success)
    throw NumericalError("steady voxel system factorization failed");
  Eigen::VectorXd u = lu.solve(bc_vector(g, sys, g.s.time.t0));
  if (lu.info() != Eigen::Success) throw NumericalError("steady voxel solve failed");
  return u;
}

FdSeries fd_solve_transient(const FdGrid& g, const std::vector<Vec3>& probes) {
  const double dt = g.s.time.dt;
  const int steps = g.s.time.steps;
  if (dt <= 0.0 || steps < 1) throw ValidationError("transient run needs dt > 0 and steps >= 1");
  FdSystem sys = build_fd_system(g);
  const int n = g.nx * g.ny * g.nz;
  const int np = static_cast<int>(probes.size());

  std::vector<Eigen::Triplet<double>> dtrip;
  dtrip.reserve(n);
  for (int v = 0; v < n; ++v) dtrip.emplace_back(v, v, sys.Mdiag[v] / dt);
  Eigen::SparseMatrix<double> Mdt(n, n);
  Mdt.setFromTriplets(dtrip.begin(), dtrip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> lu1, lu2;
  lu1.compute(Eigen::SparseMatrix<double>(sys.A + Mdt));
  if (lu1.info() != Eigen::Success)
    throw NumericalError("transient voxel system factorization failed");
  if (steps >= 2) {
    lu2.compute(Eigen::SparseMatrix<double>(sys.A + 1.5 * Mdt));
    if (lu2.info() != Eigen::Success)
      throw NumericalError("transient voxel system factorization failed");
  }

  FdSeries out;
  out.t.resize(steps + 1);
  out.u.setZero(steps + 1, np);
  out.q3.setZero(steps + 1, np);
  Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(n);   // change from the initial state
  Eigen::VectorXd u_cur = Eigen::VectorXd::Zero(n);
  out.t[0] = g.s.time.t0;
  for (int m = 1; m <= steps; ++m) {
    const double t = g.s.time.t0 + m * dt;
    Eigen::VectorXd rhs = bc_vector(g, sys, t);
    Eigen::VectorXd u_new;
    if (m == 1) {
      rhs += sys.Mdiag.cwiseProduct(u_cur) / dt;
      u_new = lu1.solve(rhs);
      if (lu1.info() != Eigen::Success) throw NumericalError("transient voxel solve failed");
    } else {
      rhs += sys.Mdiag.cwiseProduct(2.0 * u_cur - 0.5 * u_prev) / dt;
      u_new = lu2.solve(rhs);
      if (lu2.info() != Eigen::Success) throw NumericalError("transient voxel solve failed");
    }
    u_prev = u_cur;
    u_cur = u_new;
    out.t[m] = t;
    for (int p = 0; p < np; ++p) {
      out.u(m, p) = fd_sample_u(g, u_cur, probes[p]);
      out.q3(m, p) = fd_sample_q3(g, u_cur, probes[p]);
    }
  }
  out.u_final = u_cur;
  return out;
}

Eigen::VectorXcd fd_solve_harmonic(const FdGrid& g, double omega) {
  using Cx = std::complex<double>;
  FdSystem sys = build_fd_system(g);
  const int n = g.nx * g.ny * g.nz;
  Eigen::SparseMatrix<Cx> Ac = sys.A.cast<Cx>();
  for (int v = 0; v < n; ++v) Ac.coeffRef(v, v) += Cx(0.0, omega * sys.Mdiag[v]);
  Ac.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Cx>> lu(Ac);
  if (lu.info() != Eigen::Success)
    throw NumericalError("harmonic voxel system factorization failed");
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  for (const BcTerm& bt : sys.terms) b[bt.v] += bt.coef * g.s.bc[bt.face].amplitude;
  Eigen::VectorXcd u = lu.solve(b);
  if (lu.info() != Eigen::Success) throw NumericalError("harmonic voxel solve failed");
  return u;
}

double fd_sample_u(const FdGrid& g, const Eigen::VectorXd& u, const Vec3& x) {
  return sample_center_lattice<double>(g, u, x);
}

double fd_sample_q3(const FdGrid& g, const Eigen::VectorXd& u, const Vec3& x) {
  return sample_face_lattice<double>(g, u, x);
}

std::complex<double> fd_sample_u(const FdGrid& g, const Eigen::VectorXcd& u, const Vec3& x) {
  return sample_center_lattice<std::complex<double>>(g, u, x);
}

std::complex<double> fd_sample_q3(const FdGrid& g, const Eigen::VectorXcd& u, const Vec3& x) {
  return sample_face_lattice<std::complex<double>>(g, u, x);
}

std::complex<double> slab_harmonic_amplitude(const BilayerScenario& s, double omega, double z) {
  using Cx = std::complex<double>;
  if (s.bc[F_X3MAX].kind != BcKind::dirichlet || s.bc[F_X3MIN].kind != BcKind::dirichlet)
    throw ValidationError("slab solution needs Dirichlet top and bottom faces");
  for (int f : {F_X1MIN, F_X1MAX, F_X2MIN, F_X2MAX})
    if (s.bc[f].kind != BcKind::neumann || s.bc[f].amplitude != 0.0)
      throw ValidationError("slab solution needs adiabatic side faces");
  const Cx utop(s.bc[F_X3MAX].amplitude, 0.0), ubot(s.bc[F_X3MIN].amplitude, 0.0);
  const double K1 = s.upper.K, K2 = s.lower.K;
  if (omega == 0.0) {
    const double c1 = K1 / s.h1, c2 = K2 / s.h2;
    const Cx ui = (c1 * utop + c2 * ubot) / (c1 + c2);
    if (z >= 0.0) return ui + (utop - ui) * (z / s.h1);
    return ui - (ubot - ui) * (z / s.h2);
  }
  const Cx g1 = std::sqrt(Cx(0.0, omega * s.upper.Cp / K1));
  const Cx g2 = std::sqrt(Cx(0.0, omega * s.lower.Cp / K2));
  // per layer U = a cosh(g z) + b sinh(g z) with shared a = U(0) and
  // flux continuity K1 g1 b1 = K2 g2 b2
  const Cx r = K1 * g1 / (K2 * g2);
  const Cx c1 = std::cosh(g1 * s.h1), s1 = std::sinh(g1 * s.h1);
  const Cx c2 = std::cosh(g2 * s.h2), s2 = std::sinh(g2 * s.h2);
  const Cx det = -c1 * r * s2 - s1 * c2;
  const Cx a = (-utop * r * s2 - s1 * ubot) / det;
  const Cx b1 = (c1 * ubot - c2 * utop) / det;
  if (z >= 0.0) return a * std::cosh(g1 * z) + b1 * std::sinh(g1 * z);
  const Cx b2 = r * b1;
  return a * std::cosh(g2 * z) + b2 * std::sinh(g2 * z);
}

FieldDiff compare_fields(const std::vector<double>& test, const std::vector<double>& ref) {
  if (test.size() != ref.size())
    throw ValidationError("field comparison needs equal-length vectors");
  double ninf = 0.0, dinf = 0.0, n2 = 0.0, d2 = 0.0;
  for (size_t i = 0; i < test.size(); ++i) {
    ninf = std::max(ninf, std::abs(test[i] - ref[i]));
    dinf = std::max(dinf, std::abs(ref[i]));
    n2 += (test[i] - ref[i]) * (test[i] - ref[i]);
    d2 += ref[i] * ref[i];
  }
  FieldDiff d;
  d.linf = dinf > 0.0 ? ninf / dinf : ninf;
  d.l2 = d2 > 0.0 ? std::sqrt(n2 / d2) : std::sqrt(n2);
  return d;
}

}  // namespace dribem
