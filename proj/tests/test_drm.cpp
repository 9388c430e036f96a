#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <dribem/bem.hpp>
#include <dribem/drm.hpp>
#include <dribem/kernels.hpp>
#include <dribem/oracle.hpp>

#include <cmath>
#include <map>
#include <random>
#include <tuple>
#include <vector>

using namespace dribem;

namespace {

BilayerScenario drm_box() {
  BilayerScenario s;
  s.la = 1.0;
  s.lb = 0.8;
  s.h1 = 0.6;
  s.h2 = 0.5;
  s.upper.K = 4.0;
  s.upper.Cp = 10.0;
  s.lower.K = 2.0;
  s.lower.Cp = 3.0;
  s.mesh.nx = 3;
  s.mesh.ny = 3;
  s.mesh.nz_upper = 2;
  s.mesh.nz_lower = 2;
  s.interior_counts = {2, 2, 2};
  return s;
}

int jet_slot(int i, int j, int k) { return field_jet_index(i, j, k); }

}  // namespace

TEST_CASE("basis closed forms and the particular solution identity") {
  CHECK(rbf_chi(0.0) == 1.0);
  CHECK(rbf_chi(1.0) == 3.0);

  const double ell = 0.7;
  Vec3 c(0.2, -0.1, 0.4);
  FieldJet20 at_ell = rbf_gamma(Vec3(c + ell * Vec3(0, 0, 1)), c, ell, 0);
  CHECK(at_ell[0] / (ell * ell) == doctest::Approx(0.3).epsilon(1e-14));

  std::mt19937 rng(991);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec3 x(u(rng), u(rng), u(rng));
    FieldJet20 g = rbf_gamma(x, c, ell, 2);
    double lap = g[jet_slot(2, 0, 0)] + g[jet_slot(0, 2, 0)] + g[jet_slot(0, 0, 2)];
    double r = (x - c).norm();
    CHECK(lap == doctest::Approx(rbf_chi(r / ell)).epsilon(1e-12));
  }

  // at the centre the value and gradient vanish and the Hessian is the
  // isotropic limit, so the identity holds there too
  FieldJet20 g0 = rbf_gamma(c, c, ell, 3);
  CHECK(g0[0] == 0.0);
  CHECK(g0[jet_slot(1, 0, 0)] == 0.0);
  double lap0 = g0[jet_slot(2, 0, 0)] + g0[jet_slot(0, 2, 0)] + g0[jet_slot(0, 0, 2)];
  CHECK(lap0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g0[jet_slot(1, 1, 0)] == 0.0);
}

TEST_CASE("particular solution derivatives agree with finite differences") {
  const double ell = 0.83;
  Vec3 c(0.1, 0.3, -0.2);
  std::mt19937 rng(1213);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    Vec3 x(u(rng), u(rng), u(rng));
    if ((x - c).norm() < 0.05) continue;
    FieldJet20 g = rbf_gamma(x, c, ell, 3);
    for (int i = 0; i < 3; ++i) {
      Vec3 xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      FieldJet20 gp = rbf_gamma(xp, c, ell, 2);
      FieldJet20 gm = rbf_gamma(xm, c, ell, 2);
      int ei[3] = {0, 0, 0};
      ei[i] = 1;
      double fd_grad = (gp[0] - gm[0]) / (2 * h);
      CHECK(g[jet_slot(ei[0], ei[1], ei[2])] == doctest::Approx(fd_grad).epsilon(1e-8).scale(1.0));
      for (int j = 0; j < 3; ++j) {
        int ej[3] = {0, 0, 0};
        ej[j] = 1;
        int sj = jet_slot(ej[0], ej[1], ej[2]);
        double fd_hess = (gp[sj] - gm[sj]) / (2 * h);
        int eh[3] = {ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]};
        CHECK(g[jet_slot(eh[0], eh[1], eh[2])] ==
              doctest::Approx(fd_hess).epsilon(1e-7).scale(1.0));
        for (int k = j; k < 3; ++k) {
          int ek[3] = {ej[0], ej[1], ej[2]};
          ++ek[k];
          int sk = jet_slot(ek[0], ek[1], ek[2]);
          double fd_third = (gp[sk] - gm[sk]) / (2 * h);
          int et[3] = {ei[0] + ek[0], ei[1] + ek[1], ei[2] + ek[2]};
          CHECK(g[jet_slot(et[0], et[1], et[2])] ==
                doctest::Approx(fd_third).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("interpolation system structure and duplicate guard") {
  BilayerScenario s = drm_box();
  BoundaryMesh m = build_box_mesh(s);
  std::vector<Vec3> pts = interior_interpolation_points(s);
  RbfSystem rbf = assemble_interpolation(s, m, pts);

  CHECK((int)rbf.centers.size() == m.num_nodes() + (int)pts.size());
  CHECK(rbf.ell == doctest::Approx(std::max({s.la, s.lb, s.h1 + s.h2})));
  const int M = (int)rbf.centers.size();
  for (int a = 0; a < M; ++a) CHECK(rbf.F(a, a) == 1.0);
  for (int a = 0; a < M; a += 7)
    for (int b = a + 1; b < M; b += 11) {
      CHECK(rbf.F(a, b) == rbf.F(b, a));
      CHECK(rbf.F(a, b) > 1.0);
    }

  std::vector<Vec3> bad = pts;
  bad.push_back(m.nodes[3]);
  CHECK_THROWS_AS(assemble_interpolation(s, m, bad), ValidationError);
}

TEST_CASE("capacity rows match direct volume quadrature") {
  BilayerScenario s = drm_box();
  BoundaryMesh m = build_box_mesh(s);
  std::vector<Vec3> pts = interior_interpolation_points(s);
  DofTables dofs = build_dof_tables(s, m);
  std::vector<CollocRow> rows = build_colloc_rows(s, m, dofs, pts);
  RbfSystem rbf = assemble_interpolation(s, m, pts);
  Eigen::MatrixXd W = assemble_drm_blocks(s, m, rows, rbf);

  const int nn = m.num_nodes();
  REQUIRE((int)rows.size() == nn + (int)pts.size());

  // a top-face node, an interface trace node, and an interior point
  int top_row = -1, trace_row = -1;
  for (int n = 0; n < nn; ++n) {
    if (top_row < 0 && m.nodes[n].z() == s.h1 && m.nodes[n].x() > 0.2 && m.nodes[n].x() < 0.5 &&
        m.nodes[n].y() > 0.2)
      top_row = n;
    if (trace_row < 0 && m.nodes[n].z() == 0.0 && m.nodes[n].x() > 0.2) trace_row = n;
  }
  REQUIRE(top_row >= 0);
  REQUIRE(trace_row >= 0);
  int interior_row = nn + 1;

  // centers: the rows' own nodes, a far node, and an interior center
  int far_center = -1;
  for (int n = 0; n < nn; ++n)
    if (m.nodes[n].z() == -s.h2 && m.nodes[n].x() == 0.0 && m.nodes[n].y() == 0.0) far_center = n;
  REQUIRE(far_center >= 0);
  int interior_center = nn + (int)pts.size() - 1;

  std::vector<std::pair<int, int>> pairs = {
      {top_row, top_row},           {top_row, far_center},    {top_row, interior_center},
      {trace_row, far_center},      {trace_row, trace_row},   {trace_row, interior_center},
      {interior_row, far_center},   {interior_row, top_row},  {interior_row, interior_center},
      {trace_row, top_row},
  };

  std::vector<double> ref(pairs.size());
  double scale = 0.0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    ref[i] = capacity_volume_integral(s, rows[pairs[i].first].x, rbf.centers[pairs[i].second],
                                      rbf.ell);
    scale = std::max(scale, std::abs(ref[i]));
  }
  REQUIRE(scale > 0.0);
  for (size_t i = 0; i < pairs.size(); ++i) {
    INFO("pair ", i, ": row ", pairs[i].first, " center ", pairs[i].second);
    CHECK(W(pairs[i].first, pairs[i].second) == doctest::Approx(ref[i]).epsilon(1e-4).scale(scale));
  }
}

TEST_CASE("mirror symmetry of the capacity rows for matched layers") {
  BilayerScenario s = drm_box();
  s.la = 1.0;
  s.lb = 1.0;
  s.h1 = 0.5;
  s.h2 = 0.5;
  s.lower = s.upper;  // matched materials: interface corrections vanish
  BoundaryMesh m = build_box_mesh(s);
  std::vector<Vec3> pts = interior_interpolation_points(s);
  DofTables dofs = build_dof_tables(s, m);
  std::vector<CollocRow> rows = build_colloc_rows(s, m, dofs, pts);
  RbfSystem rbf = assemble_interpolation(s, m, pts);
  Eigen::MatrixXd W = assemble_drm_blocks(s, m, rows, rbf);

  const int nn = m.num_nodes();
  auto key = [](const Vec3& v) {
    return std::make_tuple(std::llround(v.x() * 1e9), std::llround(v.y() * 1e9),
                           std::llround(v.z() * 1e9));
  };
  std::map<std::tuple<long long, long long, long long>, int> node_at, pt_at;
  for (int n = 0; n < nn; ++n) node_at[key(m.nodes[n])] = n;
  for (int p = 0; p < (int)pts.size(); ++p) pt_at[key(pts[p])] = p;

  auto mirror_center = [&](int mm) {
    Vec3 v = rbf.centers[mm];
    Vec3 flipped(v.x(), v.y(), -v.z());
    if (mm < nn) return node_at.at(key(flipped));
    return nn + pt_at.at(key(flipped));
  };

  double wmax = W.cwiseAbs().maxCoeff();
  REQUIRE(wmax > 0.0);
  // row order matches center order here: node rows then interior rows
  for (int r = 0; r < (int)rows.size(); r += 5) {
    int rm = mirror_center(r);
    for (int mm = 0; mm < (int)rbf.centers.size(); mm += 7) {
      CHECK(W(r, mm) == doctest::Approx(W(rm, mirror_center(mm))).epsilon(1e-11).scale(wmax));
    }
  }
}
