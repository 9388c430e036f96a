#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <dribem/bem.hpp>
#include <dribem/drm.hpp>
#include <dribem/eim.hpp>
#include <dribem/eshelby.hpp>
#include <dribem/kernels.hpp>

#include <cmath>
#include <random>

using namespace dribem;

namespace {

BilayerScenario eim_box() {
  BilayerScenario s;
  s.la = 1.0;
  s.lb = 1.0;
  s.h1 = 0.5;
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

struct Built {
  BoundaryMesh m;
  std::vector<Vec3> pts;
  DofTables dofs;
  RbfSystem rbf;
};

Built build_all(const BilayerScenario& s) {
  Built b;
  b.m = build_box_mesh(s);
  b.pts = interior_interpolation_points(s);
  b.dofs = build_dof_tables(s, b.m);
  b.rbf = assemble_interpolation(s, b.m, b.pts);
  return b;
}

}  // namespace

TEST_CASE("representation jets match finite differences of the value rows") {
  BilayerScenario s = eim_box();
  Inclusion inc;
  inc.center = Vec3(0.5, 0.5, 0.2);
  inc.semi_axes = Vec3(0.1, 0.1, 0.08);
  inc.props = {12.0, 6.0};
  inc.eigen_order = EigenOrder::uniform;
  s.inclusions.push_back(inc);
  Built b = build_all(s);

  const Vec3 x(0.37, 0.56, -0.22);
  const double h = 2e-5;
  RepJet jet = build_rep_jet_rows(s, b.m, b.dofs, b.rbf, x, 2);

  auto check_block = [&](const Eigen::MatrixXd& rows,
                         auto getter) {
    for (int i = 0; i < 3; ++i) {
      Vec3 xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      RepJet jp = build_rep_jet_rows(s, b.m, b.dofs, b.rbf, xp, 1);
      RepJet jm = build_rep_jet_rows(s, b.m, b.dofs, b.rbf, xm, 1);
      int ei[3] = {0, 0, 0};
      ei[i] = 1;
      int slot = field_jet_index(ei[0], ei[1], ei[2]);
      const Eigen::MatrixXd& rp = getter(jp);
      const Eigen::MatrixXd& rm = getter(jm);
      double scale = rows.row(0).cwiseAbs().maxCoeff() + rows.row(slot).cwiseAbs().maxCoeff();
      for (int col = 0; col < rows.cols(); col += 3) {
        double fd = (rp(0, col) - rm(0, col)) / (2 * h);
        CHECK(rows(slot, col) == doctest::Approx(fd).epsilon(2e-4).scale(scale));
        // second derivatives against differences of the gradient rows
        double fd2 = (rp(slot, col) - rm(slot, col)) / (2 * h);
        int e2[3] = {0, 0, 0};
        e2[i] = 2;
        CHECK(rows(field_jet_index(e2[0], e2[1], e2[2]), col) ==
              doctest::Approx(fd2).epsilon(2e-4).scale(scale / h * 1e-5));
      }
    }
  };

  check_block(jet.u_rows, [](const RepJet& j) -> const Eigen::MatrixXd& { return j.u_rows; });
  check_block(jet.q_rows, [](const RepJet& j) -> const Eigen::MatrixXd& { return j.q_rows; });
  check_block(jet.a_rows, [](const RepJet& j) -> const Eigen::MatrixXd& { return j.a_rows; });
  check_block(jet.c_rows, [](const RepJet& j) -> const Eigen::MatrixXd& { return j.c_rows; });
  check_block(jet.s_rows, [](const RepJet& j) -> const Eigen::MatrixXd& { return j.s_rows; });
}

TEST_CASE("disturbance evaluation matches the influence tensor sum") {
  BilayerScenario s = eim_box();
  Inclusion a;
  a.center = Vec3(0.5, 0.5, 0.25);
  a.semi_axes = Vec3(0.1, 0.1, 0.1);
  a.props = {12.0, 6.0};
  a.eigen_order = EigenOrder::quadratic;
  Inclusion bI;
  bI.center = Vec3(0.4, 0.6, -0.25);
  bI.semi_axes = Vec3(0.12, 0.1, 0.08);
  bI.props = {1.0, 1.0};
  bI.eigen_order = EigenOrder::linear;
  s.inclusions = {a, bI};

  EigenDofLayout lay = eigen_dof_layout(s);
  REQUIRE(lay.total_c == 30 + 12);
  REQUIRE(lay.total_s == 10 + 4);

  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd cv(lay.total_c), sv(lay.total_s);
  for (int i = 0; i < cv.size(); ++i) cv[i] = u(rng);
  for (int i = 0; i < sv.size(); ++i) sv[i] = u(rng);

  const Vec3 x(0.55, 0.45, 0.05);
  std::vector<double> dist = eval_disturbance(s, x, cv, sv, 2);

  double expect = 0.0;
  for (int I = 0; I < 2; ++I) {
    EshelbyEval ev = eshelby_eval(x, s.inclusions[I], s.upper.K, s.lower.K, 0);
    double cps = material_at(s.inclusions[I].center, s).Cp;
    int np = lay.np[I];
    for (int i = 0; i < 3; ++i)
      for (int P = 0; P < np; ++P) expect += ev.D[i][P][0] * cv[lay.c_offset[I] + i * np + P];
    for (int P = 0; P < np; ++P) expect += cps * ev.L[P][0] * sv[lay.s_offset[I] + P];
  }
  CHECK(dist[0] == doctest::Approx(expect).epsilon(1e-14));

  // and the jet rows carry the same columns
  Built b = build_all(s);
  RepJet jet = build_rep_jet_rows(s, b.m, b.dofs, b.rbf, x, 2);
  CHECK(jet.c_rows.row(0).dot(cv) + jet.s_rows.row(0).dot(sv) ==
        doctest::Approx(dist[0]).epsilon(1e-14));
  int slot = field_jet_index(0, 1, 1);
  CHECK(jet.c_rows.row(slot).dot(cv) + jet.s_rows.row(slot).dot(sv) ==
        doctest::Approx(dist[slot]).epsilon(1e-14));
}

TEST_CASE("matched inclusion yields pure identity rows") {
  BilayerScenario s = eim_box();
  Inclusion inc;
  inc.center = Vec3(0.5, 0.5, 0.25);
  inc.semi_axes = Vec3(0.1, 0.1, 0.1);
  inc.props = s.upper;  // same conductivity and capacity as the host layer
  inc.eigen_order = EigenOrder::linear;
  s.inclusions.push_back(inc);
  Built b = build_all(s);

  EimRowBlock blk = build_eim_row_block(s, b.m, b.dofs, b.rbf);
  REQUIRE(blk.nc == 12);
  REQUIRE(blk.ns == 4);
  CHECK(blk.kappa_w.cwiseAbs().maxCoeff() == 0.0);

  EimRows rows = assemble_eim_rows_transient(blk, 10.0);
  CHECK(rows.H.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rows.Gm.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rows.S.cwiseAbs().maxCoeff() == 0.0);
  for (int r = 0; r < blk.nc; ++r)
    for (int c = 0; c < rows.ED.cols(); ++c)
      CHECK(rows.ED(r, c) == (c == blk.ident_col[r] ? -1.0 : 0.0));
  for (int r = blk.nc; r < blk.nc + blk.ns; ++r)
    for (int c = 0; c < rows.EL.cols(); ++c)
      CHECK(rows.EL(r, c) == (c == blk.ident_col[r] ? -1.0 : 0.0));

  EimRowsC hm = assemble_eim_rows_harmonic(blk, 3.0);
  CHECK(hm.EL.cwiseAbs().maxCoeff() == 1.0);
  CHECK(hm.H.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-capacity layers are validated") {
  BilayerScenario s = eim_box();
  s.upper.Cp = 0.0;
  Inclusion inc;
  inc.center = Vec3(0.5, 0.5, 0.25);
  inc.semi_axes = Vec3(0.1, 0.1, 0.1);
  inc.props = {12.0, 6.0};
  inc.eigen_order = EigenOrder::uniform;
  s.inclusions.push_back(inc);
  Built b = build_all(s);
  CHECK_THROWS_AS(build_eim_row_block(s, b.m, b.dofs, b.rbf), ValidationError);

  s.inclusions[0].props.Cp = 0.0;  // matched zero capacity: s row becomes s = 0
  EimRowBlock blk = build_eim_row_block(s, b.m, b.dofs, b.rbf);
  EimRows rows = assemble_eim_rows_transient(blk, 10.0);
  CHECK(rows.EL(blk.nc, 0) == -1.0);
  CHECK(rows.S.row(blk.nc).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadratic rows pick the right derivative slot and weight") {
  BilayerScenario s = eim_box();
  Inclusion inc;
  inc.center = Vec3(0.5, 0.5, -0.25);
  inc.semi_axes = Vec3(0.12, 0.1, 0.08);
  inc.props = {8.0, 9.0};
  inc.eigen_order = EigenOrder::quadratic;
  s.inclusions.push_back(inc);
  Built b = build_all(s);

  EimRowBlock blk = build_eim_row_block(s, b.m, b.dofs, b.rbf);
  REQUIRE(blk.nc == 30);
  REQUIRE(blk.ns == 10);
  RepJet jet = build_rep_jet_rows(s, b.m, b.dofs, b.rbf, inc.center, 3);

  const double kap_k = 1.0 - inc.props.K / s.lower.K;
  const double kap_c = 1.0 - inc.props.Cp / s.lower.Cp;

  // gradient dof (i = 2, P = 4 i.e. monomial y1^2): slot (2,0,1), weight 1/2
  int r = 2 * 10 + 4;
  CHECK(blk.kappa_w[r] == doctest::Approx(0.5 * kap_k).epsilon(1e-15));
  CHECK((blk.rep_u.row(r) - jet.u_rows.row(field_jet_index(2, 0, 1))).cwiseAbs().maxCoeff() ==
        0.0);

  // gradient dof (i = 0, P = 9 i.e. monomial y1*y2): slot (2,1,0), weight 1
  r = 0 * 10 + 9;
  CHECK(blk.kappa_w[r] == doctest::Approx(kap_k).epsilon(1e-15));
  CHECK((blk.rep_q.row(r) - jet.q_rows.row(field_jet_index(2, 1, 0))).cwiseAbs().maxCoeff() ==
        0.0);

  // source dof P = 7 (monomial y2*y3): slot (0,1,1), weight 1
  r = blk.nc + 7;
  CHECK(blk.kappa_w[r] == doctest::Approx(kap_c).epsilon(1e-15));
  CHECK((blk.rep_a.row(r) - jet.a_rows.row(field_jet_index(0, 1, 1))).cwiseAbs().maxCoeff() ==
        0.0);

  // harmonic assembly at omega = 0 matches the steady transient limit
  EimRows st = assemble_eim_rows_transient(blk, 0.0);
  EimRowsC hm = assemble_eim_rows_harmonic(blk, 0.0);
  CHECK((hm.H.real() - st.H).cwiseAbs().maxCoeff() == 0.0);
  CHECK(hm.H.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK((hm.EL.real() - st.EL).cwiseAbs().maxCoeff() == 0.0);
}
