#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <dribem/eim.hpp>
#include <dribem/postprocess.hpp>

#include <cmath>
#include <complex>
#include <sstream>

using namespace dribem;

namespace {

// unit-lateral box, top/bottom Dirichlet, adiabatic sides
BilayerScenario dirichlet_box(double ku, double cpu_, double kl, double cpl, double u_top,
                              double u_bot) {
  BilayerScenario s;
  s.la = 1.0;
  s.lb = 1.0;
  s.h1 = 0.5;
  s.h2 = 0.5;
  s.upper = {ku, cpu_};
  s.lower = {kl, cpl};
  s.bc[F_X3MAX] = {BcKind::dirichlet, u_top, 0.0};
  s.bc[F_X3MIN] = {BcKind::dirichlet, u_bot, 0.0};
  s.mesh = {3, 3, 2, 2};
  s.interior_counts = {2, 2, 2};
  s.mode = RunMode::steady;
  return s;
}

// jet-row route to the same value and gradient, for cross-checking
void jet_reference(const GlobalSystem& g, const TimeState& st, const Vec3& x, double& u,
                   Vec3& grad) {
  RepJet jet = build_rep_jet_rows(g.s, g.mesh, g.bie.dofs, g.rbf, x, 1);
  auto val = [&](int b) {
    double v = -jet.u_rows.row(b).dot(st.u) + jet.q_rows.row(b).dot(st.q) -
               jet.a_rows.row(b).dot(st.adot);
    if (jet.c_rows.cols() > 0) v += jet.c_rows.row(b).dot(st.c);
    if (jet.s_rows.cols() > 0) v += jet.s_rows.row(b).dot(st.se);
    return v;
  };
  u = val(field_jet_index(0, 0, 0));
  grad = Vec3(val(field_jet_index(1, 0, 0)), val(field_jet_index(0, 1, 0)),
              val(field_jet_index(0, 0, 1)));
}

}  // namespace

TEST_CASE("point evaluation matches the representation jet rows") {
  BilayerScenario s = dirichlet_box(4.0, 10.0, 2.0, 3.0, 8.0, 0.0);
  Inclusion inc;
  inc.center = Vec3(0.5, 0.5, 0.25);
  inc.semi_axes = Vec3(0.08, 0.08, 0.08);
  inc.props = {3.0, 2.0};
  inc.eigen_order = EigenOrder::uniform;
  s.inclusions.push_back(inc);

  GlobalSystem g = build_global(s);
  TimeState st = solve_steady(g);
  // a transient step gives the capacity terms something to carry
  s.mode = RunMode::transient;
  s.time = {0.0, 0.25, 2};
  s.bc[F_X3MAX] = {BcKind::dirichlet, 8.0, 20.0};
  GlobalSystem gt = build_global(s);
  TransientWork w;
  TimeState tt = initial_state(gt);
  step_transient(gt, w, tt);
  step_transient(gt, w, tt);

  const Vec3 pts[3] = {Vec3(0.43, 0.52, 0.31),   // generic point near the inclusion
                       Vec3(0.08, 0.5, -0.2),    // close to a side face
                       Vec3(0.5, 0.5, 0.25)};    // inclusion centroid
  for (const Vec3& x : pts) {
    CAPTURE(x.transpose());
    double ur;
    Vec3 gr;
    jet_reference(g, st, x, ur, gr);
    FieldSample f = eval_field(g, st, x);
    CHECK(f.u == doctest::Approx(ur).epsilon(1e-9));
    for (int d = 0; d < 3; ++d)
      CHECK(f.grad[d] == doctest::Approx(gr[d]).epsilon(1e-9).scale(gr.norm() + 1.0));

    jet_reference(gt, tt, x, ur, gr);
    FieldSample ft = eval_field(gt, tt, x);
    CHECK(ft.u == doctest::Approx(ur).epsilon(1e-9));
    for (int d = 0; d < 3; ++d)
      CHECK(ft.grad[d] == doctest::Approx(gr[d]).epsilon(1e-9).scale(gr.norm() + 1.0));
  }
}

TEST_CASE("steady bimaterial samples follow the analytic profile") {
  const double ku = 4.0, kl = 2.0, ut = 8.0;
  BilayerScenario s = dirichlet_box(ku, 10.0, kl, 3.0, ut, 0.0);
  GlobalSystem g = build_global(s);
  TimeState st = solve_steady(g);

  const double f = ut / (0.5 / ku + 0.5 / kl);  // downward heat flow rate
  auto exact = [&](double z) {
    return z >= 0.0 ? ut - (f / ku) * (0.5 - z) : (f / kl) * (z + 0.5);
  };
  for (double z : {0.31, 0.05, -0.17, -0.42}) {
    FieldSample smp = eval_field(g, st, Vec3(0.45, 0.55, z));
    CHECK(smp.u == doctest::Approx(exact(z)).epsilon(2e-5).scale(ut));
    CHECK(smp.q.z() == doctest::Approx(-f).epsilon(2e-5).scale(f));
    CHECK(std::abs(smp.q.x()) < 2e-5 * f);
    CHECK(smp.phase == (z >= 0.0 ? 0 : 1));
    CHECK(smp.t == st.t);
  }
}

TEST_CASE("a transient state stays continuous across the interface plane") {
  BilayerScenario s = dirichlet_box(4.0, 10.0, 2.0, 3.0, 8.0, 0.0);
  s.mode = RunMode::transient;
  s.time = {0.0, 0.3, 2};
  s.bc[F_X3MAX] = {BcKind::dirichlet, 8.0, 20.0};
  GlobalSystem g = build_global(s);
  TransientWork w;
  TimeState st = initial_state(g);
  step_transient(g, w, st);
  step_transient(g, w, st);

  const double eps = 1e-6;
  FieldSample above = eval_field(g, st, Vec3(0.37, 0.52, eps));
  FieldSample below = eval_field(g, st, Vec3(0.37, 0.52, -eps));
  FieldSample on = eval_field(g, st, Vec3(0.37, 0.52, 0.0));
  const double scale = 8.0;  // the driving boundary amplitude

  // temperature is continuous; the on-plane value must sit between the
  // one-sided limits up to quadrature noise
  CHECK(std::abs(above.u - below.u) < 1e-4 * scale);
  CHECK(std::abs(on.u - 0.5 * (above.u + below.u)) < 1e-4 * scale);
  CHECK(on.phase == 0);

  // vertical flux is continuous up to the discretization of this coarse mesh
  const double qs = std::abs(above.q.z()) + std::abs(below.q.z());
  CHECK(std::abs(above.q.z() - below.q.z()) < 0.05 * qs);
}

TEST_CASE("inclusion flux agrees between the two material routes") {
  BilayerScenario s = dirichlet_box(1.0, 0.0, 1.0, 0.0, 1.0, -1.0);
  s.mesh = {4, 4, 3, 3};
  Inclusion inc;
  inc.center = Vec3(0.5, 0.5, 0.25);
  inc.semi_axes = Vec3(0.05, 0.05, 0.05);
  inc.props = {3.0, 0.0};
  inc.eigen_order = EigenOrder::uniform;
  s.inclusions.push_back(inc);

  GlobalSystem g = build_global(s);
  TimeState st = solve_steady(g);
  FieldSample f = eval_field(g, st, inc.center);
  REQUIRE(f.phase == 2);

  // equivalent-inclusion identity at the centroid: the inclusion-material
  // flux equals the matrix flux with the eigen gradient removed
  const double km = 1.0, ki = 3.0;
  Vec3 ustar(st.c[0], st.c[1], st.c[2]);
  Vec3 route_a = -ki * f.grad;
  Vec3 route_b = -km * (f.grad - ustar);
  for (int d = 0; d < 3; ++d) {
    CHECK(f.q[d] == route_a[d]);  // the sample uses the local conductivity
    CHECK(std::abs(route_a[d] - route_b[d]) < 1e-10 * route_a.norm());
  }
}

TEST_CASE("layer averages of a linear field are exact") {
  BilayerScenario s = dirichlet_box(5.0, 2.0, 5.0, 2.0, 7.0, 3.0);
  GlobalSystem g = build_global(s);
  TimeState st = solve_steady(g);

  LayerProfile prof = layer_average(g, st, 4);
  REQUIRE(prof.z.size() == 4);
  CHECK(prof.per_layer == 2000);
  for (int l = 0; l < 4; ++l) {
    const double zc = -0.5 + (l + 0.5) * 0.25;
    CHECK(prof.z[l] == doctest::Approx(zc).epsilon(1e-14));
    CHECK(prof.u_avg[l] == doctest::Approx(3.0 + 4.0 * (zc + 0.5)).epsilon(2e-5).scale(7.0));
    CHECK(prof.q3_avg[l] == doctest::Approx(-20.0).epsilon(2e-5).scale(20.0));
  }
}

TEST_CASE("near-surface samples are nudged to a clean side") {
  BilayerScenario s = dirichlet_box(4.0, 0.0, 2.0, 0.0, 8.0, 0.0);
  Inclusion inc;
  inc.center = Vec3(0.5, 0.5, 0.25);
  inc.semi_axes = Vec3(0.08, 0.08, 0.08);
  inc.props = {3.0, 0.0};
  inc.eigen_order = EigenOrder::uniform;
  s.inclusions.push_back(inc);
  GlobalSystem g = build_global(s);
  TimeState st = solve_steady(g);

  // just outside the surface band: moved further outward, stays matrix
  FieldSample on = eval_field(g, st, inc.center + Vec3(0.08 * (1.0 + 5e-7), 0.0, 0.0));
  CHECK(on.phase == 0);
  CHECK(on.x.x() > 0.58 + 1e-7);
  CHECK(std::isfinite(on.u));

  // just inside the surface band: moved further inward, stays inclusion
  FieldSample in = eval_field(g, st, inc.center + Vec3(0.08 * (1.0 - 5e-7), 0.0, 0.0));
  CHECK(in.phase == 2);
  CHECK(in.x.x() < 0.58 - 5e-8);

  CHECK_THROWS_AS((void)eval_field(g, st, Vec3(2.0, 0.5, 0.0)), ValidationError);
  CHECK_THROWS_AS((void)eval_field(g, st, Vec3(0.5, 0.5, 0.5)), ValidationError);
}

TEST_CASE("zero-frequency harmonic samples match the steady field") {
  BilayerScenario s = dirichlet_box(4.0, 10.0, 2.0, 3.0, 8.0, 0.0);
  GlobalSystem g = build_global(s);
  TimeState st = solve_steady(g);
  HarmonicResult h0 = solve_harmonic(g, 0.0);

  for (const Vec3& x : {Vec3(0.4, 0.6, 0.22), Vec3(0.62, 0.3, -0.35)}) {
    FieldSample fs = eval_field(g, st, x);
    HarmonicSample hs = eval_field(g, h0, x);
    CHECK(hs.u.real() == doctest::Approx(fs.u).epsilon(1e-10).scale(8.0));
    CHECK(std::abs(hs.u.imag()) < 1e-10 * 8.0);
    CHECK(hs.q.z().real() == doctest::Approx(fs.q.z()).epsilon(1e-10).scale(20.0));
    CHECK(hs.phase == fs.phase);
  }

  // samples of opposite frequencies are complex conjugates
  HarmonicResult hp = solve_harmonic(g, 0.8);
  HarmonicResult hm = solve_harmonic(g, -0.8);
  HarmonicSample sp = eval_field(g, hp, Vec3(0.4, 0.6, 0.22));
  HarmonicSample sm = eval_field(g, hm, Vec3(0.4, 0.6, 0.22));
  CHECK(std::abs(sp.u - std::conj(sm.u)) < 1e-12 * (std::abs(sp.u) + 1.0));
  CHECK(std::abs(sp.u.imag()) > 1e-6);  // the comparison is not trivially real
}

TEST_CASE("sample tables round trip through text bit for bit") {
  std::vector<FieldSample> rows(3);
  rows[0].x = Vec3(0.1, -1.0 / 3.0, 1e-300);
  rows[0].t = 6.02e23;
  rows[0].u = M_PI;
  rows[0].q = Vec3(-0.0, 17.0, -2.5e-7);
  rows[0].phase = 0;
  rows[1].x = Vec3(1.0, 2.0, 3.0);
  rows[1].t = 0.30000000000000004;
  rows[1].u = -123.456789012345678;
  rows[1].q = Vec3(1e308, -1e-308, 0.0);
  rows[1].phase = 1;
  rows[2].x = Vec3(-5.5, 0.25, 0.125);
  rows[2].t = 2.0;
  rows[2].u = 0.1 + 0.2;
  rows[2].q = Vec3(9.0, 8.0, 7.0);
  rows[2].phase = 5;

  std::ostringstream os;
  write_field_csv(os, rows);
  std::istringstream is(os.str());
  std::vector<FieldSample> back = read_field_csv(is);

  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int d = 0; d < 3; ++d) {
      CHECK(back[i].x[d] == rows[i].x[d]);
      CHECK(back[i].q[d] == rows[i].q[d]);
    }
    CHECK(back[i].t == rows[i].t);
    CHECK(back[i].u == rows[i].u);
    CHECK(back[i].phase == rows[i].phase);
  }
  CHECK(std::signbit(back[0].q.x()));  // negative zero survives the trip

  std::istringstream bad("u,q,oops\n1,2,3\n");
  CHECK_THROWS_AS((void)read_field_csv(bad), ValidationError);
}
