#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <dribem/bem.hpp>
#include <dribem/model.hpp>

#include <cmath>
#include <set>

#include "doctest.h"

using namespace dribem;

namespace {

BilayerScenario unit_box() {
  BilayerScenario s;
  s.name = "unit";
  s.la = s.lb = 1.0;
  s.h1 = s.h2 = 1.0;
  s.upper = {4.0, 10.0};
  s.lower = {2.0, 3.0};
  s.bc[F_X3MAX] = {BcKind::dirichlet, 1.0, 0.0};
  s.bc[F_X3MIN] = {BcKind::dirichlet, 0.0, 0.0};
  s.mode = RunMode::steady;
  return s;
}

int find_node(const BoundaryMesh& m, const Vec3& x) {
  for (int n = 0; n < m.num_nodes(); ++n)
    if ((m.nodes[n] - x).norm() < 1e-12) return n;
  return -1;
}

}  // namespace

TEST_CASE("box meshes have the expected node and element counts") {
  BilayerScenario s = unit_box();

  s.mesh = {10, 10, 10, 10};
  BoundaryMesh m = build_box_mesh(s);
  CHECK(m.num_elements() == 1000);
  CHECK(m.num_nodes() == 1002);
  CHECK((int)m.interface_panels.size() == 100);

  s.mesh = {5, 5, 8, 8};
  m = build_box_mesh(s);
  CHECK(m.num_elements() == 370);
  CHECK(m.num_nodes() == 372);

  s.mesh = {1, 1, 1, 1};
  m = build_box_mesh(s);
  CHECK(m.num_elements() == 10);
  CHECK(m.num_nodes() == 12);

  s.mesh = {0, 1, 1, 1};
  CHECK_THROWS_AS(build_box_mesh(s), ValidationError);
}

TEST_CASE("the element panels tile a closed outward-oriented surface") {
  BilayerScenario s = unit_box();
  s.mesh = {3, 4, 2, 3};
  BoundaryMesh m = build_box_mesh(s);

  Vec3 flux = Vec3::Zero();
  double area = 0.0;
  Vec3 box_center(0.5, 0.5, 0.0);
  for (int e = 0; e < m.num_elements(); ++e) {
    const RectPanel& p = m.elem_panel[e];
    flux += p.area * p.normal;
    area += p.area;
    Vec3 center = p.origin + 0.5 * p.du + 0.5 * p.dv;
    CHECK(p.normal.dot(center - box_center) > 0.0);
    // panel corners and element nodes agree
    const Vec3 corners[4] = {p.origin, p.origin + p.du, p.origin + p.du + p.dv,
                             p.origin + p.dv};
    for (int c = 0; c < 4; ++c)
      CHECK((corners[c] - m.nodes[m.elem_nodes[e][c]]).norm() < 1e-14);
    // elements never straddle the interface plane
    double zmin = 1e30, zmax = -1e30;
    for (int c = 0; c < 4; ++c) {
      zmin = std::min(zmin, m.nodes[m.elem_nodes[e][c]].z());
      zmax = std::max(zmax, m.nodes[m.elem_nodes[e][c]].z());
    }
    CHECK(zmin * zmax >= 0.0);
    CHECK(m.elem_upper[e] == (zmax > 0.0 || (zmin == 0.0 && m.elem_face[e] != F_X3MIN)));
  }
  CHECK(flux.norm() < 1e-13);
  CHECK(area == doctest::Approx(2.0 * (1.0 + 2.0 + 2.0)).epsilon(1e-13));

  double iface_area = 0.0;
  for (const auto& p : m.interface_panels) {
    iface_area += p.area;
    CHECK(p.normal.isApprox(Vec3(0, 0, 1)));
    CHECK(std::abs(p.origin.z()) == 0.0);
  }
  CHECK(iface_area == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("free-term layer fractions by node position") {
  BilayerScenario s = unit_box();
  s.mesh = {4, 4, 4, 4};
  BoundaryMesh m = build_box_mesh(s);

  struct Probe {
    Vec3 x;
    double wu, wl;
  } probes[] = {
      {{0.5, 0.5, 1.0}, 0.5, 0.0},     // top face centre
      {{0.5, 0.5, -1.0}, 0.0, 0.5},    // bottom face centre
      {{0.0, 0.0, 1.0}, 0.125, 0.0},   // top corner
      {{0.5, 0.0, 0.0}, 0.25, 0.25},   // interface trace on a lateral face
      {{0.0, 0.0, 0.0}, 0.125, 0.125}, // interface trace on a vertical edge
      {{0.0, 0.5, 0.5}, 0.5, 0.0},     // upper lateral face centre
      {{1.0, 0.5, -0.5}, 0.0, 0.5},    // lower lateral face centre
      {{0.0, 0.5, 1.0}, 0.25, 0.0},    // top edge
  };
  for (const auto& pr : probes) {
    int n = find_node(m, pr.x);
    REQUIRE(n >= 0);
    CHECK(m.node_omega_upper[n] == doctest::Approx(pr.wu).epsilon(1e-15));
    CHECK(m.node_omega_lower[n] == doctest::Approx(pr.wl).epsilon(1e-15));
  }
}

TEST_CASE("flux dof tables follow the face boundary conditions") {
  BilayerScenario s = unit_box();
  s.mesh = {4, 4, 4, 4};
  BoundaryMesh m = build_box_mesh(s);
  DofTables t = build_dof_tables(s, m);

  // one flux dof per (face, node on face)
  int expect = 2 * 25 + 4 * 45;
  CHECK(t.num_qdofs() == expect);
  for (int q = 0; q < t.num_qdofs(); ++q) {
    bool dirichlet = (t.qdofs[q].face == F_X3MIN || t.qdofs[q].face == F_X3MAX);
    CHECK((bool)t.q_known[q] == !dirichlet);
  }
  int known_u = 0;
  for (int n = 0; n < m.num_nodes(); ++n) {
    bool top_or_bottom = std::abs(std::abs(m.nodes[n].z()) - 1.0) < 1e-14;
    CHECK((bool)t.u_known[n] == top_or_bottom);
    known_u += t.u_known[n];
    if (top_or_bottom) CHECK(t.u_bc_face[n] >= F_X3MIN);
  }
  CHECK(known_u == 50);

  // with no adjacent Dirichlet faces there are no extra collocation rows
  auto interior = interior_interpolation_points(s);
  auto rows = build_colloc_rows(s, m, t, interior);
  CHECK((int)rows.size() == m.num_nodes() + (int)interior.size());
}

TEST_CASE("extra rows balance the flux dofs of an all-Dirichlet box") {
  BilayerScenario s = unit_box();
  for (int f = 0; f < 6; ++f) s.bc[f] = {BcKind::dirichlet, 0.0, 0.0};
  s.mesh = {4, 4, 4, 4};
  BoundaryMesh m = build_box_mesh(s);
  DofTables t = build_dof_tables(s, m);
  auto rows = build_colloc_rows(s, m, t, {});

  // every nodal temperature is known, so the unknowns are exactly the flux
  // dofs and the row count must match them
  CHECK((int)rows.size() == t.num_qdofs());
  int extras = 0;
  for (const auto& r : rows)
    if (r.kind == RowKind::extra) {
      ++extras;
      CHECK(r.elem >= 0);
      CHECK(r.xi > 0.0);
      CHECK(r.xi < 1.0);
      CHECK(r.eta > 0.0);
      CHECK(r.eta < 1.0);
      double wsum = 0.0;
      for (const auto& cw : r.unity) wsum += cw.second;
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    }
  CHECK(extras == t.num_qdofs() - m.num_nodes());
}

TEST_CASE("interior interpolation points sit on a symmetric off-interface lattice") {
  BilayerScenario s = unit_box();
  auto pts = interior_interpolation_points(s);
  REQUIRE((int)pts.size() == 4 * 4 * 8);

  std::multiset<double> zs;
  for (const auto& p : pts) {
    CHECK(s.inside_box(p));
    CHECK(std::abs(p.z()) >= 0.125 - 1e-14);
    CHECK(p.x() >= 0.125 - 1e-14);
    CHECK(p.x() <= 0.875 + 1e-14);
    zs.insert(p.z());
  }
  for (double z : zs) CHECK(zs.count(-z) == zs.count(z));

  // an odd vertical count would put one plane on the interface; it is nudged
  s.interior_counts = {2, 2, 5};
  pts = interior_interpolation_points(s);
  for (const auto& p : pts) CHECK(std::abs(p.z()) >= 0.1 - 1e-14);
}

TEST_CASE("interior points are pushed out of inclusions with a warning") {
  BilayerScenario s = unit_box();
  Inclusion inc;
  inc.center = Vec3(0.6, 0.6, 0.6);
  inc.semi_axes = Vec3(0.2, 0.2, 0.2);
  inc.props = {10.0, 5.0};
  s.inclusions.push_back(inc);

  std::vector<std::string> warnings;
  auto pts = interior_interpolation_points(s, &warnings);
  CHECK(!warnings.empty());
  for (const auto& p : pts) {
    CAPTURE(p.transpose());
    CHECK(!inc.contains(p, 1.25 - 1e-9));
  }
}

TEST_CASE("eigen dof layout tracks the expansion order per inclusion") {
  BilayerScenario s = unit_box();
  Inclusion a;
  a.center = Vec3(0.5, 0.5, 0.5);
  a.semi_axes = Vec3(0.1, 0.1, 0.1);
  a.eigen_order = EigenOrder::uniform;
  Inclusion b = a;
  b.center.z() = -0.5;
  b.eigen_order = EigenOrder::quadratic;
  s.inclusions = {a, b};

  EigenDofLayout lay = eigen_dof_layout(s);
  CHECK(lay.np == std::vector<int>({1, 10}));
  CHECK(lay.c_offset == std::vector<int>({0, 3}));
  CHECK(lay.s_offset == std::vector<int>({0, 1}));
  CHECK(lay.total_c == 33);
  CHECK(lay.total_s == 11);
}
