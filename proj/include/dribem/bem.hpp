#pragma once
// Surface mesh of the layered box, collocation bookkeeping and the boundary
// integral blocks (single and double layer, plus inclusion influence terms).

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "dribem/model.hpp"
#include "dribem/quadrature.hpp"

namespace dribem {

struct BoundaryMesh {
  std::vector<Vec3> nodes;
  // Corner ids per element; corner k sits at panel parameters
  // (0,0), (1,0), (1,1), (0,1) of the matching entry in elem_panel.
  std::vector<std::array<int, 4>> elem_nodes;
  std::vector<int> elem_face;       // Face the element belongs to
  std::vector<char> elem_upper;     // 1 when the element lies in the upper layer
  std::vector<RectPanel> elem_panel;
  // Virtual panels tiling the material interface x3 = 0 (normal +e3). They
  // carry no unknowns; they only close the layer subdomains for the volume
  // capacity terms.
  std::vector<RectPanel> interface_panels;
  // Fractions of a small collocation ball around each node that lie in the
  // upper and lower layer; their sum is the usual corner factor (1/2 on a
  // smooth face, 1/4 on an edge, 1/8 at a corner).
  std::vector<double> node_omega_upper;
  std::vector<double> node_omega_lower;
  std::vector<std::vector<int>> node_faces;
  std::vector<std::vector<int>> node_elems;
  int nx = 0, ny = 0, nzu = 0, nzl = 0;

  int num_nodes() const { return (int)nodes.size(); }
  int num_elements() const { return (int)elem_nodes.size(); }
};

// Structured surface mesh of the box. The interface plane is always a lattice
// plane, so no element straddles the two layers and the interface trace is a
// closed line of surface nodes.
BoundaryMesh build_box_mesh(const BilayerScenario& s);

// Cell-centred interior interpolation points, kept off the interface plane
// and pushed radially out of inclusions (to 1.25 times the semi-axes, with a
// warning) when the raw lattice would place them inside one.
std::vector<Vec3> interior_interpolation_points(const BilayerScenario& s,
                                                std::vector<std::string>* warnings = nullptr);

// Bilinear shape functions at panel parameters, ordered like panel corners.
inline void shape4(double xi, double eta, double n[4]) {
  n[0] = (1.0 - xi) * (1.0 - eta);
  n[1] = xi * (1.0 - eta);
  n[2] = xi * eta;
  n[3] = (1.0 - xi) * eta;
}

// One boundary flux value per (face, node on that face) pair. Fluxes are kept
// separate per face so corner nodes can carry the distinct normal fluxes of
// the faces meeting there.
struct QDof {
  int face;
  int node;
};

enum class RowKind { node, extra, interior };

struct CollocRow {
  RowKind kind = RowKind::node;
  Vec3 x = Vec3::Zero();
  int node = -1;        // collocation node (host node for extra rows)
  int elem = -1;        // host element of an extra row
  double xi = 0, eta = 0;  // parameters of an extra row inside its host element
  int interior = -1;    // interior point index for interior rows
  double omega_up = 0, omega_lo = 0;  // free-term layer fractions at x
  // Partition-of-unity columns used to close the double-layer row so that a
  // constant temperature field is reproduced exactly.
  std::vector<std::pair<int, double>> unity;
};

struct DofTables {
  std::vector<QDof> qdofs;
  std::vector<std::array<int, 4>> elem_qdof;  // flux dof per element corner
  std::vector<char> u_known;   // per node: true when a Dirichlet face pins it
  std::vector<char> q_known;   // per flux dof: true on Neumann faces
  std::vector<int> u_bc_face;  // face supplying the Dirichlet value (-1 if none)
  int num_qdofs() const { return (int)qdofs.size(); }
};

DofTables build_dof_tables(const BilayerScenario& s, const BoundaryMesh& m);

// Raw boundary-integral blocks. Entries are plain kernel integrals; the
// stepping code composes them with their signs:
//   H*u - Gm*q + S*adot - ED*c - EL*s = 0
// where u spans boundary nodes followed by interior interpolation points.
struct BieBlocks {
  std::vector<CollocRow> rows;
  DofTables dofs;
  int num_boundary_nodes = 0;
  int num_interior = 0;
  // rows x (nodes + interior points): double-layer with closure applied
  Eigen::MatrixXd H;
  // rows x flux dofs: single layer
  Eigen::MatrixXd Gm;
  // rows x eigen gradient dofs / eigen source dofs across all inclusions.
  // EL already includes the matrix-side volumetric heat capacity factor.
  Eigen::MatrixXd ED;
  Eigen::MatrixXd EL;
};

// Offsets of the per-inclusion eigenfield coefficient blocks.
struct EigenDofLayout {
  std::vector<int> c_offset;  // start of each inclusion's gradient block (3 * np entries)
  std::vector<int> s_offset;  // start of each inclusion's source block (np entries)
  std::vector<int> np;        // monomial count per inclusion: 1, 4 or 10
  int total_c = 0;
  int total_s = 0;
};
EigenDofLayout eigen_dof_layout(const BilayerScenario& s);

// Collocation rows for the scenario: one per boundary node, extra rows for
// nodes carrying several Dirichlet-face fluxes, then interior points.
std::vector<CollocRow> build_colloc_rows(const BilayerScenario& s, const BoundaryMesh& m,
                                         const DofTables& dofs,
                                         const std::vector<Vec3>& interior_pts);

// Corner index (0..3) of the collocation node on element e, 4 when the
// collocation point lies strictly inside e (extra rows), -1 when the pair is
// not singular.
int row_singular_corner(const BoundaryMesh& m, const CollocRow& row, int e);

// Corner index of the panel whose position coincides with x, or -1.
int panel_corner_index(const RectPanel& p, const Vec3& x);

// Assembles H (before closure), Gm, ED and EL for the given rows.
BieBlocks assemble_bie_blocks(const BilayerScenario& s, const BoundaryMesh& m,
                              const std::vector<Vec3>& interior_pts);

// Applies the constant-field closure: for each row the free term plus the
// singular double-layer diagonal is recovered from the negated sum of the
// other entries, spread over the row's partition-of-unity columns.
void free_terms_and_diagonal(BieBlocks& b);

}  // namespace dribem
