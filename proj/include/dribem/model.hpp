#pragma once
// Domain types: bilayer box scenario, materials, boundary conditions,
// ellipsoidal inclusions, and the graded-microstructure generator.

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dribem {

using Vec3 = Eigen::Vector3d;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MaterialProps {
  double K = 0.0;   // conductivity, W/(m K)
  double Cp = 0.0;  // volumetric heat capacity, J/(m^3 K)
};

enum class BcKind { dirichlet, neumann };

// Face BC: constant when period == 0, else amplitude*sin(2*pi*t/period).
// Neumann values are the physical outward flux -K du/dn.
struct FaceBc {
  BcKind kind = BcKind::neumann;
  double amplitude = 0.0;
  double period = 0.0;
  double value(double t) const {
    if (period == 0.0) return amplitude;
    return amplitude * std::sin(2.0 * M_PI * t / period);
  }
};

// face order used everywhere: x1min, x1max, x2min, x2max, x3min, x3max
enum Face : int { F_X1MIN = 0, F_X1MAX, F_X2MIN, F_X2MAX, F_X3MIN, F_X3MAX };

enum class EigenOrder { uniform, linear, quadratic };

inline int eigen_coeff_count(EigenOrder o) {
  switch (o) {
    case EigenOrder::uniform: return 4;    // u*[3] + Q*[1]
    case EigenOrder::linear: return 16;    // + u*1[9] + Q*1[3]
    case EigenOrder::quadratic: return 40; // + u*2[18] + Q*2[6]
  }
  return 0;
}

struct Inclusion {
  Vec3 center = Vec3::Zero();
  Vec3 semi_axes = Vec3::Zero();
  MaterialProps props;
  EigenOrder eigen_order = EigenOrder::uniform;

  bool upper() const { return center.z() > 0.0; }
  bool contains(const Vec3& x, double scale = 1.0) const {
    Vec3 d = x - center;
    double xi2 = 0.0;
    for (int k = 0; k < 3; ++k) xi2 += d[k] * d[k] / (semi_axes[k] * semi_axes[k]);
    return xi2 < scale * scale;
  }
};

enum class RunMode { transient, harmonic, steady };

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int steps = 0;
};

struct MeshCounts {
  int nx = 4, ny = 4, nz_upper = 4, nz_lower = 4;
};

struct BilayerScenario {
  std::string name;
  double la = 1.0, lb = 1.0;  // lateral extents
  double h1 = 1.0, h2 = 1.0;  // upper/lower layer heights; interface at x3 = 0
  double x1_0 = 0.0, x2_0 = 0.0;
  MaterialProps upper, lower;
  std::array<FaceBc, 6> bc{};
  RunMode mode = RunMode::transient;
  TimeGrid time;
  double omega = 0.0;
  double u0 = 0.0;  // initial temperature; fields are stored as changes from it
  MeshCounts mesh;
  std::array<int, 3> interior_counts = {4, 4, 8};
  std::vector<Inclusion> inclusions;
  std::optional<int> fgm_div;
  EigenOrder fgm_eigen_order = EigenOrder::uniform;

  double x1min() const { return x1_0; }
  double x1max() const { return x1_0 + la; }
  double x2min() const { return x2_0; }
  double x2max() const { return x2_0 + lb; }
  double x3min() const { return -h2; }
  double x3max() const { return h1; }

  bool inside_box(const Vec3& x, double tol = 0.0) const {
    return x.x() >= x1min() - tol && x.x() <= x1max() + tol &&
           x.y() >= x2min() - tol && x.y() <= x2max() + tol &&
           x.z() >= x3min() - tol && x.z() <= x3max() + tol;
  }
};

struct ValidationReport {
  double min_interface_clearance = 0.0;  // over inclusions, |center_z| - a3
  double min_pair_gap = 0.0;             // conservative lower bound on surface gaps
  std::vector<std::string> warnings;
};

// matrix-phase lookup; x3 >= 0 belongs to the upper phase
MaterialProps material_at(const Vec3& x, const BilayerScenario& s);

// verifies every type invariant; fills scenario.inclusions from the FGM block
// when present; throws ValidationError naming the offending entity
ValidationReport validate_scenario(BilayerScenario& s);

// graded microstructure: (div/4)^2 * div spheres on a cubic lattice of side
// (h1+h2)/div; per-layer volume fraction 0.5 at the interface decaying linearly
// outward, evaluated at the interface-side face of each cube layer; particles
// carry the props of the opposite phase
std::vector<Inclusion> build_fgm_inclusions(int div, const BilayerScenario& s,
                                            const MaterialProps& upper_particle_props,
                                            const MaterialProps& lower_particle_props);

}  // namespace dribem
