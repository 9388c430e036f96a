#pragma once
// Steady bimaterial point-source solution built by the method of images, with
// closed-form Cartesian derivatives in both arguments.

#include <dribem/model.hpp>

#include <array>

namespace dribem {

// which half-space the source point belongs to; 'automatic' resolves by sign
// of x3' (x3' = 0 counts as upper). Explicit sides exist for one-sided limits
// on the interface plane.
enum class SourceSide { automatic, upper, lower };

// Taylor data of a scalar field of x: the 20 multi-indices of order <= 3 in
// the degree-major order used by JetTables (value, 3 gradients, 6, 10).
using FieldJet20 = std::array<double, 20>;

struct KernelEval {
  FieldJet20 G{};                      // G and its field-point derivatives
  std::array<FieldJet20, 3> Gs{};      // dG/dx'_i and their field-point derivatives
};

inline Vec3 image_point(const Vec3& xs) { return Vec3(xs.x(), xs.y(), -xs.z()); }

double greens(const Vec3& x, const Vec3& xs, double K_upper, double K_lower,
              SourceSide side = SourceSide::automatic);

// value + source gradient only; the assembly hot path
struct KernelPair {
  double G = 0.0;
  Vec3 grad_src = Vec3::Zero();
};
KernelPair greens_pair(const Vec3& x, const Vec3& xs, double K_upper, double K_lower,
                       SourceSide side = SourceSide::automatic);

// full derivative set, field orders <= max_order (<= 3)
KernelEval greens_derivs(const Vec3& x, const Vec3& xs, double K_upper, double K_lower,
                         int max_order = 3, SourceSide side = SourceSide::automatic);

// first-order bundle for evaluation hot paths: value, field gradient, source
// gradient and the mixed second derivatives, in closed form
struct KernelEval1 {
  double G = 0.0;
  Vec3 Gx = Vec3::Zero();   // d/dx_b of G
  Vec3 Gs = Vec3::Zero();   // d/dx'_i of G
  Eigen::Matrix3d Gsx = Eigen::Matrix3d::Zero();  // (b, i): d/dx_b of dG/dx'_i
};
KernelEval1 greens_eval1(const Vec3& x, const Vec3& xs, double K_upper, double K_lower,
                         SourceSide side = SourceSide::automatic);

// flat index of multi-index (i,j,k), |i+j+k| <= 3, in FieldJet20 order
int field_jet_index(int i, int j, int k);

}  // namespace dribem
