#pragma once
// Newtonian potentials of a solid ellipsoid carrying the polynomial densities
// 1, y_p, y_p y_q in coordinates centered on it, together with their field
// derivatives up to fourth order. Spheres and axisymmetric spheroids go
// through closed one-dimensional integral recurrences; general triaxial
// shapes fall back to numerical integration of the master integrals.

#include <dribem/model.hpp>

#include <array>
#include <functional>

namespace dribem {

// symmetric pair slots in Voigt order 11, 22, 33, 23, 13, 12
inline int sym_index(int p, int q) {
  if (p == q) return p;
  return 6 - p - q;
}

// flat slot of the derivative multi-index (i,j,k), i+j+k <= 4, in the shared
// degree-major order (35 slots)
int potential_deriv_index(int i, int j, int k);

struct PotentialSet {
  int order = 0;  // highest derivative order filled
  bool interior = false;
  double lambda = 0.0;
  std::array<double, 35> phi{};                     // density 1
  std::array<std::array<double, 35>, 3> phi_p{};    // density y_p
  std::array<std::array<double, 35>, 6> phi_pq{};   // density y_p y_q, Voigt

  // derivative d^{i+j+k} of the density-P potential; P runs over
  // {1, y_1, y_2, y_3, Voigt pairs} as 0..9
  double get(int P, int i, int j, int k) const;
};

// largest root of sum_i (x_i - c_i)^2 / (a_i^2 + lambda) = 1, zero inside
double lambda_of(const Vec3& x, const Vec3& center, const Vec3& semi_axes);

// all ten potentials with field derivatives up to deriv_order (0..4)
PotentialSet phi_tensor(const Vec3& x, const Vec3& center, const Vec3& semi_axes,
                        int deriv_order);

// the same quantities by direct adaptive volume quadrature; deriv_order <= 1
PotentialSet phi_quadrature_oracle(const Vec3& x, const Vec3& center,
                                   const Vec3& semi_axes, int deriv_order);

// adaptive integration of f over the ellipsoid volume; when sing is given and
// lies inside, rays are cast from it so integrands singular like 1/r^2 there
// stay integrable
double integrate_over_ellipsoid(const Vec3& center, const Vec3& semi_axes,
                                const std::function<double(const Vec3&)>& f,
                                const Vec3* sing = nullptr, double rel_tol = 1e-9);

}  // namespace dribem
