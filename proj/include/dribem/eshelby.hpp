#pragma once
// Temperature influence tensors of one ellipsoidal inclusion carrying
// polynomial eigen-fields, evaluated against the bimaterial point-source
// solution. Same-side evaluations combine the direct ellipsoid potential
// with the potential of the interface-mirrored ellipsoid; cross-side
// evaluations reduce to the transmitted term.

#include <dribem/model.hpp>

#include <array>

namespace dribem {

// D[i][P][n]: derivative slot n of the temperature produced by a unit
// eigen-gradient coefficient along axis i with monomial weight P.
// L[P][n]: the same for a unit eigen-source coefficient with monomial P.
// P runs over {1, y_1, y_2, y_3, Voigt pairs} in inclusion-centered
// coordinates; slot n uses the shared derivative multi-index order.
struct EshelbyEval {
  int order = 0;        // highest derivative order filled
  bool interior = false;  // evaluation point inside the inclusion
  std::array<std::array<std::array<double, 35>, 10>, 3> D{};
  std::array<std::array<double, 35>, 10> L{};
};

// both tensors with field derivatives up to deriv_order (0..3)
EshelbyEval eshelby_eval(const Vec3& x, const Inclusion& inc, double K_upper,
                         double K_lower, int deriv_order);

// single-tensor views of the same evaluation
EshelbyEval tensor_D(const Vec3& x, const Inclusion& inc, double K_upper, double K_lower,
                     int deriv_order);
EshelbyEval tensor_L(const Vec3& x, const Inclusion& inc, double K_upper, double K_lower,
                     int deriv_order);

}  // namespace dribem
