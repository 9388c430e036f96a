#include <dribem/eshelby.hpp>

#include <dribem/jet.hpp>
#include <dribem/kernels.hpp>
#include <dribem/potentials.hpp>

#include <cmath>
#include <stdexcept>

namespace dribem {

namespace {

// parity of each monomial density under the interface mirror y -> (y1,y2,-y3)
constexpr double mirror_parity[10] = {1, 1, 1, -1, 1, 1, 1, -1, -1, 1};

}  // namespace

EshelbyEval eshelby_eval(const Vec3& x, const Inclusion& inc, double K_upper,
                         double K_lower, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 3)
    throw std::invalid_argument("eshelby_eval: deriv_order must be in [0, 3]");
  const bool inc_up = inc.upper();
  const double Ks = inc_up ? K_upper : K_lower;
  const double Kb = inc_up ? K_lower : K_upper;
  const bool same = ((x.z() >= 0.0) == inc_up);

  EshelbyEval out;
  out.order = deriv_order;
  const int dpo = deriv_order + 1;  // potential derivatives feeding D
  PotentialSet dir = phi_tensor(x, inc.center, inc.semi_axes, dpo);
  out.interior = same && dir.interior;

  const auto& tb = JetTables<6>::get();
  const int nout = jet_num_coeffs(deriv_order);
  const double inv4pi = 1.0 / (4.0 * M_PI);

  if (same) {
    const double beta = (Ks - Kb) / (Ks + Kb);
    PotentialSet mir = phi_tensor(x, image_point(inc.center), inc.semi_axes, dpo);
    for (int P = 0; P < 10; ++P) {
      const double MP = mirror_parity[P];
      for (int n = 0; n < nout; ++n) {
        const int e0 = tb.exp[n][0], e1 = tb.exp[n][1], e2 = tb.exp[n][2];
        out.L[P][n] =
            (dir.get(P, e0, e1, e2) + beta * MP * mir.get(P, e0, e1, e2)) * inv4pi / Ks;
        for (int i = 0; i < 3; ++i) {
          int ei[3] = {e0, e1, e2};
          ei[i] += 1;
          const double Mi = (i == 2) ? -1.0 : 1.0;
          out.D[i][P][n] = -inv4pi * (dir.get(P, ei[0], ei[1], ei[2]) +
                                      beta * Mi * MP * mir.get(P, ei[0], ei[1], ei[2]));
        }
      }
    }
  } else {
    const double pref = 1.0 / (2.0 * M_PI * (Ks + Kb));
    for (int P = 0; P < 10; ++P)
      for (int n = 0; n < nout; ++n) {
        const int e0 = tb.exp[n][0], e1 = tb.exp[n][1], e2 = tb.exp[n][2];
        out.L[P][n] = pref * dir.get(P, e0, e1, e2);
        for (int i = 0; i < 3; ++i) {
          int ei[3] = {e0, e1, e2};
          ei[i] += 1;
          out.D[i][P][n] = -Ks * pref * dir.get(P, ei[0], ei[1], ei[2]);
        }
      }
  }
  return out;
}

EshelbyEval tensor_D(const Vec3& x, const Inclusion& inc, double K_upper, double K_lower,
                     int deriv_order) {
  return eshelby_eval(x, inc, K_upper, K_lower, deriv_order);
}

EshelbyEval tensor_L(const Vec3& x, const Inclusion& inc, double K_upper, double K_lower,
                     int deriv_order) {
  return eshelby_eval(x, inc, K_upper, K_lower, deriv_order);
}

}  // namespace dribem
