#pragma once

// Field recovery from a solved state: temperature, gradient and physical
// heat flux at interior points, averages over horizontal slabs, and a plain
// text table format for exported samples.

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <dribem/solver.hpp>

namespace dribem {

// One evaluated sample. The flux is the physical one, q = -K grad u, with
// the conductivity of the material the point sits in (inclusion conductivity
// inside an inclusion). The phase tag is 0 in the upper layer, 1 in the
// lower layer and 2 + i inside inclusion i; points exactly on the interface
// plane count as upper and carry the upper-side one-sided gradient.
struct FieldSample {
  Vec3 x = Vec3::Zero();
  double t = 0.0;
  double u = 0.0;
  Vec3 grad = Vec3::Zero();
  Vec3 q = Vec3::Zero();
  int phase = 0;
};

int phase_tag(const BilayerScenario& s, const Vec3& x);

// Evaluates the interior representation at each point. Points must lie
// strictly inside the box (the interface plane is allowed). A point whose
// elliptic radius relative to some inclusion is within 1e-6 of the surface
// is first moved 2e-6 * (mean semiaxis) along the surface normal, staying on
// the side it came from (outward when exactly on the surface); the returned
// sample stores the moved position.
std::vector<FieldSample> eval_fields(const GlobalSystem& g, const TimeState& st,
                                     const std::vector<Vec3>& pts);
FieldSample eval_field(const GlobalSystem& g, const TimeState& st, const Vec3& x);

// Complex amplitudes of a time-harmonic state, u(x, t) = Re[U(x) e^{i w t}].
struct HarmonicSample {
  Vec3 x = Vec3::Zero();
  double omega = 0.0;
  std::complex<double> u{0.0, 0.0};
  Eigen::Vector3cd grad = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd q = Eigen::Vector3cd::Zero();
  int phase = 0;
};

std::vector<HarmonicSample> eval_fields(const GlobalSystem& g, const HarmonicResult& h,
                                        const std::vector<Vec3>& pts);
HarmonicSample eval_field(const GlobalSystem& g, const HarmonicResult& h, const Vec3& x);

// Averages over nlayers equal horizontal slabs spanning the full height.
// Each slab is sampled on a 10 x 10 x 20 grid of cell centers (2000 samples
// per slab, equal weights, arithmetic mean).
struct LayerProfile {
  std::vector<double> z;       // slab center heights, ascending
  std::vector<double> u_avg;   // mean temperature per slab
  std::vector<double> q3_avg;  // mean vertical flux per slab
  int per_layer = 0;           // samples behind each mean
};

LayerProfile layer_average(const GlobalSystem& g, const TimeState& st, int nlayers);

// Sample table as text: header line "x1,x2,x3,t,u,q1,q2,q3,phase", one row
// per sample, doubles printed with enough digits to round-trip bit for bit.
// The gradient is not part of the table; read_field_csv recomputes nothing
// and leaves it zero.
void write_field_csv(std::ostream& os, const std::vector<FieldSample>& rows);
void write_field_csv(const std::string& path, const std::vector<FieldSample>& rows);
std::vector<FieldSample> read_field_csv(std::istream& is);
std::vector<FieldSample> read_field_csv(const std::string& path);

}  // namespace dribem
