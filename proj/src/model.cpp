#include <dribem/model.hpp>

#include <cmath>
#include <sstream>

namespace dribem {

MaterialProps material_at(const Vec3& x, const BilayerScenario& s) {
  double scale = std::max({s.la, s.lb, s.h1 + s.h2});
  if (!s.inside_box(x, 1e-12 * scale)) {
    std::ostringstream os;
    os << "material_at: point (" << x.x() << ", " << x.y() << ", " << x.z()
       << ") lies outside the box";
    throw ValidationError(os.str());
  }
  return x.z() >= 0.0 ? s.upper : s.lower;
}

static void check_props(const MaterialProps& m, const std::string& who) {
  if (!(m.K > 0.0)) throw ValidationError(who + ": conductivity must be positive");
  if (!(m.Cp >= 0.0)) throw ValidationError(who + ": heat capacity must be non-negative");
}

std::vector<Inclusion> build_fgm_inclusions(int div, const BilayerScenario& s,
                                            const MaterialProps& upper_particle_props,
                                            const MaterialProps& lower_particle_props) {
  if (div < 4 || div % 4 != 0)
    throw ValidationError("fgm: div must be a positive multiple of 4");
  const double side = (s.h1 + s.h2) / div;
  const int ncol = div / 4;
  if (std::abs(s.la - ncol * side) > 1e-9 * s.la || std::abs(s.lb - ncol * side) > 1e-9 * s.lb)
    throw ValidationError("fgm: quarter-sample cross-section must equal (div/4) cube sides");
  if (std::abs(s.h1 - s.h2) > 1e-12 * (s.h1 + s.h2))
    throw ValidationError("fgm: layers must have equal heights");

  std::vector<Inclusion> out;
  out.reserve(size_t(ncol) * ncol * div);
  const int half = div / 2;
  for (int layer = 1; layer <= half; ++layer) {
    // volume fraction at the interface-side face of this cube layer
    double frac = 0.5 * (1.0 - double(layer - 1) / half);
    double r = side * std::cbrt(3.0 * frac / (4.0 * M_PI));
    if (r >= 0.5 * side)
      throw ValidationError("fgm: generated radius exceeds half the cube side");
    double zc = (layer - 0.5) * side;
    for (int i = 0; i < ncol; ++i)
      for (int j = 0; j < ncol; ++j) {
        Vec3 base(s.x1_0 + (i + 0.5) * side, s.x2_0 + (j + 0.5) * side, 0.0);
        Inclusion up;
        up.center = Vec3(base.x(), base.y(), zc);
        up.semi_axes = Vec3(r, r, r);
        up.props = upper_particle_props;
        up.eigen_order = s.fgm_eigen_order;
        Inclusion down = up;
        down.center.z() = -zc;
        down.props = lower_particle_props;
        out.push_back(up);
        out.push_back(down);
      }
  }
  return out;
}

ValidationReport validate_scenario(BilayerScenario& s) {
  ValidationReport rep;
  if (!(s.la > 0 && s.lb > 0 && s.h1 > 0 && s.h2 > 0))
    throw ValidationError("scenario: box dimensions must be positive");
  check_props(s.upper, "upper phase");
  check_props(s.lower, "lower phase");
  if (s.mode == RunMode::transient) {
    if (!(s.time.dt > 0)) throw ValidationError("scenario: dt must be positive for transient runs");
    if (s.time.steps < 1) throw ValidationError("scenario: at least one time step required");
  }
  if (s.mesh.nx < 1 || s.mesh.ny < 1 || s.mesh.nz_upper < 1 || s.mesh.nz_lower < 1)
    throw ValidationError("scenario: mesh subdivisions must be at least 1");
  for (int c : s.interior_counts)
    if (c < 1) throw ValidationError("scenario: interior point counts must be at least 1");

  if (s.fgm_div) {
    // particles carry the props of the opposite phase
    s.inclusions = build_fgm_inclusions(*s.fgm_div, s, s.lower, s.upper);
  }

  double scale = std::max({s.la, s.lb, s.h1 + s.h2});
  rep.min_interface_clearance = scale;
  rep.min_pair_gap = scale;
  for (size_t i = 0; i < s.inclusions.size(); ++i) {
    const Inclusion& inc = s.inclusions[i];
    std::string who = "inclusion " + std::to_string(i);
    check_props(inc.props, who);
    for (int k = 0; k < 3; ++k)
      if (!(inc.semi_axes[k] > 0)) throw ValidationError(who + ": semi-axes must be positive");
    // axis-aligned bounding box strictly inside the box
    if (inc.center.x() - inc.semi_axes.x() <= s.x1min() ||
        inc.center.x() + inc.semi_axes.x() >= s.x1max() ||
        inc.center.y() - inc.semi_axes.y() <= s.x2min() ||
        inc.center.y() + inc.semi_axes.y() >= s.x2max() ||
        inc.center.z() - inc.semi_axes.z() <= s.x3min() ||
        inc.center.z() + inc.semi_axes.z() >= s.x3max())
      throw ValidationError(who + ": ellipsoid must lie strictly inside the box");
    double clear = std::abs(inc.center.z()) - inc.semi_axes.z();
    if (clear <= 0.0) throw ValidationError(who + ": ellipsoid crosses the interface plane x3 = 0");
    rep.min_interface_clearance = std::min(rep.min_interface_clearance, clear);
  }
  for (size_t i = 0; i < s.inclusions.size(); ++i)
    for (size_t j = i + 1; j < s.inclusions.size(); ++j) {
      const Inclusion& a = s.inclusions[i];
      const Inclusion& b = s.inclusions[j];
      bool spheres = a.semi_axes.x() == a.semi_axes.y() && a.semi_axes.y() == a.semi_axes.z() &&
                     b.semi_axes.x() == b.semi_axes.y() && b.semi_axes.y() == b.semi_axes.z();
      double dist = (a.center - b.center).norm();
      if (spheres) {
        double gap = dist - a.semi_axes.x() - b.semi_axes.x();
        if (gap <= 0.0)
          throw ValidationError("inclusions " + std::to_string(i) + " and " + std::to_string(j) +
                                " intersect");
        rep.min_pair_gap = std::min(rep.min_pair_gap, gap);
        continue;
      }
      double gap = -scale;  // largest per-axis bounding-box separation
      for (int k = 0; k < 3; ++k) {
        double g = std::abs(a.center[k] - b.center[k]) - a.semi_axes[k] - b.semi_axes[k];
        gap = std::max(gap, g);
      }
      if (gap <= 0.0) {
        // conservative screen for non-spherical pairs
        double rmax = a.semi_axes.maxCoeff() + b.semi_axes.maxCoeff();
        if (dist <= rmax)
          throw ValidationError("inclusions " + std::to_string(i) + " and " + std::to_string(j) +
                                " may intersect (conservative bounding test)");
      }
      rep.min_pair_gap = std::min(rep.min_pair_gap, gap);
    }
  return rep;
}

}  // namespace dribem
