#include <dribem/config.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <dribem/oracle.hpp>
#include <dribem/postprocess.hpp>

namespace dribem {

namespace {

using nlohmann::json;

// strict object access: reject unknown keys so typos fail loudly
void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ValidationError(std::string(where) + ": unknown key \"" + it.key() + "\"");
  }
}

double get_num(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) throw ValidationError(std::string(key) + ": expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) throw ValidationError(std::string(key) + ": expected an integer");
  return j[key].get<int>();
}

Vec3 vec3_from(const json& a, const char* where) {
  if (!a.is_array() || a.size() != 3) throw ValidationError(std::string(where) + ": expected [x, y, z]");
  return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::transient: return "transient";
    case RunMode::harmonic: return "harmonic";
    case RunMode::steady: return "steady";
  }
  return "transient";
}

RunMode mode_from(const std::string& s) {
  if (s == "transient") return RunMode::transient;
  if (s == "harmonic") return RunMode::harmonic;
  if (s == "steady") return RunMode::steady;
  throw ValidationError("mode: expected transient, harmonic or steady, got \"" + s + "\"");
}

const char* order_name(EigenOrder o) {
  switch (o) {
    case EigenOrder::uniform: return "uniform";
    case EigenOrder::linear: return "linear";
    case EigenOrder::quadratic: return "quadratic";
  }
  return "uniform";
}

EigenOrder order_from(const std::string& s) {
  if (s == "uniform") return EigenOrder::uniform;
  if (s == "linear") return EigenOrder::linear;
  if (s == "quadratic") return EigenOrder::quadratic;
  throw ValidationError("eigen_order: expected uniform, linear or quadratic, got \"" + s + "\"");
}

constexpr const char* kFaceNames[6] = {"x1min", "x1max", "x2min", "x2max", "x3min", "x3max"};

FaceBc bc_from(const json& j, const char* where) {
  check_keys(j, {"kind", "amplitude", "period"}, where);
  FaceBc bc;
  std::string kind = j.value("kind", std::string("neumann"));
  if (kind == "dirichlet")
    bc.kind = BcKind::dirichlet;
  else if (kind == "neumann")
    bc.kind = BcKind::neumann;
  else
    throw ValidationError(std::string(where) + ": kind must be dirichlet or neumann");
  bc.amplitude = get_num(j, "amplitude", 0.0);
  bc.period = get_num(j, "period", 0.0);
  return bc;
}

json bc_to(const FaceBc& bc) {
  return json{{"kind", bc.kind == BcKind::dirichlet ? "dirichlet" : "neumann"},
              {"amplitude", bc.amplitude},
              {"period", bc.period}};
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a, const char* where) {
  if (!a.is_array()) throw ValidationError(std::string(where) + ": expected an array");
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  check_keys(j,
             {"name", "box", "materials", "bc", "mode", "time", "omega", "u0", "mesh", "interior",
              "inclusions", "fgm", "probes", "layer_profiles", "oracle", "output"},
             "config");
  RunConfig cfg;
  BilayerScenario& s = cfg.scenario;
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  if (j.contains("box")) {
    const json& b = j["box"];
    check_keys(b, {"la", "lb", "h1", "h2", "x1_0", "x2_0"}, "box");
    s.la = get_num(b, "la", s.la);
    s.lb = get_num(b, "lb", s.lb);
    s.h1 = get_num(b, "h1", s.h1);
    s.h2 = get_num(b, "h2", s.h2);
    s.x1_0 = get_num(b, "x1_0", s.x1_0);
    s.x2_0 = get_num(b, "x2_0", s.x2_0);
  }
  if (j.contains("materials")) {
    const json& m = j["materials"];
    check_keys(m, {"upper", "lower"}, "materials");
    for (auto* side : {&s.upper, &s.lower}) {
      const char* key = side == &s.upper ? "upper" : "lower";
      if (!m.contains(key)) continue;
      check_keys(m[key], {"K", "Cp"}, key);
      side->K = get_num(m[key], "K", side->K);
      side->Cp = get_num(m[key], "Cp", side->Cp);
    }
  }
  if (j.contains("bc")) {
    check_keys(j["bc"], {kFaceNames[0], kFaceNames[1], kFaceNames[2], kFaceNames[3], kFaceNames[4],
                         kFaceNames[5]},
               "bc");
    for (int f = 0; f < 6; ++f)
      if (j["bc"].contains(kFaceNames[f])) s.bc[f] = bc_from(j["bc"][kFaceNames[f]], kFaceNames[f]);
  }
  if (j.contains("mode")) s.mode = mode_from(j["mode"].get<std::string>());
  if (j.contains("time")) {
    const json& t = j["time"];
    check_keys(t, {"t0", "dt", "steps"}, "time");
    s.time.t0 = get_num(t, "t0", s.time.t0);
    s.time.dt = get_num(t, "dt", s.time.dt);
    s.time.steps = get_int(t, "steps", s.time.steps);
  }
  s.omega = get_num(j, "omega", s.omega);
  s.u0 = get_num(j, "u0", s.u0);
  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    check_keys(m, {"nx", "ny", "nz_upper", "nz_lower"}, "mesh");
    s.mesh.nx = get_int(m, "nx", s.mesh.nx);
    s.mesh.ny = get_int(m, "ny", s.mesh.ny);
    s.mesh.nz_upper = get_int(m, "nz_upper", s.mesh.nz_upper);
    s.mesh.nz_lower = get_int(m, "nz_lower", s.mesh.nz_lower);
  }
  if (j.contains("interior")) {
    const json& a = j["interior"];
    if (!a.is_array() || a.size() != 3) throw ValidationError("interior: expected [nx, ny, nz]");
    for (int k = 0; k < 3; ++k) s.interior_counts[k] = a[k].get<int>();
  }
  if (j.contains("inclusions")) {
    if (!j["inclusions"].is_array()) throw ValidationError("inclusions: expected an array");
    for (const json& ij : j["inclusions"]) {
      check_keys(ij, {"center", "semi_axes", "K", "Cp", "eigen_order"}, "inclusion");
      Inclusion inc;
      inc.center = vec3_from(ij.at("center"), "inclusion center");
      inc.semi_axes = vec3_from(ij.at("semi_axes"), "inclusion semi_axes");
      inc.props.K = get_num(ij, "K", 0.0);
      inc.props.Cp = get_num(ij, "Cp", 0.0);
      if (ij.contains("eigen_order")) inc.eigen_order = order_from(ij["eigen_order"].get<std::string>());
      s.inclusions.push_back(inc);
    }
  }
  if (j.contains("fgm")) {
    const json& f = j["fgm"];
    check_keys(f, {"div", "eigen_order"}, "fgm");
    s.fgm_div = get_int(f, "div", 8);
    if (f.contains("eigen_order")) s.fgm_eigen_order = order_from(f["eigen_order"].get<std::string>());
  }
  if (j.contains("probes")) {
    if (!j["probes"].is_array()) throw ValidationError("probes: expected an array of points");
    for (const json& p : j["probes"]) cfg.probes.push_back(vec3_from(p, "probe"));
  }
  cfg.layer_profiles = get_int(j, "layer_profiles", 0);
  if (cfg.layer_profiles < 0) throw ValidationError("layer_profiles: must be non-negative");
  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    check_keys(o, {"enabled", "grid", "tol_u"}, "oracle");
    if (o.contains("enabled")) cfg.oracle.enabled = o["enabled"].get<bool>();
    if (o.contains("grid")) {
      if (!o["grid"].is_array() || o["grid"].size() != 3)
        throw ValidationError("oracle.grid: expected [nx, ny, nz]");
      for (int k = 0; k < 3; ++k) cfg.oracle.grid[k] = o["grid"][k].get<int>();
    }
    cfg.oracle.tol_u = get_num(o, "tol_u", cfg.oracle.tol_u);
    if (!(cfg.oracle.tol_u > 0.0)) throw ValidationError("oracle.tol_u: must be positive");
  }
  if (j.contains("output")) {
    check_keys(j["output"], {"dir"}, "output");
    if (j["output"].contains("dir")) cfg.out_dir = j["output"]["dir"].get<std::string>();
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  const BilayerScenario& s = cfg.scenario;
  json j;
  j["name"] = s.name;
  j["box"] = {{"la", s.la}, {"lb", s.lb}, {"h1", s.h1},
              {"h2", s.h2}, {"x1_0", s.x1_0}, {"x2_0", s.x2_0}};
  j["materials"] = {{"upper", {{"K", s.upper.K}, {"Cp", s.upper.Cp}}},
                    {"lower", {{"K", s.lower.K}, {"Cp", s.lower.Cp}}}};
  json bc;
  for (int f = 0; f < 6; ++f) bc[kFaceNames[f]] = bc_to(s.bc[f]);
  j["bc"] = bc;
  j["mode"] = mode_name(s.mode);
  j["time"] = {{"t0", s.time.t0}, {"dt", s.time.dt}, {"steps", s.time.steps}};
  j["omega"] = s.omega;
  j["u0"] = s.u0;
  j["mesh"] = {{"nx", s.mesh.nx},
               {"ny", s.mesh.ny},
               {"nz_upper", s.mesh.nz_upper},
               {"nz_lower", s.mesh.nz_lower}};
  j["interior"] = json::array({s.interior_counts[0], s.interior_counts[1], s.interior_counts[2]});
  json incs = json::array();
  for (const Inclusion& inc : s.inclusions)
    incs.push_back(json{{"center", vec3_to(inc.center)},
                        {"semi_axes", vec3_to(inc.semi_axes)},
                        {"K", inc.props.K},
                        {"Cp", inc.props.Cp},
                        {"eigen_order", order_name(inc.eigen_order)}});
  j["inclusions"] = incs;
  if (s.fgm_div) j["fgm"] = {{"div", *s.fgm_div}, {"eigen_order", order_name(s.fgm_eigen_order)}};
  json probes = json::array();
  for (const Vec3& p : cfg.probes) probes.push_back(vec3_to(p));
  j["probes"] = probes;
  j["layer_profiles"] = cfg.layer_profiles;
  j["oracle"] = {{"enabled", cfg.oracle.enabled},
                 {"grid", json::array({cfg.oracle.grid[0], cfg.oracle.grid[1], cfg.oracle.grid[2]})},
                 {"tol_u", cfg.oracle.tol_u}};
  j["output"] = {{"dir", cfg.out_dir}};
  return j;
}

RunConfig load_config(const std::string& path) { return config_from_json(load_json_file(path)); }

void save_config(const RunConfig& cfg, const std::string& path) {
  write_text_file(path, config_to_json(cfg).dump(2) + "\n");
}

json checkpoint_to_json(const TimeState& st) {
  json j;
  j["t"] = st.t;
  j["step"] = st.step;
  j["residual"] = st.residual;
  j["u"] = vec_to_json(st.u);
  j["q"] = vec_to_json(st.q);
  j["adot"] = vec_to_json(st.adot);
  j["c"] = vec_to_json(st.c);
  j["se"] = vec_to_json(st.se);
  j["u_prev"] = vec_to_json(st.u_prev);
  j["v_cur"] = vec_to_json(st.v_cur);
  j["v_prev"] = vec_to_json(st.v_prev);
  return j;
}

TimeState checkpoint_from_json(const json& j) {
  check_keys(j, {"t", "step", "residual", "u", "q", "adot", "c", "se", "u_prev", "v_cur", "v_prev"},
             "checkpoint");
  TimeState st;
  st.t = j.at("t").get<double>();
  st.step = j.at("step").get<int>();
  st.residual = j.at("residual").get<double>();
  st.u = vec_from_json(j.at("u"), "u");
  st.q = vec_from_json(j.at("q"), "q");
  st.adot = vec_from_json(j.at("adot"), "adot");
  st.c = vec_from_json(j.at("c"), "c");
  st.se = vec_from_json(j.at("se"), "se");
  st.u_prev = vec_from_json(j.at("u_prev"), "u_prev");
  st.v_cur = vec_from_json(j.at("v_cur"), "v_cur");
  st.v_prev = vec_from_json(j.at("v_prev"), "v_prev");
  return st;
}

void save_checkpoint(const TimeState& st, const std::string& path) {
  write_text_file(path, checkpoint_to_json(st).dump() + "\n");
}

TimeState load_checkpoint(const std::string& path) {
  return checkpoint_from_json(load_json_file(path));
}

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// voxel counts that resolve the geometry: roughly 24 cells over the shortest
// box extent, at least six per inclusion diameter, interface on a face
std::array<int, 3> auto_oracle_grid(const BilayerScenario& s) {
  const double H = s.h1 + s.h2;
  double h = std::min({s.la, s.lb, H}) / 24.0;
  for (const Inclusion& inc : s.inclusions) h = std::min(h, inc.semi_axes.minCoeff() / 3.0);
  const int nx = std::max(4, static_cast<int>(std::ceil(s.la / h)));
  const int ny = std::max(4, static_cast<int>(std::ceil(s.lb / h)));
  const int nz0 = std::max(4, static_cast<int>(std::ceil(H / h)));
  for (int nz = nz0; nz <= 8 * nz0 + 256; ++nz) {
    const double kf = s.h2 / (H / nz);
    const double r = std::round(kf);
    if (std::abs(kf - r) <= 1e-9 * nz && r >= 1.0 && r <= nz - 1.0)
      return {nx, ny, nz};
  }
  throw ValidationError("no voxel count aligns the interface; set oracle.grid explicitly");
}

void append_samples(std::vector<FieldSample>& rows, std::vector<double>& flat,
                    const std::vector<FieldSample>& fs) {
  for (const FieldSample& f : fs) {
    rows.push_back(f);
    flat.push_back(f.u);
  }
}

std::string layers_csv(const LayerProfile& prof) {
  std::string out = "x3,u_avg,q3_avg,samples\n";
  char buf[160];
  for (size_t i = 0; i < prof.z.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", prof.z[i], prof.u_avg[i],
                  prof.q3_avg[i], prof.per_layer);
    out += buf;
  }
  return out;
}

int run_impl(const RunSpec& spec) {
  RunConfig cfg = load_config(spec.config_path);
  if (spec.mode) cfg.scenario.mode = *spec.mode;
  if (spec.eigen_order) {
    for (Inclusion& inc : cfg.scenario.inclusions) inc.eigen_order = *spec.eigen_order;
    cfg.scenario.fgm_eigen_order = *spec.eigen_order;
  }
  if (spec.dt) cfg.scenario.time.dt = *spec.dt;
  if (spec.steps) cfg.scenario.time.steps = *spec.steps;
  if (spec.omega) cfg.scenario.omega = *spec.omega;
  if (spec.oracle) cfg.oracle.enabled = *spec.oracle;
  if (spec.out_dir) cfg.out_dir = *spec.out_dir;
#ifdef _OPENMP
  if (spec.threads > 0) omp_set_num_threads(spec.threads);
#endif
  const RunMode mode = cfg.scenario.mode;
  if ((spec.checkpoint_out || spec.resume_from) && mode != RunMode::transient &&
      mode != RunMode::steady)
    throw ValidationError("checkpoints need a time-stepping mode");
  if (spec.resume_from && mode != RunMode::transient)
    throw ValidationError("resume needs transient mode");
  if (cfg.oracle.enabled && cfg.probes.empty())
    throw ValidationError("the finite-difference comparison needs probes");
  if (cfg.layer_profiles > 0 && mode == RunMode::harmonic)
    throw ValidationError("layer profiles need a real-valued field");

  Timer build_timer;
  GlobalSystem g = build_global(cfg.scenario);
  std::cout << "system: " << g.nM - static_cast<int>(g.interior_pts.size()) << " boundary nodes, "
            << g.interior_pts.size() << " interior points, " << g.nQ << " flux dofs, "
            << g.n_unknown << " unknowns (" << build_timer.sec() << " s)\n";
  for (const std::string& w : g.warnings) std::cout << "warning: " << w << "\n";

  json summary;
  summary["config"] = config_to_json(cfg);
  summary["mode"] = mode_name(mode);
  summary["counts"] = {{"boundary_nodes", g.nM - static_cast<int>(g.interior_pts.size())},
                       {"interior_points", g.interior_pts.size()},
                       {"flux_dofs", g.nQ},
                       {"unknowns", g.n_unknown},
                       {"inclusions", g.s.inclusions.size()}};
  summary["warnings"] = g.warnings;

  std::vector<FieldSample> probe_rows;
  std::vector<double> bem_u;     // probe temperatures, station major
  std::vector<HarmonicSample> harmonic_samples;
  std::vector<double> residuals;
  LayerProfile layers;
  int first_station = 0;
  Timer solve_timer;

  if (mode == RunMode::steady) {
    TimeState st = solve_steady(g);
    residuals.push_back(st.residual);
    if (!cfg.probes.empty()) append_samples(probe_rows, bem_u, eval_fields(g, st, cfg.probes));
    if (cfg.layer_profiles > 0) layers = layer_average(g, st, cfg.layer_profiles);
    if (spec.checkpoint_out) save_checkpoint(st, *spec.checkpoint_out);
  } else if (mode == RunMode::transient) {
    TimeState st;
    if (spec.resume_from) {
      st = load_checkpoint(*spec.resume_from);
      TimeState ref = initial_state(g);
      if (st.u.size() != ref.u.size() || st.q.size() != ref.q.size() ||
          st.adot.size() != ref.adot.size() || st.c.size() != ref.c.size() ||
          st.se.size() != ref.se.size() || st.v_cur.size() != ref.v_cur.size())
        throw ValidationError("checkpoint does not match the configured system");
      if (st.step > g.s.time.steps)
        throw ValidationError("checkpoint is past the configured number of steps");
    } else {
      st = initial_state(g);
    }
    first_station = st.step;
    TransientWork w;
    if (!cfg.probes.empty()) append_samples(probe_rows, bem_u, eval_fields(g, st, cfg.probes));
    for (int m = st.step + 1; m <= g.s.time.steps; ++m) {
      step_transient(g, w, st);
      if (!std::isfinite(st.residual))
        throw NumericalError("non-finite residual at step " + std::to_string(m));
      residuals.push_back(st.residual);
      if (!cfg.probes.empty()) append_samples(probe_rows, bem_u, eval_fields(g, st, cfg.probes));
    }
    if (cfg.layer_profiles > 0) layers = layer_average(g, st, cfg.layer_profiles);
    if (spec.checkpoint_out) save_checkpoint(st, *spec.checkpoint_out);
  } else {
    HarmonicResult hr = solve_harmonic(g, g.s.omega);
    residuals.push_back(hr.residual);
    if (!cfg.probes.empty()) {
      harmonic_samples = eval_fields(g, hr, cfg.probes);
      const std::vector<HarmonicSample>& hs = harmonic_samples;
      // u(x, t) = Re[U e^{i w t}]: export the field at t = 0 and, for a
      // genuine oscillation, at a quarter period where it equals -Im U
      for (const HarmonicSample& h : hs) {
        FieldSample re;
        re.x = h.x;
        re.t = 0.0;
        re.u = h.u.real();
        re.grad = h.grad.real();
        re.q = h.q.real();
        re.phase = h.phase;
        probe_rows.push_back(re);
        bem_u.push_back(std::abs(h.u));
      }
      if (g.s.omega != 0.0)
        for (const HarmonicSample& h : hs) {
          FieldSample im;
          im.x = h.x;
          im.t = M_PI / (2.0 * g.s.omega);
          im.u = -h.u.imag();
          im.grad = -h.grad.imag();
          im.q = -h.q.imag();
          im.phase = h.phase;
          probe_rows.push_back(im);
        }
    }
  }
  std::cout << "solve: " << residuals.size() << " level(s) in " << solve_timer.sec() << " s\n";

  summary["residuals"] = residuals;
  bool gate_ok = true;

  if (cfg.oracle.enabled) {
    Timer oracle_timer;
    std::array<int, 3> grid = cfg.oracle.grid;
    if (grid[0] <= 0 || grid[1] <= 0 || grid[2] <= 0) grid = auto_oracle_grid(g.s);
    FdGrid fg = make_fd_grid(g.s, grid[0], grid[1], grid[2]);
    std::vector<double> fd_u;
    double phase_max = 0.0;
    if (mode == RunMode::steady) {
      Eigen::VectorXd u = fd_solve_steady(fg);
      for (const Vec3& p : cfg.probes) fd_u.push_back(fd_sample_u(fg, u, p));
    } else if (mode == RunMode::transient) {
      FdSeries ser = fd_solve_transient(fg, cfg.probes);
      for (int m = first_station; m <= g.s.time.steps; ++m)
        for (size_t p = 0; p < cfg.probes.size(); ++p) fd_u.push_back(ser.u(m, p));
    } else {
      Eigen::VectorXcd u = fd_solve_harmonic(fg, g.s.omega);
      std::vector<std::complex<double>> fdc;
      double umax = 0.0;
      for (const Vec3& p : cfg.probes) {
        fdc.push_back(fd_sample_u(fg, u, p));
        fd_u.push_back(std::abs(fdc.back()));
        umax = std::max(umax, std::abs(fdc.back()));
      }
      for (size_t p = 0; p < cfg.probes.size(); ++p)
        if (std::abs(fdc[p]) > 1e-9 * umax)
          phase_max = std::max(phase_max, std::abs(std::arg(harmonic_samples[p].u / fdc[p])));
    }
    FieldDiff d = compare_fields(bem_u, fd_u);
    gate_ok = d.linf <= cfg.oracle.tol_u;
    summary["oracle"] = {{"grid", json::array({grid[0], grid[1], grid[2]})},
                         {"u_linf", d.linf},
                         {"u_l2", d.l2},
                         {"tol_u", cfg.oracle.tol_u},
                         {"pass", gate_ok}};
    if (mode == RunMode::harmonic) summary["oracle"]["phase_max"] = phase_max;
    std::cout << "cross-check: relative gap " << d.linf << " (tolerance " << cfg.oracle.tol_u
              << ", " << (gate_ok ? "pass" : "FAIL") << ", " << oracle_timer.sec() << " s)\n";
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string base = cfg.out_dir + "/";
    if (!probe_rows.empty()) write_field_csv(base + "probes.csv", probe_rows);
    if (!layers.z.empty()) write_text_file(base + "layers.csv", layers_csv(layers));
    write_text_file(base + "summary.json", summary.dump(2) + "\n");
  }
  return gate_ok ? 0 : 4;
}

}  // namespace

int run(const RunSpec& spec) {
  try {
    return run_impl(spec);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace dribem
