#pragma once

// JSON configuration documents, time-state checkpoints, and the end-to-end
// run driver behind the command line tool.
//
// A configuration document holds the physical scenario plus run requests:
//
//   {
//     "name": "two_layer_demo",
//     "box": {"la": 1, "lb": 1, "h1": 1, "h2": 1, "x1_0": 0, "x2_0": 0},
//     "materials": {"upper": {"K": 4, "Cp": 10}, "lower": {"K": 2, "Cp": 3}},
//     "bc": {"x3max": {"kind": "dirichlet", "amplitude": 10, "period": 20},
//            "x3min": {"kind": "dirichlet", "amplitude": 0}},
//     "mode": "transient",                      // or "steady", "harmonic"
//     "time": {"t0": 0, "dt": 0.1, "steps": 60},
//     "omega": 1.0,                             // harmonic angular frequency
//     "u0": 0.0,
//     "mesh": {"nx": 10, "ny": 10, "nz_upper": 10, "nz_lower": 10},
//     "interior": [4, 4, 8],
//     "inclusions": [{"center": [0.5, 0.5, 0.125], "semi_axes": [0.1, 0.1, 0.1],
//                     "K": 10, "Cp": 1, "eigen_order": "uniform"}],
//     "fgm": {"div": 8, "eigen_order": "uniform"},
//     "probes": [[0.5, 0.5, 0.25], [0.5, 0.5, -0.25]],
//     "layer_profiles": 16,
//     "oracle": {"enabled": false, "grid": [24, 24, 48], "tol_u": 0.01},
//     "output": {"dir": "out"}
//   }
//
// Faces omitted from "bc" stay adiabatic. Any other missing key keeps the
// default shown by an empty RunConfig; unknown keys are rejected so typos
// fail loudly. A checkpoint file is the JSON dump of one TimeState: scalars
// "t", "step", "residual" and the arrays "u", "q", "adot", "c", "se",
// "u_prev", "v_cur", "v_prev", exactly the members step_transient carries
// between time levels.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <dribem/model.hpp>
#include <dribem/solver.hpp>

namespace dribem {

// Finite-difference cross-check requests. A zero grid entry lets the runner
// pick a resolution that aligns the interface and resolves every inclusion.
struct OracleSpec {
  bool enabled = false;
  std::array<int, 3> grid = {0, 0, 0};
  double tol_u = 0.01;  // relative gate on probe temperatures
};

struct RunConfig {
  BilayerScenario scenario;
  std::vector<Vec3> probes;
  int layer_profiles = 0;  // when positive, write layer-averaged profiles
  OracleSpec oracle;
  std::string out_dir;  // empty: no files written
};

// Document round trip. Parsing throws ValidationError on malformed input,
// unknown keys, or out-of-range values.
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

// Checkpoint round trip; the JSON layout is documented above.
nlohmann::json checkpoint_to_json(const TimeState& st);
TimeState checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const TimeState& st, const std::string& path);
TimeState load_checkpoint(const std::string& path);

// Command line request: a configuration file plus overrides. Every optional
// override replaces the corresponding document value before the run.
struct RunSpec {
  std::string config_path;
  std::optional<RunMode> mode;
  std::optional<EigenOrder> eigen_order;  // applied to every inclusion
  std::optional<double> dt;
  std::optional<int> steps;
  std::optional<double> omega;
  std::optional<bool> oracle;
  std::optional<std::string> out_dir;
  std::optional<std::string> checkpoint_out;  // write the final state here
  std::optional<std::string> resume_from;     // continue from this checkpoint
  int threads = 0;                            // 0 keeps the ambient setting
};

// Executes the request end to end: probe tables and layer profiles to CSV,
// a deterministic run summary to JSON, optional finite-difference
// comparison. Returns the process exit code: 0 success, 2 invalid input,
// 3 numerical failure, 4 cross-check tolerance failure. Identical requests
// produce bit-identical output files.
int run(const RunSpec& spec);

}  // namespace dribem
