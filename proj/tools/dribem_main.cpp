// Command line front end: parses flags into a RunSpec and hands off to the
// run driver. Exit codes: 0 success, 2 invalid input, 3 numerical failure,
// 4 cross-check tolerance failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <dribem/config.hpp>

int main(int argc, char** argv) {
  CLI::App app{"layered-box heat transfer with ellipsoidal inhomogeneities\n"
               "boundary element solver with finite-difference cross-checks"};
  dribem::RunSpec spec;
  std::string mode, order, out_dir, checkpoint, resume;
  double dt = 0.0, omega = 0.0;
  int steps = 0;
  bool oracle_on = false, oracle_off = false;

  app.add_option("config", spec.config_path, "configuration JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "override the run mode: transient, steady or harmonic");
  app.add_option("--eigen-order", order,
                 "override every inclusion field order: uniform, linear or quadratic");
  auto* dt_opt = app.add_option("--dt", dt, "override the time step");
  auto* steps_opt = app.add_option("--steps", steps, "override the number of time steps");
  auto* omega_opt = app.add_option("--omega", omega, "override the angular frequency");
  app.add_flag("--oracle", oracle_on, "enable the finite-difference comparison");
  app.add_flag("--no-oracle", oracle_off, "disable the finite-difference comparison");
  app.add_option("--out", out_dir, "directory for CSV and summary output");
  app.add_option("--checkpoint", checkpoint, "write the final state to this JSON file");
  app.add_option("--resume", resume, "continue a transient run from this checkpoint");
  app.add_option("--threads", spec.threads, "worker threads (0 keeps the environment setting)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (!mode.empty()) {
    if (mode == "transient")
      spec.mode = dribem::RunMode::transient;
    else if (mode == "steady")
      spec.mode = dribem::RunMode::steady;
    else if (mode == "harmonic")
      spec.mode = dribem::RunMode::harmonic;
    else {
      std::cerr << "invalid input: --mode must be transient, steady or harmonic\n";
      return 2;
    }
  }
  if (!order.empty()) {
    if (order == "uniform")
      spec.eigen_order = dribem::EigenOrder::uniform;
    else if (order == "linear")
      spec.eigen_order = dribem::EigenOrder::linear;
    else if (order == "quadratic")
      spec.eigen_order = dribem::EigenOrder::quadratic;
    else {
      std::cerr << "invalid input: --eigen-order must be uniform, linear or quadratic\n";
      return 2;
    }
  }
  if (dt_opt->count() > 0) spec.dt = dt;
  if (steps_opt->count() > 0) spec.steps = steps;
  if (omega_opt->count() > 0) spec.omega = omega;
  if (oracle_on && oracle_off) {
    std::cerr << "invalid input: --oracle and --no-oracle conflict\n";
    return 2;
  }
  if (oracle_on) spec.oracle = true;
  if (oracle_off) spec.oracle = false;
  if (!out_dir.empty()) spec.out_dir = out_dir;
  if (!checkpoint.empty()) spec.checkpoint_out = checkpoint;
  if (!resume.empty()) spec.resume_from = resume;

  return dribem::run(spec);
}
