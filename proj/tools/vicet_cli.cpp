// vicet — scan-to-map registration with joint motion-distortion estimation.
//
// Subcommands: simulate, register, unwarp, eval chamfer, eval errors.
// Tabular output is CSV on stdout (or --out); diagnostics go to stderr.
// Exit codes: 0 success, 1 usage, 2 data/file error, 3 non-convergence.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vicet/vicet.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

vicet::StateVector12 parse_state_csv(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw UsageError("state '" + text + "' is not numeric");
  if (v.size() == 6)
    return vicet::StateVector12::rigid({v[0], v[1], v[2]},
                                       vicet::EulerAngles{v[3], v[4], v[5]});
  if (v.size() == 12)
    return vicet::StateVector12::from_vec(
        Eigen::Map<const vicet::Vec12>(v.data()));
  throw UsageError("state needs 6 (x0, theta0) or 12 numbers, got " +
                   std::to_string(v.size()));
}

std::string format_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// CSV lands on stdout unless --out redirects it to a file.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw vicet::IoError(out_path + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw vicet::IoError(out_path + ": write failed");
}

struct SimulateArgs {
  std::string scene_path, state_csv, out_path;
  bool build_map = false;
};

void run_simulate(const SimulateArgs& a) {
  vicet::SceneFile f = vicet::load_scene_file(a.scene_path);
  if (!a.state_csv.empty()) f.true_state = parse_state_csv(a.state_csv);

  vicet::PointCloud cloud;
  if (a.build_map) {
    std::vector<vicet::StateVector12> poses = f.map_poses;
    if (poses.empty())
      poses.push_back(vicet::StateVector12::rigid(f.true_state.x0,
                                                  f.true_state.theta0));
    cloud = vicet::simulate_map(f.scene, f.pattern, poses);
  } else {
    cloud = vicet::simulate_scan(f.scene, f.true_state, f.pattern, f.options);
  }
  cloud.period = f.period;
  vicet::write_cloud(cloud, a.out_path);
}

struct RegisterArgs {
  std::string map_path, scan_path, method = "vicet";
  std::string config_path, init_csv, out_path;
  bool no_seed = false;
};

int run_register(const RegisterArgs& a) {
  const vicet::PointCloud map_cloud = vicet::read_cloud(a.map_path);
  const vicet::PointCloud scan = vicet::read_cloud(a.scan_path);
  vicet::RegistrationConfig cfg;
  if (!a.config_path.empty())
    cfg = vicet::load_registration_config(a.config_path);
  vicet::StateVector12 init;
  if (!a.init_csv.empty()) init = parse_state_csv(a.init_csv);

  vicet::RegistrationResult result;
  if (a.method == "vicet") {
    vicet::StateVector12 seed = init;
    if (!a.no_seed) {
      // Rigid pass first: gets the grid anchored near the right place
      // before the joint solve refines distortion.
      const vicet::RegistrationResult rigid =
          vicet::ndt_register(map_cloud, scan, init, cfg);
      seed = rigid.state;
      seed.dx = init.dx;
      seed.dtheta = init.dtheta;
    }
    result = vicet::vicet_register(map_cloud, scan, seed, cfg);
  } else if (a.method == "ndt") {
    result = vicet::ndt_register(map_cloud, scan, init, cfg);
  } else if (a.method == "icp") {
    result = vicet::icp_register(map_cloud, scan, init, cfg);
  } else {
    throw UsageError("unknown method '" + a.method + "'");
  }

  if (!a.out_path.empty()) vicet::write_result({a.method, result}, a.out_path);

  std::string csv = "method,converged,iterations,cost\n";
  csv += a.method + "," + (result.converged ? "1" : "0") + "," +
         std::to_string(result.iterations) + "," + format_num(result.cost) +
         "\n";
  std::cout << csv;

  if (!result.converged) {
    std::cerr << "vicet: registration did not converge after "
              << result.iterations << " iterations\n";
    return 3;
  }
  return 0;
}

struct UnwarpArgs {
  std::string scan_path, state_file, state_csv, out_path;
};

void run_unwarp(const UnwarpArgs& a) {
  const vicet::PointCloud scan = vicet::read_cloud(a.scan_path);
  vicet::StateVector12 x;
  if (!a.state_file.empty()) {
    x = vicet::read_result(a.state_file).result.state;
  } else if (!a.state_csv.empty()) {
    x = parse_state_csv(a.state_csv);
  } else {
    throw UsageError("unwarp needs --state-file or --state");
  }
  vicet::write_cloud(vicet::unwarp(scan, x), a.out_path);
}

struct ChamferArgs {
  std::string map_path, scan_path, out_path;
  double inflation = 0.05;
};

void run_chamfer(const ChamferArgs& a) {
  const vicet::PointCloud map_cloud = vicet::read_cloud(a.map_path);
  const vicet::PointCloud scan = vicet::read_cloud(a.scan_path);
  const vicet::ChamferReport r = vicet::chamfer(scan, map_cloud, a.inflation);
  std::string csv = "normalized_chamfer_m2,points_used,points_rejected,inflation\n";
  csv += format_num(r.normalized) + "," + std::to_string(r.used) + "," +
         std::to_string(r.rejected) + "," + format_num(r.inflation) + "\n";
  emit(csv, a.out_path);
}

struct ErrorsArgs {
  std::string results_dir, truth_path, forward_csv = "1,0,0", out_path;
};

std::vector<vicet::StateVector12> load_truth_states(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vicet::IoError(path + ": cannot open for reading");
  std::vector<vicet::StateVector12> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (v.empty() && ls.eof()) continue;  // blank/comment line
    if (v.size() != 12)
      throw vicet::IoError(path + ":" + std::to_string(line) +
                           ": truth line needs 12 numbers");
    out.push_back(
        vicet::StateVector12::from_vec(Eigen::Map<const vicet::Vec12>(v.data())));
  }
  return out;
}

void run_errors(const ErrorsArgs& a) {
  std::vector<std::filesystem::path> files;
  {
    std::error_code ec;
    std::filesystem::directory_iterator it(a.results_dir, ec);
    if (ec)
      throw vicet::IoError(a.results_dir + ": " + ec.message());
    for (const auto& entry : it)
      if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw vicet::DataError(a.results_dir + ": no result files");

  std::vector<vicet::StateVector12> estimates;
  for (const auto& p : files)
    estimates.push_back(vicet::read_result(p.string()).result.state);
  const std::vector<vicet::StateVector12> truths =
      load_truth_states(a.truth_path);

  std::string fs = a.forward_csv;
  for (char& c : fs)
    if (c == ',') c = ' ';
  std::istringstream fin(fs);
  vicet::Vec3 forward;
  if (!(fin >> forward.x() >> forward.y() >> forward.z()))
    throw UsageError("--forward needs 3 numbers");

  const vicet::ErrorStats stats =
      vicet::error_stats(estimates, truths, forward);
  std::string csv = "component,mean,std\n";
  for (const auto& [name, comp] : stats.rows())
    csv += name + "," + format_num(comp->mean) + "," +
           format_num(comp->std_dev) + "\n";
  emit(csv, a.out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scan-to-map registration with motion-distortion estimation"};
  app.require_subcommand(1);
  int exit_code = 0;

  auto sim_args = std::make_shared<SimulateArgs>();
  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a distorted scan (or a map with --map) from a scene file");
  sim->add_option("--scene", sim_args->scene_path, "Scene description file")
      ->required();
  sim->add_option("--state", sim_args->state_csv,
                  "Override the scene's true_state (12 comma-separated numbers)");
  sim->add_option("--out", sim_args->out_path, "Output cloud path")->required();
  sim->add_flag("--map", sim_args->build_map,
                "Emit the undistorted map built from the scene's map_pose entries");
  sim->callback([sim_args] { run_simulate(*sim_args); });

  auto reg_args = std::make_shared<RegisterArgs>();
  CLI::App* reg = app.add_subcommand("register", "Register a scan to a map");
  reg->add_option("--map", reg_args->map_path, "Map cloud")->required();
  reg->add_option("--scan", reg_args->scan_path, "Body-frame scan cloud")
      ->required();
  reg->add_option("--method", reg_args->method, "vicet | ndt | icp")
      ->check(CLI::IsMember({"vicet", "ndt", "icp"}));
  reg->add_option("--config", reg_args->config_path, "Solver config file");
  reg->add_option("--init", reg_args->init_csv,
                  "Initial state (6 or 12 comma-separated numbers)");
  reg->add_flag("--no-seed", reg_args->no_seed,
                "Skip the rigid pre-registration that seeds the joint solve");
  reg->add_option("--out", reg_args->out_path, "Result file path");
  reg->callback([reg_args, &exit_code] { exit_code = run_register(*reg_args); });

  auto unw_args = std::make_shared<UnwarpArgs>();
  CLI::App* unw = app.add_subcommand(
      "unwarp", "Undo motion distortion using an estimated state");
  unw->add_option("--scan", unw_args->scan_path, "Body-frame scan cloud")
      ->required();
  unw->add_option("--state-file", unw_args->state_file,
                  "Result file carrying the state");
  unw->add_option("--state", unw_args->state_csv,
                  "State as 6 or 12 comma-separated numbers");
  unw->add_option("--out", unw_args->out_path, "Output cloud path")->required();
  unw->callback([unw_args] { run_unwarp(*unw_args); });

  CLI::App* eval = app.add_subcommand("eval", "Evaluation metrics");
  eval->require_subcommand(1);

  auto cham_args = std::make_shared<ChamferArgs>();
  CLI::App* cham = eval->add_subcommand(
      "chamfer", "Normalized chamfer distance of a registered scan against a map");
  cham->add_option("--map", cham_args->map_path, "Map cloud")->required();
  cham->add_option("--scan", cham_args->scan_path, "Registered map-frame scan")
      ->required();
  cham->add_option("--inflation", cham_args->inflation,
                   "Convex-hull inflation factor for outlier rejection");
  cham->add_option("--out", cham_args->out_path, "Write CSV here instead of stdout");
  cham->callback([cham_args] { run_chamfer(*cham_args); });

  auto err_args = std::make_shared<ErrorsArgs>();
  CLI::App* errs = eval->add_subcommand(
      "errors", "Error statistics of result files against ground truth");
  errs->add_option("--results", err_args->results_dir, "Directory of result files")
      ->required();
  errs->add_option("--truth", err_args->truth_path,
                   "Ground-truth file (12 numbers per line)")
      ->required();
  errs->add_option("--forward", err_args->forward_csv,
                   "Forward axis in the map frame (3 numbers)");
  errs->add_option("--out", err_args->out_path, "Write CSV here instead of stdout");
  errs->callback([err_args] { run_errors(*err_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "vicet: " << e.what() << "\n";
    return 1;
  } catch (const vicet::ConditioningError& e) {
    std::cerr << "vicet: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // IoError, DataError, filesystem problems: data errors all.
    std::cerr << "vicet: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
