// uwbfuse: simulate, correct, solve and summarize TWR/TDOA ranging sessions.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uwbfuse/csv_io.hpp"
#include "uwbfuse/errors.hpp"
#include "uwbfuse/experiment.hpp"
#include "uwbfuse/scene_io.hpp"
#include "uwbfuse/simulator.hpp"

namespace fs = std::filesystem;
using namespace uwbfuse;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kGeometry = 4 };

struct Options {
  std::string scene;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> rounds;
  std::optional<std::string> mode;
  std::string out;
  bool diagnostics = false;
  std::vector<std::string> inputs;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  return out;
}

Scene require_scene(const Options& o) {
  if (o.scene.empty()) throw ConfigError("--scene is required");
  return load_scene(o.scene);
}

fs::path out_dir(const Options& o) { return o.out.empty() ? fs::path(".") : fs::path(o.out); }

ModeSelection modes_of(const Options& o) {
  return mode_selection_from_string(o.mode.value_or("both"));
}

void print_report(const ExperimentReport& report) {
  for (const auto& s : report.modes) {
    std::printf("%-5s used %d excluded %d  mean (%.6f, %.6f)", std::string(to_string(s.mode)).c_str(),
                s.rounds_used, s.rounds_excluded, s.mean.x(), s.mean.y());
    if (s.stddev) std::printf("  stddev (%.6f, %.6f)", s.stddev->x(), s.stddev->y());
    std::printf("\n");
  }
  if (report.mode_mean_difference) {
    std::printf("mode mean difference (%.6f, %.6f)\n", report.mode_mean_difference->x(),
                report.mode_mean_difference->y());
  }
}

int cmd_simulate(const Options& o) {
  const Scene scene = require_scene(o);
  const int rounds = o.rounds.value_or(1000);
  const std::uint64_t seed = o.seed.value_or(scene.noise.seed);
  for (int id : initiating_stations(scene, modes_of(o))) {
    const auto records = simulate_session(scene.with_reference(id), rounds,
                                          derive_seed(seed, static_cast<std::uint64_t>(id)));
    const std::string name = "records_ref" + std::to_string(id) + ".csv";
    auto out = open_output(out_dir(o), name);
    write_records_csv(out, records);
    std::printf("wrote %s (%d rounds)\n", (out_dir(o) / name).string().c_str(), rounds);
  }
  return kOk;
}

int cmd_correct(const Options& o) {
  const Scene scene = require_scene(o);
  if (o.inputs.empty()) throw ConfigError("correct needs at least one records CSV");
  const SceneCalibration calibration = SceneCalibration::from_scene(scene);
  for (const auto& input : o.inputs) {
    auto in = open_input(input);
    const auto records = read_records_csv(in, scene);
    if (records.empty()) throw DataError(input + ": no records");
    std::vector<CorrectedMeasurement> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(correct_record(r, calibration));
    const std::string name = "corrected_ref" + std::to_string(records.front().reference_id) + ".csv";
    auto out = open_output(out_dir(o), name);
    write_corrected_csv(out, rows, o.diagnostics);
    std::printf("wrote %s\n", (out_dir(o) / name).string().c_str());
  }
  return kOk;
}

int cmd_solve(const Options& o) {
  const Scene scene = require_scene(o);
  if (o.inputs.empty()) throw ConfigError("solve needs at least one corrected CSV");
  std::map<int, std::vector<CorrectedMeasurement>> corrected;
  for (const auto& input : o.inputs) {
    auto in = open_input(input);
    auto rows = read_corrected_csv(in, scene);
    if (rows.empty()) throw DataError(input + ": no rows");
    const int id = rows.front().reference_id;
    if (!corrected.emplace(id, std::move(rows)).second) {
      throw DataError("two inputs were initiated by station " + std::to_string(id));
    }
  }
  const ModeSelection modes = modes_of(o);
  if (modes == ModeSelection::Fused) {
    // Fused rounds only need the reference-initiated measurements.
    const int ref = scene.reference().id;
    if (corrected.count(ref)) {
      auto keep = std::move(corrected.at(ref));
      corrected.clear();
      corrected.emplace(ref, std::move(keep));
    }
  }
  const auto estimates = solve_rounds(corrected, scene, modes, SolverConfig{});
  auto out = open_output(out_dir(o), "estimates.csv");
  write_estimates_csv(out, estimates);
  std::printf("wrote %s (%zu estimates)\n", (out_dir(o) / "estimates.csv").string().c_str(),
              estimates.size());
  return kOk;
}

int cmd_report(const Options& o) {
  const Scene scene = require_scene(o);
  if (o.inputs.size() != 1) throw ConfigError("report needs exactly one estimates CSV");
  auto in = open_input(o.inputs.front());
  const auto estimates = read_estimates_csv(in);
  std::set<std::int64_t> rounds;
  for (const auto& e : estimates) rounds.insert(e.round_idx);
  if (rounds.empty()) throw DataError(o.inputs.front() + ": no estimates");
  ExperimentReport report = summarize(estimates, static_cast<std::int64_t>(rounds.size()),
                                      scene.tag().position.head<2>());
  report.seed = o.seed.value_or(scene.noise.seed);
  report.radio = scene.radio;
  auto out = open_output(out_dir(o), "report.json");
  out << report_to_json(report);
  print_report(report);
  return kOk;
}

int cmd_experiment(const Options& o) {
  ExperimentConfig config;
  if (!o.config.empty()) {
    config = load_experiment_config(o.config);
  } else {
    config.scene = require_scene(o);
    config.seed = config.scene.noise.seed;
    config.output_dir = "out";
  }
  if (!o.config.empty() && !o.scene.empty()) config.scene = load_scene(o.scene);
  if (o.seed) config.seed = *o.seed;
  if (o.rounds) config.n_rounds = *o.rounds;
  if (o.mode) config.modes = mode_selection_from_string(*o.mode);
  if (!o.out.empty()) config.output_dir = o.out;
  if (o.diagnostics) config.diagnostics = true;

  const ExperimentReport report = run_experiment(config);
  print_report(report);
  std::printf("output in %s\n", config.output_dir.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UWB two-way ranging and TDOA fusion pipeline"};
  app.require_subcommand(1);
  Options o;

  auto add_scene = [&](CLI::App* sub) {
    sub->add_option("--scene", o.scene, "scene JSON file");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output directory");
  };
  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", o.mode, "toa, fused or both")
        ->check(CLI::IsMember({"toa", "fused", "both"}));
  };

  auto* simulate = app.add_subcommand("simulate", "scene -> records CSV per initiating station");
  add_scene(simulate);
  add_common(simulate);
  add_mode(simulate);
  simulate->add_option("--seed", o.seed, "random seed");
  simulate->add_option("--rounds", o.rounds, "number of rounds")->check(CLI::PositiveNumber);

  auto* correct = app.add_subcommand("correct", "records CSV -> corrected CSV");
  add_scene(correct);
  add_common(correct);
  correct->add_flag("--diagnostics", o.diagnostics, "write intermediate correction terms");
  correct->add_option("inputs", o.inputs, "records CSV files")->required();

  auto* solve = app.add_subcommand("solve", "corrected CSV -> estimates CSV");
  add_scene(solve);
  add_common(solve);
  add_mode(solve);
  solve->add_option("inputs", o.inputs, "corrected CSV files")->required();

  auto* report = app.add_subcommand("report", "estimates CSV -> report JSON");
  add_scene(report);
  add_common(report);
  report->add_option("--seed", o.seed, "seed echoed in the report");
  report->add_option("inputs", o.inputs, "estimates CSV")->required();

  auto* experiment = app.add_subcommand("experiment", "config -> full output tree and report");
  add_scene(experiment);
  add_common(experiment);
  add_mode(experiment);
  experiment->add_option("--config", o.config, "experiment JSON file");
  experiment->add_option("--seed", o.seed, "random seed");
  experiment->add_option("--rounds", o.rounds, "number of rounds")->check(CLI::PositiveNumber);
  experiment->add_flag("--diagnostics", o.diagnostics, "write intermediate correction terms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*correct) return cmd_correct(o);
    if (*solve) return cmd_solve(o);
    if (*report) return cmd_report(o);
    if (*experiment) return cmd_experiment(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return kGeometry;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
