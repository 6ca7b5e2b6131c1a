#include "uwbfuse/experiment.hpp"

#include <algorithm>
#include <fstream>
#include "json.hpp"
#include <string>

#include "uwbfuse/csv_io.hpp"
#include "uwbfuse/errors.hpp"
#include "uwbfuse/simulator.hpp"
#include "uwbfuse/statistics.hpp"

namespace uwbfuse {
namespace {

std::string tagged(std::string_view stage, const std::exception& e) {
  return "[" + std::string(stage) + "] " + e.what();
}

// Runs `f`, re-raising library errors with the stage name prepended.
template <typename F>
auto in_stage(std::string_view stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SingularGeometryError& e) {
    throw SingularGeometryError(tagged(stage, e), e.station_id());
  } catch (const DegenerateGeometryError& e) {
    throw DegenerateGeometryError(tagged(stage, e));
  } catch (const GeometryError& e) {
    throw GeometryError(tagged(stage, e));
  } catch (const DomainError& e) {
    throw DomainError(tagged(stage, e), e.value());
  } catch (const MalformedRecordError& e) {
    throw MalformedRecordError(tagged(stage, e));
  } catch (const StatisticsError& e) {
    throw StatisticsError(tagged(stage, e));
  } catch (const DataError& e) {
    throw DataError(tagged(stage, e));
  } catch (const ConfigError& e) {
    throw ConfigError(tagged(stage, e));
  }
}

nlohmann::ordered_json vec_json(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }

nlohmann::ordered_json mat_json(const Eigen::Matrix2d& m) {
  return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

void write_file(const std::filesystem::path& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  writer(out);
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace

ModeSelection mode_selection_from_string(std::string_view name) {
  if (name == "toa") return ModeSelection::Toa;
  if (name == "fused") return ModeSelection::Fused;
  if (name == "both") return ModeSelection::Both;
  throw ConfigError("mode must be toa, fused or both, got '" + std::string(name) + "'");
}

std::string_view to_string(ModeSelection modes) {
  switch (modes) {
    case ModeSelection::Toa:
      return "toa";
    case ModeSelection::Fused:
      return "fused";
    case ModeSelection::Both:
      return "both";
  }
  return "both";
}

std::vector<SolveMode> expand(ModeSelection modes) {
  switch (modes) {
    case ModeSelection::Toa:
      return {SolveMode::ToaOnly};
    case ModeSelection::Fused:
      return {SolveMode::Fused};
    case ModeSelection::Both:
      return {SolveMode::ToaOnly, SolveMode::Fused};
  }
  return {};
}

std::vector<int> initiating_stations(const Scene& scene, ModeSelection modes) {
  std::vector<int> ids;
  if (modes == ModeSelection::Fused) {
    ids.push_back(scene.reference().id);
    return ids;
  }
  for (const auto& s : scene.stations) {
    if (s.role != Role::Tag) ids.push_back(s.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

MeasurementSet toa_measurements(const std::vector<CorrectedMeasurement>& same_round,
                                const Scene& scene) {
  MeasurementSet set;
  set.mode = SolveMode::ToaOnly;
  set.reference_id = scene.reference().id;
  set.tag_height = scene.tag().position.z();
  for (const auto& m : same_round) {
    set.toa_ranges[m.reference_id] = m.t_toa * kSpeedOfLight;
    set.geometry[m.reference_id] = scene.station(m.reference_id).position;
  }
  return set;
}

MeasurementSet fused_measurements(const CorrectedMeasurement& m, const Scene& scene) {
  MeasurementSet set;
  set.mode = SolveMode::Fused;
  set.reference_id = m.reference_id;
  set.tag_height = scene.tag().position.z();
  set.toa_ranges[m.reference_id] = m.t_toa * kSpeedOfLight;
  set.geometry[m.reference_id] = scene.station(m.reference_id).position;
  for (const auto& [id, a] : m.anchors) {
    if (!a.t_tdoa) continue;
    set.tdoa_ranges[id] = *a.t_tdoa * kSpeedOfLight;
    set.geometry[id] = scene.station(id).position;
  }
  return set;
}

std::vector<RoundEstimate> solve_rounds(
    const std::map<int, std::vector<CorrectedMeasurement>>& corrected, const Scene& scene,
    ModeSelection modes, const SolverConfig& config) {
  const int reference = scene.reference().id;
  if (corrected.empty()) throw DataError("no corrected measurements to solve");
  const std::size_t n = corrected.begin()->second.size();
  for (const auto& [id, rows] : corrected) {
    if (rows.size() != n) throw DataError("corrected inputs cover different numbers of rounds");
  }
  for (SolveMode mode : expand(modes)) {
    if (mode == SolveMode::Fused && !corrected.count(reference)) {
      throw DataError("fused mode needs measurements initiated by the reference station");
    }
  }

  std::vector<RoundEstimate> out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t round = corrected.begin()->second[k].round_idx;
    for (const auto& [id, rows] : corrected) {
      if (rows[k].round_idx != round) throw DataError("corrected inputs are not aligned by round");
    }
    for (SolveMode mode : expand(modes)) {
      MeasurementSet set;
      if (mode == SolveMode::ToaOnly) {
        std::vector<CorrectedMeasurement> same_round;
        for (const auto& [id, rows] : corrected) same_round.push_back(rows[k]);
        set = toa_measurements(same_round, scene);
      } else {
        set = fused_measurements(corrected.at(reference)[k], scene);
      }
      try {
        out.push_back({round, mode, solve_position(set, config)});
      } catch (const GeometryError& e) {
        throw DegenerateGeometryError("round " + std::to_string(round) + " (" +
                                      std::string(to_string(mode)) + "): " + e.what());
      }
    }
  }
  return out;
}

const ModeStatistics& ExperimentReport::stats(SolveMode mode) const {
  for (const auto& s : modes) {
    if (s.mode == mode) return s;
  }
  throw StatisticsError("report has no statistics for mode " + std::string(to_string(mode)));
}

ExperimentReport summarize(const std::vector<RoundEstimate>& estimates, std::int64_t n_rounds,
                           const Eigen::Vector2d& ground_truth) {
  ExperimentReport report;
  report.n_rounds = n_rounds;
  report.ground_truth = ground_truth;

  std::map<SolveMode, std::vector<Point2>> points;
  std::map<SolveMode, int> excluded;
  for (const auto& e : estimates) {
    if (e.estimate.converged) {
      points[e.mode].push_back(e.estimate.position);
    } else {
      ++excluded[e.mode];
      points[e.mode];
    }
  }
  for (const auto& [mode, pts] : points) {
    ModeStatistics s;
    s.mode = mode;
    s.rounds_used = static_cast<int>(pts.size());
    s.rounds_excluded = excluded[mode];
    if (s.rounds_used + s.rounds_excluded != n_rounds) {
      throw StatisticsError("mode " + std::string(to_string(mode)) + " has " +
                            std::to_string(s.rounds_used + s.rounds_excluded) +
                            " estimates for " + std::to_string(n_rounds) + " rounds");
    }
    s.mean = mean(pts);
    if (pts.size() >= 2) {
      s.covariance = covariance(pts);
      s.stddev = s.covariance->diagonal().cwiseSqrt();
    }
    s.truth_deviation = s.mean - ground_truth;
    report.modes.push_back(s);
  }
  if (points.count(SolveMode::ToaOnly) && points.count(SolveMode::Fused)) {
    report.mode_mean_difference =
        compare_modes(points.at(SolveMode::ToaOnly), points.at(SolveMode::Fused));
  }
  return report;
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["n_rounds"] = report.n_rounds;
  j["seed"] = report.seed;
  j["ground_truth"] = vec_json(report.ground_truth);
  j["radio"] = {
      {"channel", report.radio.channel},
      {"center_frequency_hz", report.radio.center_frequency_hz},
      {"bandwidth_hz", report.radio.bandwidth_hz},
      {"prf_hz", report.radio.prf_hz},
      {"preamble_length", report.radio.preamble_length},
      {"data_rate_bps", report.radio.data_rate_bps},
  };
  nlohmann::ordered_json modes = nlohmann::ordered_json::object();
  for (const auto& s : report.modes) {
    nlohmann::ordered_json m;
    m["rounds_used"] = s.rounds_used;
    m["rounds_excluded"] = s.rounds_excluded;
    m["mean"] = vec_json(s.mean);
    m["stddev"] = s.stddev ? vec_json(*s.stddev) : nlohmann::ordered_json(nullptr);
    m["covariance"] = s.covariance ? mat_json(*s.covariance) : nlohmann::ordered_json(nullptr);
    m["truth_deviation"] = vec_json(s.truth_deviation);
    modes[std::string(to_string(s.mode))] = m;
  }
  j["modes"] = modes;
  j["mode_mean_difference"] = report.mode_mean_difference
                                  ? vec_json(*report.mode_mean_difference)
                                  : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  if (n_rounds < 1) throw ConfigError("n_rounds must be at least 1");
  scene.validate();
}

ExperimentRun run_pipeline(const ExperimentConfig& config) {
  in_stage("config", [&] { config.validate(); });
  const Scene& scene = config.scene;
  const SceneCalibration calibration = SceneCalibration::from_scene(scene);

  ExperimentRun run;
  for (int id : initiating_stations(scene, config.modes)) {
    const Scene initiated = scene.with_reference(id);
    auto records = in_stage("simulate", [&] {
      return simulate_session(initiated, config.n_rounds,
                              derive_seed(config.seed, static_cast<std::uint64_t>(id)));
    });
    auto corrected = in_stage("correct", [&] {
      std::vector<CorrectedMeasurement> rows;
      rows.reserve(records.size());
      for (const auto& r : records) rows.push_back(correct_record(r, calibration));
      return rows;
    });
    run.records.emplace(id, std::move(records));
    run.corrected.emplace(id, std::move(corrected));
  }
  run.estimates =
      in_stage("solve", [&] { return solve_rounds(run.corrected, scene, config.modes, config.solver); });
  run.report = in_stage("report", [&] {
    return summarize(run.estimates, config.n_rounds, scene.tag().position.head<2>());
  });
  run.report.seed = config.seed;
  run.report.radio = scene.radio;
  return run;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentRun run = run_pipeline(config);
  const auto& dir = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());

  for (const auto& [id, records] : run.records) {
    write_file(dir / ("records_ref" + std::to_string(id) + ".csv"),
               [&](std::ostream& out) { write_records_csv(out, records); });
  }
  for (const auto& [id, rows] : run.corrected) {
    write_file(dir / ("corrected_ref" + std::to_string(id) + ".csv"),
               [&](std::ostream& out) { write_corrected_csv(out, rows, config.diagnostics); });
  }
  write_file(dir / "estimates.csv",
             [&](std::ostream& out) { write_estimates_csv(out, run.estimates); });
  write_file(dir / "report.json",
             [&](std::ostream& out) { out << report_to_json(run.report); });
  return run.report;
}

}  // namespace uwbfuse
