#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uwbfuse/corrections.hpp"
#include "uwbfuse/exchange_record.hpp"
#include "uwbfuse/scene.hpp"
#include "uwbfuse/solver.hpp"

namespace uwbfuse {

enum class ModeSelection { Toa, Fused, Both };

ModeSelection mode_selection_from_string(std::string_view name);
std::string_view to_string(ModeSelection modes);
std::vector<SolveMode> expand(ModeSelection modes);

/// Stations that initiate a ranging round for the requested modes: every
/// non-tag station for TOA-only (the initiator rotates), the scene reference
/// for fused.
std::vector<int> initiating_stations(const Scene& scene, ModeSelection modes);

struct RoundEstimate {
  std::int64_t round_idx = 0;
  SolveMode mode = SolveMode::ToaOnly;
  PositionEstimate estimate;
};

/// TOA-only set: one range per initiating station, taken from corrected
/// measurements of the same round.
MeasurementSet toa_measurements(const std::vector<CorrectedMeasurement>& same_round,
                                const Scene& scene);

/// Fused set: the TOA to the reference plus every successful anchor TDOA.
MeasurementSet fused_measurements(const CorrectedMeasurement& measurement, const Scene& scene);

/// Solves every round for every requested mode. `corrected` is keyed by
/// initiating station id; all vectors are aligned by round.
std::vector<RoundEstimate> solve_rounds(
    const std::map<int, std::vector<CorrectedMeasurement>>& corrected, const Scene& scene,
    ModeSelection modes, const SolverConfig& config);

struct ModeStatistics {
  SolveMode mode = SolveMode::ToaOnly;
  int rounds_used = 0;
  int rounds_excluded = 0;  // solver did not converge
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  std::optional<Eigen::Matrix2d> covariance;  // needs two used rounds
  std::optional<Eigen::Vector2d> stddev;
  Eigen::Vector2d truth_deviation = Eigen::Vector2d::Zero();  // mean - truth
};

struct ExperimentReport {
  std::int64_t n_rounds = 0;
  std::uint64_t seed = 0;
  Eigen::Vector2d ground_truth = Eigen::Vector2d::Zero();
  RadioProfile radio;
  std::vector<ModeStatistics> modes;
  std::optional<Eigen::Vector2d> mode_mean_difference;  // |mean(toa) - mean(fused)|

  const ModeStatistics& stats(SolveMode mode) const;
};

ExperimentReport summarize(const std::vector<RoundEstimate>& estimates, std::int64_t n_rounds,
                           const Eigen::Vector2d& ground_truth);

std::string report_to_json(const ExperimentReport& report);

struct ExperimentConfig {
  Scene scene;
  int n_rounds = 1000;
  ModeSelection modes = ModeSelection::Both;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  SolverConfig solver;
  bool diagnostics = true;

  void validate() const;
};

struct ExperimentRun {
  std::map<int, std::vector<ExchangeRecord>> records;        // by initiating station
  std::map<int, std::vector<CorrectedMeasurement>> corrected;
  std::vector<RoundEstimate> estimates;
  ExperimentReport report;
};

/// simulate -> correct -> solve -> aggregate, in memory. Errors are rethrown
/// with the failing stage in the message and their original type.
ExperimentRun run_pipeline(const ExperimentConfig& config);

/// run_pipeline plus the output tree under config.output_dir:
/// records_ref<id>.csv, corrected_ref<id>.csv, estimates.csv, report.json.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace uwbfuse
