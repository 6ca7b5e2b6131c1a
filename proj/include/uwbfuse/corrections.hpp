#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "uwbfuse/exchange_record.hpp"
#include "uwbfuse/power_curve.hpp"
#include "uwbfuse/scene.hpp"

namespace uwbfuse {

/// Power curve of every station, keyed by station id.
using PowerCurveSet = std::map<int, PowerCurve>;

/// Known one-way hardware delays, keyed by station id.
struct DelayCalibration {
  std::map<int, double> delays;

  /// Throws ConfigError for unknown stations.
  double delay(int station_id) const;
  void validate() const;
};

struct SceneCalibration {
  PowerCurveSet curves;
  DelayCalibration delays;

  /// Calibration that matches the scene exactly (what a perfect calibration would give).
  static SceneCalibration from_scene(const Scene& scene);

  const PowerCurve& curve(int station_id) const;
};

struct AnchorCorrection {
  std::optional<double> t_tdoa;  // empty when the anchor failed
  double c13 = 0.0;              // anchor drift error over the 1 -> 3 window
  double e3 = 0.0;               // power error of message 1 at the anchor
  double e4 = 0.0;               // power error of message 2 at the anchor
  std::string error;             // reason when t_tdoa is empty
};

struct CorrectedMeasurement {
  std::int64_t round_idx = 0;
  int reference_id = 0;
  int tag_id = 0;

  double t_toa = 0.0;
  bool toa_negative = false;
  std::map<int, AnchorCorrection> anchors;

  double c13_rt = 0.0;  // reference-vs-tag drift error
  double e1 = 0.0;      // power error of message 1 at the tag
  double e2 = 0.0;      // power error of message 2 at the reference
  double k = 0.0;       // reference-to-tag emission offset

  std::optional<double> tdoa(int anchor_id) const;
};

/// Drift error between two measurements of the same transmit window:
/// `dt13_local - dt13_remote`, positive when the local clock runs fast.
double drift_error(double dt13_local, double dt13_remote);

/// Linear interpolation of a drift error measured over `dt13_tx` to an
/// elapsed interval `dt12_elapsed` inside that window.
double interpolate_drift(double c, double dt13_tx, double dt12_elapsed);

/// Two-message TWR with power and hardware-delay correction, no drift term.
double toa_two_message(const ExchangeRecord& record, const PowerCurveSet& curves,
                       const DelayCalibration& delays);

/// Three-message TWR: power, hardware-delay and clock-drift corrected time
/// of flight between reference and tag, in the reference timebase.
double toa_corrected(const ExchangeRecord& record, const PowerCurveSet& curves,
                     const DelayCalibration& delays);

/// Anchor interval between messages 1 and 2 with power correction only.
/// Still contains the reference-to-tag emission offset K.
double tdoa_with_offset(const AnchorTimestamps& anchor, const PowerCurveSet& curves);

/// Reference interval minus anchor interval over the 1 -> 3 window.
double anchor_drift_error(const ExchangeRecord& record, int anchor_id);

/// Emission offset between message 1 (reference) and message 2 (tag), in the
/// reference timebase, given a corrected time of flight.
double offset_k(const ExchangeRecord& record, const PowerCurveSet& curves,
                const DelayCalibration& delays, double t_toa);

/// Fully corrected time difference of arrival at an anchor:
/// tof(tag, anchor) - tof(reference, anchor). Independent of the anchor's
/// hardware delay and of the tag's response time.
double tdoa_corrected(const ExchangeRecord& record, int anchor_id, const PowerCurveSet& curves,
                      const DelayCalibration& delays);

/// TOA plus one TDOA per anchor. Anchor failures are recorded per anchor;
/// a failure on the reference/tag side throws.
CorrectedMeasurement correct_record(const ExchangeRecord& record,
                                    const SceneCalibration& calibration);

}  // namespace uwbfuse
