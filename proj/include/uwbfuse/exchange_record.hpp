#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace uwbfuse {

/// Timestamps one passive anchor took of the three messages of a round.
struct AnchorTimestamps {
  int id = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  std::optional<double> t3;
  double p1 = 0.0;  // measured power of message 1 (reference), dBm
  double p2 = 0.0;  // measured power of message 2 (tag), dBm

  double dt12() const { return t2 - t1; }

  friend bool operator==(const AnchorTimestamps&, const AnchorTimestamps&) = default;
};

/// Simulator ground truth. Only the tag position survives a CSV round trip.
struct ExchangeTruth {
  Eigen::Vector3d tag_position = Eigen::Vector3d::Zero();
  std::optional<double> tof_reference_tag;
  std::map<int, double> tdoa;  // tof(tag, anchor) - tof(reference, anchor)
};

/// Raw timestamps of one three-message round: reference sends at T1 and T3,
/// the tag answers at T2, anchors listen to all three. Every time is in the
/// local clock of the station that took it.
struct ExchangeRecord {
  std::int64_t round_idx = 0;
  int reference_id = 0;
  int tag_id = 0;

  double t1_r = 0.0;
  double t2_r = 0.0;
  double t3_r = 0.0;
  double p2_r = 0.0;

  double t1_t = 0.0;
  double t2_t = 0.0;
  double t3_t = 0.0;
  double p1_t = 0.0;
  double p3_t = 0.0;

  std::vector<AnchorTimestamps> anchors;
  std::optional<ExchangeTruth> truth;

  double dt12_r() const { return t2_r - t1_r; }
  double dt13_r() const { return t3_r - t1_r; }
  double dt12_t() const { return t2_t - t1_t; }
  double dt13_t() const { return t3_t - t1_t; }

  /// Throws MalformedRecordError if the anchor is not part of the record.
  const AnchorTimestamps& anchor(int id) const;
};

}  // namespace uwbfuse
