#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "uwbfuse/core_model.hpp"

namespace uwbfuse {

struct NoiseSpec {
  double timestamp_jitter_sigma = 0.0;  // s, white Gaussian on every receive timestamp
  double power_jitter_sigma = 0.0;      // dB, on every received power
  double frequency_jitter_sigma = 0.0;  // white per-round offset added to every clock's drift
  std::uint64_t seed = 0;
  /// Per-station receive jitter overriding timestamp_jitter_sigma.
  std::map<int, double> station_timestamp_jitter;

  double timestamp_jitter(int station_id) const {
    auto it = station_timestamp_jitter.find(station_id);
    return it == station_timestamp_jitter.end() ? timestamp_jitter_sigma : it->second;
  }

  void validate() const;
};

/// Geometry, clocks and radio settings of one reference, one tag and any
/// number of passive anchors.
struct Scene {
  std::vector<Station> stations;
  double round_interval = 1e-3;       // reference T1 -> T3 spacing, local clock
  double tag_response_delay = 3e-4;   // tag T1 -> T2 spacing, local clock
  double round_spacing = 5e-3;        // start-to-start spacing of consecutive rounds
  double tx_power_dbm = -20.0;
  RadioProfile radio;
  NoiseSpec noise;

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  const Station& station(int id) const;
  const Station& reference() const;
  const Station& tag() const;
  std::vector<int> anchor_ids() const;
  bool has_station(int id) const;

  /// Copy in which station `id` initiates the ranging and the previous
  /// reference becomes a passive anchor.
  Scene with_reference(int id) const;
};

}  // namespace uwbfuse
