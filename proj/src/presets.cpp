#include "uwbfuse/presets.hpp"

namespace uwbfuse::presets {
namespace {

struct StationTemplate {
  int id;
  Role role;
  double x;
  double y;
  double hardware_delay;  // s
  double clock_offset;    // s
  double drift;           // frequency offset
  double receive_jitter;  // s
};

constexpr StationTemplate kStations[] = {
    {1, Role::Reference, 0.0, 0.0, 128.2e-9, 1.25e-3, 2.0e-6, 210e-12},
    {2, Role::Tag, 0.0, 1.5134, 129.7e-9, 3.71e-3, 8.0e-6, 100e-12},
    {3, Role::Anchor, 1.27, 1.643, 127.5e-9, 0.42e-3, -3.5e-6, 90e-12},
    {4, Role::Anchor, 1.1439, 0.0385, 130.1e-9, 2.06e-3, 4.5e-6, 90e-12},
};

// Ranges come out in the initiating station's timebase, so an initiator's
// own frequency error scales (tof + A + B). Only the tag drifts when
// `tag_drift_only` is set; its drift is removed exactly by the correction.
Scene build(const DeskOptions& o, bool tag_drift_only) {
  Scene scene;
  for (const auto& t : kStations) {
    Station s;
    s.id = t.id;
    s.role = t.role;
    s.position = Eigen::Vector3d(t.x, t.y, 0.0);
    s.hardware_delay = o.hardware_delays ? t.hardware_delay : 0.0;
    s.clock.offset = o.clock_drift ? t.clock_offset : 0.0;
    const bool drifts = o.clock_drift && (!tag_drift_only || t.role == Role::Tag);
    s.clock.frequency_offset = drifts ? t.drift : 0.0;
    s.clock.tick = o.tick;
    s.power_curve = o.power_curve ? PowerCurve::synthetic_default() : PowerCurve::flat_zero();
    scene.stations.push_back(std::move(s));
  }
  scene.noise = o.noise;
  return scene;
}

}  // namespace

Scene desk_scene(const DeskOptions& options) { return build(options, false); }

Scene desk_ideal() { return build(DeskOptions{}, false); }

Scene desk_zero_noise() {
  DeskOptions o;
  o.clock_drift = true;
  o.hardware_delays = true;
  o.power_curve = true;
  o.tick = 0.0;
  return build(o, true);
}

Scene desk_paper_like() {
  DeskOptions o;
  o.clock_drift = true;
  o.hardware_delays = true;
  o.power_curve = true;
  o.tick = kDefaultTick;
  // Tuned by Monte Carlo over 1000 rounds: TOA-only spread ~(0.017, 0.023) m.
  // The noisier reference station widens the fused x spread.
  o.noise.timestamp_jitter_sigma = 90e-12;
  o.noise.power_jitter_sigma = 0.5;
  for (const auto& t : kStations) o.noise.station_timestamp_jitter[t.id] = t.receive_jitter;
  return build(o, false);
}

}  // namespace uwbfuse::presets
