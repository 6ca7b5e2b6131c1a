#pragma once

#include "uwbfuse/scene.hpp"

namespace uwbfuse::presets {

/// Four-station desk constellation (positions in metres, z = 0). Station 1
/// is the reference, station 2 the tag, stations 3 and 4 passive anchors.
inline constexpr int kReferenceId = 1;
inline constexpr int kTagId = 2;

struct DeskOptions {
  bool clock_drift = false;
  bool hardware_delays = false;
  bool power_curve = false;
  double tick = 0.0;
  NoiseSpec noise;
};

Scene desk_scene(const DeskOptions& options);

/// Every error source off: ideal clocks, no delays, flat curve, no jitter,
/// continuous timebase.
Scene desk_ideal();

/// Deterministic biases on (tag clock drift, clock offsets, hardware delays,
/// synthetic power curve) with no noise and a continuous timebase.
Scene desk_zero_noise();

/// Drift on every clock, hardware delays, synthetic power curve, the default
/// tick, and per-station receive jitter tuned so that the TOA-only per-axis
/// spread is a couple of centimetres.
Scene desk_paper_like();

}  // namespace uwbfuse::presets
