#pragma once

#include <filesystem>
#include <string>

#include "uwbfuse/experiment.hpp"
#include "uwbfuse/power_curve.hpp"
#include "uwbfuse/scene.hpp"

namespace uwbfuse {

// File schemas (JSON):
//
// Power curve:
//   { "error_curve": [[actual_dbm, error_s], ...],
//     "power_map":   [[measured_dbm, actual_dbm], ...] }
//
// Scene:
//   { "round_interval": s, "tag_response_delay": s, "round_spacing": s,
//     "tx_power_dbm": dBm,
//     "radio": { "channel", "center_frequency_hz", "bandwidth_hz", "prf_hz",
//                "preamble_length", "data_rate_bps" },
//     "noise": { "timestamp_jitter_sigma": s, "power_jitter_sigma": dB,
//                "frequency_jitter_sigma": ratio, "seed": u64 },
//     "curves": { "<name>": "<path relative to the scene file>" },
//     "stations": [ { "id", "role": "reference"|"tag"|"anchor",
//                     "position": [x, y, z], "hardware_delay": s,
//                     "clock": { "offset": s, "frequency_offset": ratio, "tick": s },
//                     "power_curve": "<name>" | "flat" | "synthetic",
//                     "timestamp_jitter": s } ] }
//   Every key except "stations" is optional and defaults to the built-in value.
//   A station's "timestamp_jitter" overrides noise.timestamp_jitter_sigma.
//
// Experiment config:
//   { "scene": "<path relative to the config file>", "rounds": n,
//     "mode": "toa"|"fused"|"both", "seed": u64, "out": "<dir>",
//     "diagnostics": bool,
//     "solver": { "max_iterations", "gradient_tolerance", "step_tolerance",
//                 "initial_damping", "row_weights": [..] } }

PowerCurve parse_power_curve(const std::string& text);
PowerCurve load_power_curve(const std::filesystem::path& path);
std::string power_curve_to_json(const PowerCurve& curve);

/// `base_dir` resolves relative curve paths.
Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir);
Scene load_scene(const std::filesystem::path& path);

/// The scene file path is resolved against the config file's directory; a
/// relative "out" is kept relative to the working directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace uwbfuse
