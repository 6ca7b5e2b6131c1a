#pragma once

#include <Eigen/Core>

#include <string_view>

#include "uwbfuse/power_curve.hpp"

namespace uwbfuse {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Channel 2 radio profile of the transceivers the toolkit models.
struct RadioProfile {
  int channel = 2;
  double center_frequency_hz = 3993.6e6;
  double bandwidth_hz = 499.2e6;
  double prf_hz = 64e6;
  int preamble_length = 128;
  double data_rate_bps = 6.81e6;
};

/// Timestamp resolution of a 64x oversampled timebase at 128 * 499.2 MHz.
inline constexpr double kDefaultTick = 1.0 / (128.0 * 499.2e6);

inline constexpr double kMaxFrequencyOffset = 100e-6;
inline constexpr double kMaxHardwareDelay = 1e-6;

enum class Role { Reference, Tag, Anchor };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

/// Affine station clock: local = offset + (1 + frequency_offset) * true_time,
/// quantized to multiples of tick. A tick of zero disables quantization.
struct ClockModel {
  double offset = 0.0;
  double frequency_offset = 0.0;
  double tick = kDefaultTick;

  void validate() const;
};

/// Rounds to the nearest multiple of tick; identity when tick == 0.
double quantize(double value, double tick);

/// Local timestamp of a true instant, quantized to the clock's tick.
double clock_project(const ClockModel& clock, double true_time);

/// Unquantized inverse of clock_project: the true instant a local reading refers to.
double clock_true_time(const ClockModel& clock, double local_time);

/// Free-space received power in dBm.
double rx_power(double tx_power_dbm, double distance_m, double frequency_hz);

struct Station {
  int id = 0;
  Role role = Role::Anchor;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  /// One-way antenna/circuit delay, applied once on transmit and once on receive.
  double hardware_delay = 0.0;
  ClockModel clock;
  PowerCurve power_curve = PowerCurve::flat_zero();

  void validate() const;
};

/// Time of flight between two points.
inline double true_tof(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return (a - b).norm() / kSpeedOfLight;
}

}  // namespace uwbfuse
