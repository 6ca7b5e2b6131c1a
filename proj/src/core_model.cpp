#include "uwbfuse/core_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "uwbfuse/errors.hpp"

namespace uwbfuse {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Reference:
      return "reference";
    case Role::Tag:
      return "tag";
    case Role::Anchor:
      return "anchor";
  }
  return "anchor";
}

Role role_from_string(std::string_view name) {
  if (name == "reference") return Role::Reference;
  if (name == "tag") return Role::Tag;
  if (name == "anchor") return Role::Anchor;
  throw ConfigError("unknown station role '" + std::string(name) + "'");
}

void ClockModel::validate() const {
  if (!std::isfinite(offset)) throw ConfigError("clock offset must be finite");
  if (!(std::abs(frequency_offset) <= kMaxFrequencyOffset)) {
    throw ConfigError("clock frequency offset " + std::to_string(frequency_offset) +
                      " exceeds 100 ppm");
  }
  if (!(tick >= 0.0) || !std::isfinite(tick)) {
    throw ConfigError("clock tick must be non-negative");
  }
}

double quantize(double value, double tick) {
  if (tick == 0.0) return value;
  return std::round(value / tick) * tick;
}

double clock_project(const ClockModel& clock, double true_time) {
  return quantize(clock.offset + (1.0 + clock.frequency_offset) * true_time, clock.tick);
}

double clock_true_time(const ClockModel& clock, double local_time) {
  return (local_time - clock.offset) / (1.0 + clock.frequency_offset);
}

double rx_power(double tx_power_dbm, double distance_m, double frequency_hz) {
  if (!(distance_m > 0.0)) {
    throw DomainError("rx_power: distance must be positive, got " + std::to_string(distance_m),
                      distance_m);
  }
  const double path_loss =
      20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
  return tx_power_dbm - path_loss;
}

void Station::validate() const {
  if (!(hardware_delay >= 0.0 && hardware_delay < kMaxHardwareDelay)) {
    throw ConfigError("station " + std::to_string(id) + ": hardware delay must be in [0, 1 us)");
  }
  if (!position.allFinite()) {
    throw ConfigError("station " + std::to_string(id) + ": position must be finite");
  }
  clock.validate();
}

}  // namespace uwbfuse
