#pragma once

#include <utility>
#include <vector>

namespace uwbfuse {

/// Knot of a piecewise-linear curve.
struct CurvePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Per-device signal-power calibration.
///
/// Two piecewise-linear tables:
///  - error curve: actual received power (dBm) -> timestamp error (s).
///    Stronger signals are timestamped earlier, so the error is
///    non-increasing in power.
///  - power map: measured power (dBm) -> actual power (dBm), strictly
///    increasing so that it can be inverted.
///
/// Receive timestamps include the error (T_rx = ideal + E); corrections
/// subtract it.
class PowerCurve {
 public:
  /// Throws ConfigError if either table violates its ordering invariants.
  PowerCurve(std::vector<CurvePoint> error_curve, std::vector<CurvePoint> power_map);

  /// Zero error everywhere and an identity power map over a wide domain.
  static PowerCurve flat_zero();

  /// Synthetic curve spanning -95..-55 dBm with errors in [-0.5 ns, +0.5 ns].
  /// Not a measured calibration.
  static PowerCurve synthetic_default();

  /// Timestamp error at the given actual power. Throws DomainError outside the curve.
  double power_error(double actual_dbm) const;
  double measured_to_actual_power(double measured_dbm) const;
  double actual_to_measured_power(double actual_dbm) const;

  /// Convenience chain used by the corrections: measured -> actual -> error.
  double error_from_measured(double measured_dbm) const {
    return power_error(measured_to_actual_power(measured_dbm));
  }

  const std::vector<CurvePoint>& error_curve() const noexcept { return error_curve_; }
  const std::vector<CurvePoint>& power_map() const noexcept { return power_map_; }

  std::pair<double, double> error_domain() const;

  friend bool operator==(const PowerCurve&, const PowerCurve&) = default;

 private:
  std::vector<CurvePoint> error_curve_;
  std::vector<CurvePoint> power_map_;
};

}  // namespace uwbfuse
