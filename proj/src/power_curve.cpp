#include "uwbfuse/power_curve.hpp"

#include <algorithm>
#include <string>

#include "uwbfuse/errors.hpp"

namespace uwbfuse {
namespace {

void require_strictly_increasing_x(const std::vector<CurvePoint>& pts, const char* table) {
  if (pts.size() < 2) {
    throw ConfigError(std::string(table) + ": need at least two knots");
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].x > pts[i - 1].x)) {
      throw ConfigError(std::string(table) + ": knots must be strictly increasing in power");
    }
  }
}

// Piecewise-linear lookup on knots sorted by x.
double interpolate(const std::vector<CurvePoint>& pts, double x, const char* what) {
  if (!(x >= pts.front().x && x <= pts.back().x)) {
    throw DomainError(std::string(what) + ": " + std::to_string(x) + " dBm outside [" +
                          std::to_string(pts.front().x) + ", " + std::to_string(pts.back().x) +
                          "]",
                      x);
  }
  auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const CurvePoint& p, double v) { return p.x < v; });
  if (hi->x == x) return hi->y;
  auto lo = hi - 1;
  const double t = (x - lo->x) / (hi->x - lo->x);
  return lo->y + t * (hi->y - lo->y);
}

std::vector<CurvePoint> swapped(const std::vector<CurvePoint>& pts) {
  std::vector<CurvePoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p.y, p.x});
  return out;
}

}  // namespace

PowerCurve::PowerCurve(std::vector<CurvePoint> error_curve, std::vector<CurvePoint> power_map)
    : error_curve_(std::move(error_curve)), power_map_(std::move(power_map)) {
  require_strictly_increasing_x(error_curve_, "error_curve");
  for (std::size_t i = 1; i < error_curve_.size(); ++i) {
    if (error_curve_[i].y > error_curve_[i - 1].y) {
      throw ConfigError("error_curve: timestamp error must not increase with power");
    }
  }
  require_strictly_increasing_x(power_map_, "power_map");
  for (std::size_t i = 1; i < power_map_.size(); ++i) {
    if (!(power_map_[i].y > power_map_[i - 1].y)) {
      throw ConfigError("power_map: actual power must be strictly increasing");
    }
  }
}

PowerCurve PowerCurve::flat_zero() {
  return PowerCurve({{-200.0, 0.0}, {100.0, 0.0}}, {{-200.0, -200.0}, {100.0, 100.0}});
}

PowerCurve PowerCurve::synthetic_default() {
  // Smooth S-shaped error curve crossing zero at -75 dBm.
  std::vector<CurvePoint> error_curve{
      {-95.0, 0.50e-9},  {-90.0, 0.42e-9},  {-85.0, 0.30e-9},
      {-80.0, 0.16e-9},  {-75.0, 0.0},      {-70.0, -0.15e-9},
      {-65.0, -0.29e-9}, {-60.0, -0.41e-9}, {-55.0, -0.50e-9},
  };
  // Reported power saturates relative to the actual power at high levels.
  std::vector<CurvePoint> power_map{
      {-105.0, -105.0}, {-95.0, -95.0}, {-90.0, -89.6}, {-85.0, -84.0}, {-80.0, -78.0},
      {-75.0, -71.5},   {-70.0, -64.5}, {-65.0, -57.0}, {-63.0, -54.0},
  };
  return PowerCurve(std::move(error_curve), std::move(power_map));
}

double PowerCurve::power_error(double actual_dbm) const {
  return interpolate(error_curve_, actual_dbm, "power_error");
}

double PowerCurve::measured_to_actual_power(double measured_dbm) const {
  return interpolate(power_map_, measured_dbm, "measured_to_actual_power");
}

double PowerCurve::actual_to_measured_power(double actual_dbm) const {
  // power_map is strictly increasing in both coordinates, so the swapped table is valid.
  return interpolate(swapped(power_map_), actual_dbm, "actual_to_measured_power");
}

std::pair<double, double> PowerCurve::error_domain() const {
  return {error_curve_.front().x, error_curve_.back().x};
}

}  // namespace uwbfuse
