#pragma once

#include <Eigen/Core>

#include <vector>

namespace uwbfuse {

using Point2 = Eigen::Vector2d;

/// Arithmetic mean. Throws StatisticsError on empty input.
Eigen::Vector2d mean(const std::vector<Point2>& points);

/// Sample covariance with n - 1 normalization. Needs at least two points.
Eigen::Matrix2d covariance(const std::vector<Point2>& points);

/// Per-axis standard deviation: square roots of the covariance diagonal.
Eigen::Vector2d precision_stddev(const std::vector<Point2>& points);

/// Per-axis |mean(a) - mean(b)|.
Eigen::Vector2d compare_modes(const std::vector<Point2>& toa_points,
                              const std::vector<Point2>& fused_points);

}  // namespace uwbfuse
