#include "uwbfuse/statistics.hpp"

#include "uwbfuse/errors.hpp"

namespace uwbfuse {

Eigen::Vector2d mean(const std::vector<Point2>& points) {
  if (points.empty()) throw StatisticsError("mean of an empty point set");
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

Eigen::Matrix2d covariance(const std::vector<Point2>& points) {
  if (points.size() < 2) throw StatisticsError("covariance needs at least two points");
  const Eigen::Vector2d mu = mean(points);
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector2d d = p - mu;
    acc.noalias() += d * d.transpose();
  }
  acc /= static_cast<double>(points.size() - 1);
  return 0.5 * (acc + acc.transpose());
}

Eigen::Vector2d precision_stddev(const std::vector<Point2>& points) {
  return covariance(points).diagonal().cwiseSqrt();
}

Eigen::Vector2d compare_modes(const std::vector<Point2>& toa_points,
                              const std::vector<Point2>& fused_points) {
  return (mean(toa_points) - mean(fused_points)).cwiseAbs();
}

}  // namespace uwbfuse
