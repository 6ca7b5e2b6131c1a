#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uwbfuse/errors.hpp"

namespace uwbfuse {

enum class SolveMode { ToaOnly, Fused };

std::string_view to_string(SolveMode mode);
SolveMode solve_mode_from_string(std::string_view name);

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using JacobianX2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

/// Ranges (TOA rows) and range differences to the reference (TDOA rows) for
/// a single 2D fix. Rows are ordered: TOA by station id, then TDOA by anchor id.
template <typename Scalar>
struct MeasurementSetT {
  SolveMode mode = SolveMode::ToaOnly;
  int reference_id = 0;                      // station the TDOA rows are relative to
  std::map<int, Scalar> toa_ranges;          // station id -> T_TOA * c0
  std::map<int, Scalar> tdoa_ranges;         // anchor id  -> T_TDOA * c0
  std::map<int, Vector3<Scalar>> geometry;   // station positions
  Scalar tag_height = Scalar(0);             // z of the tag, held fixed

  Eigen::Index rows() const {
    return static_cast<Eigen::Index>(toa_ranges.size() + tdoa_ranges.size());
  }

  /// ConfigError for stations missing from the geometry, DegenerateGeometryError
  /// when there are too few rows for a 2D fix.
  void validate() const {
    auto require = [this](int id) {
      if (!geometry.count(id)) {
        throw ConfigError("measurement references unknown station " + std::to_string(id));
      }
    };
    for (const auto& [id, r] : toa_ranges) require(id);
    for (const auto& [id, r] : tdoa_ranges) require(id);
    if (mode == SolveMode::ToaOnly) {
      if (!tdoa_ranges.empty()) throw ConfigError("TOA-only set carries TDOA rows");
      if (toa_ranges.size() < 3) {
        throw DegenerateGeometryError("TOA-only 2D fix needs at least 3 ranges, got " +
                                      std::to_string(toa_ranges.size()));
      }
    } else {
      require(reference_id);
      if (toa_ranges.empty() || tdoa_ranges.size() < 2) {
        throw DegenerateGeometryError(
            "fused 2D fix needs at least 1 TOA and 2 TDOA rows, got " +
            std::to_string(toa_ranges.size()) + " + " + std::to_string(tdoa_ranges.size()));
      }
    }
  }
};

using MeasurementSet = MeasurementSetT<double>;

struct SolverConfig {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;  // m, on the infinity norm of J^T r
  double step_tolerance = 1e-12;      // m
  double initial_damping = 1e-3;
  std::vector<double> row_weights;    // empty = all ones

  void validate(Eigen::Index rows) const {
    if (max_iterations <= 0 || !(gradient_tolerance > 0.0) || !(step_tolerance > 0.0) ||
        !(initial_damping > 0.0)) {
      throw ConfigError("solver settings must be positive");
    }
    if (!row_weights.empty()) {
      if (static_cast<Eigen::Index>(row_weights.size()) != rows) {
        throw ConfigError("row_weights needs one entry per measurement row");
      }
      for (double w : row_weights) {
        if (!(w > 0.0)) throw ConfigError("row weights must be positive");
      }
    }
  }
};

template <typename Scalar>
struct PositionEstimateT {
  Vector2<Scalar> position = Vector2<Scalar>::Zero();
  Scalar residual_norm = Scalar(0);
  int iterations = 0;
  bool converged = false;
  Matrix2<Scalar> covariance = Matrix2<Scalar>::Zero();
  std::vector<Scalar> cost_history;  // squared residual norm, initial + after each accepted step
};

using PositionEstimate = PositionEstimateT<double>;

namespace detail {

template <typename Scalar>
Vector3<Scalar> lift(const MeasurementSetT<Scalar>& set, const Vector2<Scalar>& candidate) {
  return Vector3<Scalar>(candidate.x(), candidate.y(), set.tag_height);
}

// Offset from station to candidate; throws when they coincide.
template <typename Scalar>
Vector3<Scalar> offset_from(const MeasurementSetT<Scalar>& set, int id,
                            const Vector2<Scalar>& candidate) {
  const Vector3<Scalar> d = lift(set, candidate) - set.geometry.at(id);
  if (d.squaredNorm() == Scalar(0)) {
    throw SingularGeometryError(
        "candidate coincides with station " + std::to_string(id) + "; range gradient undefined",
        id);
  }
  return d;
}

template <typename Scalar>
VectorX<Scalar> measured_values(const MeasurementSetT<Scalar>& set) {
  VectorX<Scalar> m(set.rows());
  Eigen::Index row = 0;
  for (const auto& entry : set.toa_ranges) m(row++) = entry.second;
  for (const auto& entry : set.tdoa_ranges) m(row++) = entry.second;
  return m;
}

// Throws SingularGeometryError if the candidate sits on a station used by a row.
template <typename Scalar>
void require_regular(const MeasurementSetT<Scalar>& set, const Vector2<Scalar>& candidate) {
  for (const auto& entry : set.toa_ranges) offset_from(set, entry.first, candidate);
  for (const auto& entry : set.tdoa_ranges) offset_from(set, entry.first, candidate);
}

}  // namespace detail

/// Measured minus modelled range (m), one entry per row. Defined everywhere,
/// including on a station, where that station's model term is zero.
template <typename Scalar>
VectorX<Scalar> residuals(const MeasurementSetT<Scalar>& set, const Vector2<Scalar>& candidate) {
  const Vector3<Scalar> c = detail::lift(set, candidate);
  VectorX<Scalar> r(set.rows());
  Eigen::Index row = 0;
  for (const auto& [id, range] : set.toa_ranges) {
    r(row++) = range - (c - set.geometry.at(id)).norm();
  }
  for (const auto& [id, range_diff] : set.tdoa_ranges) {
    const Scalar baseline = (set.geometry.at(set.reference_id) - set.geometry.at(id)).norm();
    r(row++) = range_diff - ((c - set.geometry.at(id)).norm() - baseline);
  }
  return r;
}

/// Analytic derivative of residuals() with respect to the candidate (x, y).
/// Throws SingularGeometryError on a station, where the range is not differentiable.
template <typename Scalar>
JacobianX2<Scalar> jacobian(const MeasurementSetT<Scalar>& set,
                            const Vector2<Scalar>& candidate) {
  JacobianX2<Scalar> J(set.rows(), 2);
  Eigen::Index row = 0;
  auto unit_row = [&](int id) {
    const Vector3<Scalar> d = detail::offset_from(set, id, candidate);
    J.row(row++) = -(d.template head<2>() / d.norm()).transpose();
  };
  for (const auto& entry : set.toa_ranges) unit_row(entry.first);
  // The reference-to-anchor baseline is constant in the candidate.
  for (const auto& entry : set.tdoa_ranges) unit_row(entry.first);
  return J;
}

/// Centroid of the station positions, projected to the plane.
template <typename Scalar>
Vector2<Scalar> initial_guess(const std::map<int, Vector3<Scalar>>& geometry) {
  if (geometry.empty()) throw ConfigError("initial_guess needs at least one station");
  Vector2<Scalar> sum = Vector2<Scalar>::Zero();
  for (const auto& [id, p] : geometry) sum += p.template head<2>();
  return sum / static_cast<Scalar>(geometry.size());
}

/// Levenberg-Marquardt minimization of the squared residual norm.
///
/// Returns with converged == false when max_iterations runs out. Throws
/// DegenerateGeometryError when the normal matrix at the solution is
/// rank deficient or the set has too few rows.
template <typename Scalar>
PositionEstimateT<Scalar> solve_position(const MeasurementSetT<Scalar>& set,
                                         const SolverConfig& config = {},
                                         std::optional<Vector2<Scalar>> initial = std::nullopt) {
  set.validate();
  config.validate(set.rows());

  VectorX<Scalar> sqrt_w = VectorX<Scalar>::Ones(set.rows());
  for (std::size_t i = 0; i < config.row_weights.size(); ++i) {
    sqrt_w(static_cast<Eigen::Index>(i)) = std::sqrt(static_cast<Scalar>(config.row_weights[i]));
  }
  auto weighted_residuals = [&](const Vector2<Scalar>& c) -> VectorX<Scalar> {
    return sqrt_w.cwiseProduct(residuals(set, c));
  };
  auto weighted_jacobian = [&](const Vector2<Scalar>& c) -> JacobianX2<Scalar> {
    return sqrt_w.asDiagonal() * jacobian(set, c);
  };

  const Scalar gtol = static_cast<Scalar>(config.gradient_tolerance);
  const Scalar stol = static_cast<Scalar>(config.step_tolerance);
  constexpr Scalar kMaxDamping = Scalar(1e16);
  constexpr Scalar kMinDamping = Scalar(1e-15);

  // Rounding error of a cost evaluation: every residual is a difference of
  // quantities of the size of the ranges themselves.
  const VectorX<Scalar> range_scale =
      sqrt_w.cwiseProduct(detail::measured_values(set).cwiseAbs()).array() + Scalar(1);
  auto cost_noise = [&](const VectorX<Scalar>& res) {
    return Scalar(8) * std::numeric_limits<Scalar>::epsilon() *
           res.cwiseAbs().dot(range_scale);
  };

  PositionEstimateT<Scalar> est;
  Vector2<Scalar> x = initial ? *initial : initial_guess(set.geometry);
  VectorX<Scalar> r = weighted_residuals(x);
  Scalar cost = r.squaredNorm();
  Scalar lambda = static_cast<Scalar>(config.initial_damping);
  est.cost_history.push_back(cost);

  JacobianX2<Scalar> J = weighted_jacobian(x);
  Vector2<Scalar> g = J.transpose() * r;
  bool converged = g.template lpNorm<Eigen::Infinity>() <= gtol;

  while (!converged && est.iterations < config.max_iterations) {
    const Matrix2<Scalar> H = J.transpose() * J;
    const Vector2<Scalar> scale =
        H.diagonal().cwiseMax(std::numeric_limits<Scalar>::epsilon() * H.diagonal().maxCoeff());

    bool accepted = false;
    Vector2<Scalar> step = Vector2<Scalar>::Zero();
    while (!accepted && lambda < kMaxDamping) {
      Matrix2<Scalar> A = H;
      A.diagonal() += lambda * scale;
      step = A.ldlt().solve(-g);
      const Vector2<Scalar> trial = x + step;
      Scalar trial_cost = std::numeric_limits<Scalar>::infinity();
      VectorX<Scalar> trial_r;
      try {
        detail::require_regular(set, trial);
        trial_r = weighted_residuals(trial);
        trial_cost = trial_r.squaredNorm();
      } catch (const SingularGeometryError&) {
      }
      // Near the optimum the decrease drops below the resolution of the cost;
      // steps within that rounding band are accepted.
      if (trial_cost <= cost + cost_noise(r)) {
        x = trial;
        r = std::move(trial_r);
        cost = trial_cost;
        lambda = std::max(lambda / Scalar(10), kMinDamping);
        accepted = true;
      } else {
        lambda *= Scalar(10);
      }
    }
    if (!accepted) break;  // no descent direction left at working precision

    ++est.iterations;
    est.cost_history.push_back(cost);
    J = weighted_jacobian(x);
    g = J.transpose() * r;
    converged = g.template lpNorm<Eigen::Infinity>() <= gtol;
    if (step.norm() <= stol) break;
  }
  if (!converged) {
    converged = g.template lpNorm<Eigen::Infinity>() <= gtol;
  }

  const Matrix2<Scalar> H = J.transpose() * J;
  Eigen::SelfAdjointEigenSolver<Matrix2<Scalar>> eig(H);
  const Scalar lo = eig.eigenvalues()(0);
  const Scalar hi = eig.eigenvalues()(1);
  if (!(hi > Scalar(0)) || lo <= Scalar(1e-12) * hi) {
    throw DegenerateGeometryError("normal matrix is rank deficient at the solution");
  }

  const Scalar dof = std::max<Scalar>(Scalar(1), static_cast<Scalar>(set.rows() - 2));
  const Matrix2<Scalar> cov = (cost / dof) * H.inverse();

  est.position = x;
  est.residual_norm = std::sqrt(cost);
  est.converged = converged;
  est.covariance = Scalar(0.5) * (cov + cov.transpose());
  return est;
}

template <typename Scalar>
PositionEstimateT<Scalar> solve_position(const MeasurementSetT<Scalar>& set,
                                         const SolverConfig& config,
                                         const Vector2<Scalar>& initial) {
  return solve_position(set, config, std::optional<Vector2<Scalar>>(initial));
}

/// Exhaustive grid minimizer of the squared residual norm. Test oracle.
template <typename Scalar>
Vector2<Scalar> brute_force_solve(const MeasurementSetT<Scalar>& set,
                                  const Eigen::AlignedBox<Scalar, 2>& bounds, Scalar grid_step) {
  if (!(grid_step > Scalar(0))) throw ConfigError("grid_step must be positive");
  const Vector2<Scalar> lo = bounds.min();
  const Vector2<Scalar> extent = bounds.sizes();
  const auto nx = static_cast<long>(std::floor(extent.x() / grid_step));
  const auto ny = static_cast<long>(std::floor(extent.y() / grid_step));

  Vector2<Scalar> best = lo;
  Scalar best_cost = std::numeric_limits<Scalar>::infinity();
  for (long i = 0; i <= nx; ++i) {
    for (long j = 0; j <= ny; ++j) {
      const Vector2<Scalar> c = lo + Vector2<Scalar>(Scalar(i) * grid_step, Scalar(j) * grid_step);
      const Scalar cost = residuals(set, c).squaredNorm();
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
  }
  return best;
}

}  // namespace uwbfuse
