#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>

#include "uwbfuse/errors.hpp"
#include "uwbfuse/presets.hpp"
#include "uwbfuse/solver.hpp"

using namespace uwbfuse;

namespace {

const std::map<int, Eigen::Vector3d> kDesk = {
    {1, {0.0, 0.0, 0.0}},
    {2, {0.0, 1.5134, 0.0}},
    {3, {1.27, 1.643, 0.0}},
    {4, {1.1439, 0.0385, 0.0}},
};

const Eigen::Vector2d kTruth(0.0, 1.5134);

double dist(const Eigen::Vector3d& a, const Eigen::Vector2d& p) {
  return (a - Eigen::Vector3d(p.x(), p.y(), 0.0)).norm();
}

MeasurementSet toa_set(const std::map<int, Eigen::Vector3d>& stations, const Eigen::Vector2d& tag) {
  MeasurementSet s;
  s.mode = SolveMode::ToaOnly;
  s.reference_id = stations.begin()->first;
  for (const auto& [id, p] : stations) {
    s.toa_ranges[id] = dist(p, tag);
    s.geometry[id] = p;
  }
  return s;
}

MeasurementSet fused_set(const std::map<int, Eigen::Vector3d>& stations, int reference,
                         const Eigen::Vector2d& tag) {
  MeasurementSet s;
  s.mode = SolveMode::Fused;
  s.reference_id = reference;
  for (const auto& [id, p] : stations) s.geometry[id] = p;
  const auto& ref = stations.at(reference);
  s.toa_ranges[reference] = dist(ref, tag);
  for (const auto& [id, p] : stations) {
    if (id == reference) continue;
    s.tdoa_ranges[id] = dist(p, tag) - (ref - p).norm();
  }
  return s;
}

// Fixed stations (1, 3, 4) around the tag.
std::map<int, Eigen::Vector3d> fixed_stations() {
  auto m = kDesk;
  m.erase(2);
  return m;
}

}  // namespace

TEST(Residuals, ExactAtTruth) {
  const auto s = toa_set(fixed_stations(), kTruth);
  EXPECT_LT(residuals(s, kTruth).cwiseAbs().maxCoeff(), 1e-15);
  const auto f = fused_set(fixed_stations(), 1, kTruth);
  EXPECT_LT(residuals(f, kTruth).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Residuals, ModelTermAtStation) {
  auto s = toa_set(fixed_stations(), kTruth);
  s.toa_ranges[1] = 1.0;
  const Eigen::Vector2d origin(0.0, 0.0);
  EXPECT_DOUBLE_EQ(residuals(s, origin)(0), 1.0);
  try {
    jacobian(s, origin);
    FAIL();
  } catch (const SingularGeometryError& e) {
    EXPECT_EQ(e.station_id(), 1);
  }
}

TEST(Residuals, FusedTagAtReference) {
  auto f = fused_set(fixed_stations(), 1, kTruth);
  f.toa_ranges[1] = 0.0;
  f.tdoa_ranges[3] = 0.25;
  f.tdoa_ranges[4] = -0.5;
  const auto r = residuals(f, Eigen::Vector2d(0.0, 0.0));
  EXPECT_EQ(r(0), 0.0);
  EXPECT_NEAR(r(1), 0.25, 1e-15);
  EXPECT_NEAR(r(2), -0.5, 1e-15);
}

TEST(Jacobian, DueEast) {
  MeasurementSet s;
  s.geometry[1] = Eigen::Vector3d(2.0, 3.0, 0.0);
  s.toa_ranges[1] = 1.0;
  const auto J = jacobian(s, Eigen::Vector2d(7.0, 3.0));
  EXPECT_NEAR(J(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(J(0, 1), 0.0, 1e-15);
}

TEST(Jacobian, FiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 4.0);
  const double h = 1e-7;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d c(u(rng), u(rng));
    auto f = fused_set(kDesk, 1, Eigen::Vector2d(u(rng), u(rng)));
    f.toa_ranges[3] = 2.0;
    const auto J = jacobian(f, c);
    Eigen::MatrixX2d fd(f.rows(), 2);
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(k) = h;
      fd.col(k) = (residuals(f, Eigen::Vector2d(c + e)) - residuals(f, Eigen::Vector2d(c - e))) / (2 * h);
    }
    const double rel = (J - fd).cwiseAbs().maxCoeff() / J.cwiseAbs().maxCoeff();
    EXPECT_LT(rel, 1e-6);
  }
}

TEST(Jacobian, TdoaRowIgnoresReferencePosition) {
  auto f = fused_set(kDesk, 1, kTruth);
  const Eigen::Vector2d c(0.4, 0.9);
  const auto J = jacobian(f, c);
  const auto r = residuals(f, c);
  f.geometry[1] += Eigen::Vector3d(0.3, -0.2, 0.0);
  const auto J2 = jacobian(f, c);
  const auto r2 = residuals(f, c);
  const Eigen::Index row = f.rows() - 1;
  EXPECT_EQ(J.row(row), J2.row(row));
  EXPECT_NE(r(row), r2(row));
}

TEST(InitialGuess, Centroids) {
  const auto c = initial_guess(kDesk);
  EXPECT_NEAR(c.x(), (0 + 0 + 1.27 + 1.1439) / 4, 1e-15);
  EXPECT_NEAR(c.y(), (0 + 1.5134 + 1.643 + 0.0385) / 4, 1e-15);
  EXPECT_NEAR(c.x(), 0.603475, 1e-12);
  EXPECT_NEAR(c.y(), 0.798725, 1e-12);

  std::map<int, Eigen::Vector3d> one{{5, {2.0, -1.0, 3.0}}};
  EXPECT_EQ(initial_guess(one), Eigen::Vector2d(2.0, -1.0));

  std::map<int, Eigen::Vector3d> square{
      {1, {0, 0, 0}}, {2, {2, 0, 0}}, {3, {2, 2, 0}}, {4, {0, 2, 0}}};
  EXPECT_EQ(initial_guess(square), Eigen::Vector2d(1.0, 1.0));
  EXPECT_THROW(initial_guess(std::map<int, Eigen::Vector3d>{}), ConfigError);
}

TEST(SolvePosition, ExactRecovery) {
  const auto t = solve_position(toa_set(fixed_stations(), kTruth));
  EXPECT_TRUE(t.converged);
  EXPECT_LT((t.position - kTruth).norm(), 1e-9);
  const auto f = solve_position(fused_set(fixed_stations(), 1, kTruth));
  EXPECT_TRUE(f.converged);
  EXPECT_LT((f.position - kTruth).norm(), 1e-9);
}

TEST(SolvePosition, MirrorSolutionFollowsInitializer) {
  std::map<int, Eigen::Vector3d> line{{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {3, 0, 0}}};
  const Eigen::Vector2d tag(1.5, 1.2);
  const auto s = toa_set(line, tag);
  const auto up = solve_position(s, {}, Eigen::Vector2d(1.0, 0.5));
  const auto down = solve_position(s, {}, Eigen::Vector2d(1.0, -0.5));
  EXPECT_LT((up.position - tag).norm(), 1e-8);
  EXPECT_LT((down.position - Eigen::Vector2d(1.5, -1.2)).norm(), 1e-8);

  // Two basins on the grid too.
  const auto grid_up = brute_force_solve(
      s, Eigen::AlignedBox2d(Eigen::Vector2d(-1, 0.05), Eigen::Vector2d(4, 3)), 0.01);
  const auto grid_down = brute_force_solve(
      s, Eigen::AlignedBox2d(Eigen::Vector2d(-1, -3), Eigen::Vector2d(4, -0.05)), 0.01);
  EXPECT_LT((grid_up - tag).norm(), 0.02);
  EXPECT_LT((grid_down - Eigen::Vector2d(1.5, -1.2)).norm(), 0.02);
}

TEST(SolvePosition, UnderdeterminedFusedIsDegenerate) {
  auto f = fused_set(fixed_stations(), 1, kTruth);
  f.tdoa_ranges.erase(4);
  EXPECT_THROW(solve_position(f), DegenerateGeometryError);
  auto t = toa_set(fixed_stations(), kTruth);
  t.toa_ranges.erase(4);
  EXPECT_THROW(solve_position(t), DegenerateGeometryError);
}

TEST(SolvePosition, RankDeficiency) {
  // Three stations and the tag on one line: every Jacobian row is (±1, 0).
  std::map<int, Eigen::Vector3d> line{{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {3, 0, 0}}};
  const auto s = toa_set(line, Eigen::Vector2d(5.0, 0.0));
  EXPECT_THROW(solve_position(s, {}, Eigen::Vector2d(4.0, 0.0)), DegenerateGeometryError);
}

TEST(SolvePosition, MissingGeometry) {
  auto s = toa_set(fixed_stations(), kTruth);
  s.geometry.erase(3);
  EXPECT_THROW(solve_position(s), ConfigError);
}

TEST(SolvePosition, ConfigValidation) {
  const auto s = toa_set(fixed_stations(), kTruth);
  SolverConfig c;
  c.max_iterations = 0;
  EXPECT_THROW(solve_position(s, c), ConfigError);
  c = {};
  c.row_weights = {1.0, 2.0};
  EXPECT_THROW(solve_position(s, c), ConfigError);
  c.row_weights = {1.0, 2.0, 0.0};
  EXPECT_THROW(solve_position(s, c), ConfigError);
  c.row_weights = {1.0, 2.0, 3.0};
  EXPECT_TRUE(solve_position(s, c).converged);
}

TEST(SolvePosition, IterationBudget) {
  const auto s = toa_set(fixed_stations(), kTruth);
  SolverConfig c;
  c.max_iterations = 1;
  const auto e = solve_position(s, c, Eigen::Vector2d(5.0, -4.0));
  EXPECT_FALSE(e.converged);
  EXPECT_EQ(e.iterations, 1);
}

TEST(SolvePosition, CostNeverIncreases) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int i = 0; i < 50; ++i) {
    auto f = fused_set(fixed_stations(), 1, kTruth);
    for (auto& [id, r] : f.toa_ranges) r += noise(rng);
    for (auto& [id, r] : f.tdoa_ranges) r += noise(rng);
    const auto e = solve_position(f, {}, Eigen::Vector2d(3.0, 3.0));
    for (std::size_t k = 1; k < e.cost_history.size(); ++k) {
      // Accepted steps may only rise within the floating-point rounding band.
      EXPECT_LE(e.cost_history[k], e.cost_history[k - 1] * (1 + 1e-12) + 1e-24);
    }
    EXPECT_TRUE(e.converged);
  }
}

TEST(SolvePosition, ConvergedMeansSmallGradient) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.02);
  for (int i = 0; i < 50; ++i) {
    auto s = toa_set(fixed_stations(), kTruth);
    for (auto& [id, r] : s.toa_ranges) r += noise(rng);
    const auto e = solve_position(s);
    ASSERT_TRUE(e.converged);
    const Eigen::Vector2d g = jacobian(s, e.position).transpose() * residuals(s, e.position);
    EXPECT_LE(g.lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(SolvePosition, TranslationEquivariance) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> noise(0.0, 0.03);
  auto f = fused_set(fixed_stations(), 1, kTruth);
  for (auto& [id, r] : f.tdoa_ranges) r += noise(rng);
  const auto base = solve_position(f);
  const Eigen::Vector3d v(12.5, -7.25, 0.0);
  auto moved = f;
  for (auto& [id, p] : moved.geometry) p += v;
  const auto e = solve_position(moved);
  EXPECT_LT((e.position - (base.position + v.head<2>())).norm(), 1e-9);
  EXPECT_LT((e.covariance - base.covariance).norm(), 1e-9 * base.covariance.norm() + 1e-15);
}

TEST(SolvePosition, RotationEquivariance) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.03);
  auto f = fused_set(fixed_stations(), 1, kTruth);
  for (auto& [id, r] : f.toa_ranges) r += noise(rng);
  for (auto& [id, r] : f.tdoa_ranges) r += noise(rng);
  const auto base = solve_position(f);
  const Eigen::Rotation2Dd rot(0.7);
  auto turned = f;
  for (auto& [id, p] : turned.geometry) p.head<2>() = rot * p.head<2>();
  const auto e = solve_position(turned);
  EXPECT_LT((e.position - rot * base.position).norm(), 1e-9);
  const Eigen::Matrix2d R = rot.toRotationMatrix();
  EXPECT_LT((e.covariance - R * base.covariance * R.transpose()).norm(),
            1e-6 * base.covariance.norm());
}

TEST(SolvePosition, AgreesWithBruteForce) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::uniform_real_distribution<double> u(0.2, 1.4);
  const double step = 0.01;
  const Eigen::AlignedBox2d box(Eigen::Vector2d(-0.5, -0.5), Eigen::Vector2d(2.0, 2.2));
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector2d tag(u(rng), u(rng));
    auto s = i % 2 ? fused_set(fixed_stations(), 1, tag) : toa_set(fixed_stations(), tag);
    for (auto& [id, r] : s.toa_ranges) r += noise(rng);
    for (auto& [id, r] : s.tdoa_ranges) r += noise(rng);
    const auto e = solve_position(s);
    const auto grid = brute_force_solve(s, box, step);
    EXPECT_LE((e.position - grid).lpNorm<Eigen::Infinity>(), 2 * step) << i;
  }
}

TEST(BruteForce, ExactCell) {
  const auto s = toa_set(fixed_stations(), kTruth);
  const Eigen::AlignedBox2d box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(2, 2.5));
  const auto g = brute_force_solve(s, box, 0.01);
  EXPECT_LE((g - kTruth).lpNorm<Eigen::Infinity>(), 0.01);
  const auto gf = brute_force_solve(fused_set(fixed_stations(), 1, kTruth), box, 0.01);
  EXPECT_EQ(g, gf);
  EXPECT_THROW(brute_force_solve(s, box, 0.0), ConfigError);
}

TEST(SolvePosition, CovarianceMatchesSpread) {
  std::mt19937_64 rng(14);
  const double sigma = 0.02;
  std::normal_distribution<double> noise(0.0, sigma);
  const auto clean = toa_set(fixed_stations(), kTruth);
  std::vector<Eigen::Vector2d> pts;
  Eigen::Matrix2d reported = Eigen::Matrix2d::Zero();
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    auto s = clean;
    for (auto& [id, r] : s.toa_ranges) r += noise(rng);
    const auto e = solve_position(s);
    pts.push_back(e.position);
    reported += e.covariance / n;
    EXPECT_TRUE(e.covariance.isApprox(e.covariance.transpose()));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(e.covariance);
    EXPECT_GE(eig.eigenvalues().minCoeff(), 0.0);
  }
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  for (const auto& p : pts) m += p / n;
  Eigen::Vector2d var = Eigen::Vector2d::Zero();
  for (const auto& p : pts) var += (p - m).cwiseAbs2() / (n - 1);
  for (int k = 0; k < 2; ++k) {
    EXPECT_GT(var(k), 0.5 * reported(k, k)) << k;
    EXPECT_LT(var(k), 2.0 * reported(k, k)) << k;
  }
}

TEST(SolvePosition, LongDoubleInstantiation) {
  MeasurementSetT<long double> s;
  s.mode = SolveMode::ToaOnly;
  for (const auto& [id, p] : fixed_stations()) {
    s.geometry[id] = p.cast<long double>();
    s.toa_ranges[id] = static_cast<long double>(dist(p, kTruth));
  }
  const auto e = solve_position(s);
  EXPECT_TRUE(e.converged);
  EXPECT_LT(std::abs(static_cast<double>(e.position.y()) - 1.5134), 1e-9);
}

TEST(SolveMode, Strings) {
  EXPECT_EQ(to_string(SolveMode::ToaOnly), "toa");
  EXPECT_EQ(solve_mode_from_string("fused"), SolveMode::Fused);
  EXPECT_THROW(solve_mode_from_string("tdoa"), ConfigError);
}
