#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uwbfuse/core_model.hpp"
#include "uwbfuse/errors.hpp"

using namespace uwbfuse;

TEST(ClockProject, IdentityClock) {
  ClockModel c{0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(clock_project(c, 1.0), 1.0);
}

TEST(ClockProject, OnePpmDrift) {
  ClockModel c{0.0, 1e-6, 0.0};
  EXPECT_DOUBLE_EQ(clock_project(c, 1.0), 1.000001);
}

TEST(ClockProject, OffsetIsRoundedToTick) {
  ClockModel c{5e-9, 0.0, 15.65e-12};
  // round(5e-9 / 15.65e-12) = 319 ticks
  EXPECT_NEAR(clock_project(c, 0.0), 319 * 15.65e-12, 1e-22);

  ClockModel d{5e-9, 0.0, kDefaultTick};
  EXPECT_NEAR(clock_project(d, 0.0), 4.9923627804487185e-09, 1e-22);
}

TEST(ClockProject, DefaultTick) {
  EXPECT_NEAR(kDefaultTick, 1.5650040064102565e-11, 1e-25);
}

TEST(ClockProject, TimestampsAreTickMultiples) {
  ClockModel c{1.25e-3, 3e-6, kDefaultTick};
  for (double t : {0.0, 1e-3, 0.123456789, 2.5}) {
    const double n = clock_project(c, t) / c.tick;
    EXPECT_NEAR(n, std::round(n), 1e-3) << t;
  }
}

TEST(ClockProject, InverseRecoversTrueTime) {
  ClockModel c{3.71e-3, 8e-6, 0.0};
  const double t = 0.4321;
  EXPECT_NEAR(clock_true_time(c, clock_project(c, t)), t, 1e-15);
}

TEST(ClockProject, AffineUpToQuantization) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  std::uniform_real_distribution<double> drift(-100e-6, 100e-6);
  std::uniform_real_distribution<double> offset(0.0, 5e-3);
  for (int i = 0; i < 2000; ++i) {
    ClockModel c{offset(rng), drift(rng), kDefaultTick};
    const double t1 = time(rng);
    const double t2 = time(rng) * 1e-3;
    const double lhs =
        clock_project(c, t1 + t2) - clock_project(c, t1) - (1.0 + c.frequency_offset) * t2;
    EXPECT_LE(std::abs(lhs), c.tick + 1e-15);
  }
}

TEST(ClockModel, Validation) {
  EXPECT_NO_THROW((ClockModel{0.0, 100e-6, kDefaultTick}.validate()));
  EXPECT_THROW((ClockModel{0.0, 101e-6, kDefaultTick}.validate()), ConfigError);
  EXPECT_THROW((ClockModel{0.0, 0.0, -1e-12}.validate()), ConfigError);
  EXPECT_NO_THROW((ClockModel{0.0, 0.0, 0.0}.validate()));
}

TEST(RxPower, PathLossAtOneMetre) {
  EXPECT_NEAR(0.0 - rx_power(0.0, 1.0, 3993.6e6), 44.4750744952096, 1e-9);
}

TEST(RxPower, DoublingDistanceCostsSixDb) {
  const double a = rx_power(-20.0, 1.3, 3993.6e6);
  const double b = rx_power(-20.0, 2.6, 3993.6e6);
  EXPECT_NEAR(a - b, 20.0 * std::log10(2.0), 1e-12);
}

TEST(RxPower, UnityGainDistance) {
  const double d = kSpeedOfLight / (4.0 * M_PI * 3993.6e6);
  EXPECT_NEAR(d, 0.005973739432137598, 1e-15);
  EXPECT_NEAR(rx_power(-20.0, d, 3993.6e6), -20.0, 1e-12);
}

TEST(RxPower, StrictlyDecreasing) {
  double prev = rx_power(0.0, 0.01, 3993.6e6);
  for (double d = 0.02; d < 50.0; d *= 1.3) {
    const double p = rx_power(0.0, d, 3993.6e6);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(RxPower, NonPositiveDistance) {
  EXPECT_THROW(rx_power(0.0, 0.0, 3993.6e6), DomainError);
  try {
    rx_power(0.0, -2.0, 3993.6e6);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.value(), -2.0);
  }
}

TEST(TrueTof, DeskPairs) {
  const Eigen::Vector3d s1(0, 0, 0), s2(0, 1.5134, 0), s3(1.27, 1.643, 0);
  EXPECT_EQ(true_tof(s1, s1), 0.0);
  EXPECT_NEAR(true_tof(s1, s2), 5.048159016728833e-09, 1e-22);
  EXPECT_NEAR(true_tof(s1, s3), 6.926857409080084e-09, 1e-22);
}

TEST(Station, Validation) {
  Station s;
  s.hardware_delay = 0.5e-6;
  EXPECT_NO_THROW(s.validate());
  s.hardware_delay = 1e-6;
  EXPECT_THROW(s.validate(), ConfigError);
  s.hardware_delay = -1e-9;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Role, StringRoundTrip) {
  for (Role r : {Role::Reference, Role::Tag, Role::Anchor}) {
    EXPECT_EQ(role_from_string(to_string(r)), r);
  }
  EXPECT_THROW(role_from_string("beacon"), ConfigError);
}
