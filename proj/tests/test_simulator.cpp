#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "scenes.hpp"
#include "uwbfuse/csv_io.hpp"
#include "uwbfuse/errors.hpp"

using namespace uwbfuse;
using namespace uwbfuse::testing;

namespace {

double tof(const Scene& s, int a, int b) {
  return true_tof(s.station(a).position, s.station(b).position);
}

void expect_ordered(const ExchangeRecord& r) {
  EXPECT_LT(r.t1_r, r.t2_r);
  EXPECT_LT(r.t2_r, r.t3_r);
  EXPECT_LT(r.t1_t, r.t2_t);
  EXPECT_LT(r.t2_t, r.t3_t);
  for (const auto& a : r.anchors) {
    EXPECT_LT(a.t1, a.t2);
    ASSERT_TRUE(a.t3);
    EXPECT_LT(a.t2, *a.t3);
  }
}

}  // namespace

TEST(SimulateExchange, ErrorFreeTwr) {
  const Scene s = ideal();
  const auto r = one_round(s);
  EXPECT_NEAR(0.5 * (r.dt12_r() - r.dt12_t()), tof(s, 1, 2), 1e-18);

  Scene q = ideal();
  set_tick(q, kTick);
  const auto rq = one_round(q);
  EXPECT_NEAR(0.5 * (rq.dt12_r() - rq.dt12_t()), tof(s, 1, 2), kTick);
}

TEST(SimulateExchange, AnchorEventAlgebra) {
  const Scene s = ideal();
  const auto r = one_round(s);
  for (int id : {3, 4}) {
    const double expected = s.tag_response_delay + tof(s, 1, 2) + tof(s, 2, id) - tof(s, 1, id);
    EXPECT_NEAR(r.anchor(id).dt12(), expected, 1e-18) << id;
  }
}

TEST(SimulateExchange, TagDriftWindow) {
  // A tag running 1 ppm fast stretches its 1 -> 3 window by 1 ns; the
  // reference-minus-tag drift error is therefore -1 ns.
  Scene s = ideal();
  set_tick(s, kTick);
  station(s, 2).clock.frequency_offset = 1e-6;
  const auto r = one_round(s);
  EXPECT_NEAR(r.dt13_t() - r.dt13_r(), 1e-9, 2 * kTick);
}

TEST(SimulateExchange, TruthFields) {
  const Scene s = ideal();
  const auto r = one_round(s);
  ASSERT_TRUE(r.truth);
  EXPECT_EQ(r.truth->tag_position, s.station(2).position);
  EXPECT_DOUBLE_EQ(*r.truth->tof_reference_tag, tof(s, 1, 2));
  EXPECT_NEAR(r.truth->tdoa.at(3), -2.6685930633937254e-09, 1e-21);
  EXPECT_EQ(r.reference_id, 1);
  EXPECT_EQ(r.tag_id, 2);
  ASSERT_EQ(r.anchors.size(), 2u);
  EXPECT_EQ(r.anchors[0].id, 3);
  EXPECT_EQ(r.anchors[1].id, 4);
}

TEST(SimulateExchange, EventOrdering) {
  const Scene s = presets::desk_paper_like();
  for (const auto& r : simulate_session(s, 200, 5)) expect_ordered(r);
}

TEST(SimulateExchange, Physicality) {
  // Drift and quantization only: the anchor interval stays within the
  // drift-scaled response delay of the event-algebra value.
  Scene s = presets::desk_paper_like();
  s.noise = NoiseSpec{};
  for (auto& st : s.stations) {
    st.hardware_delay = 0.0;
    st.power_curve = PowerCurve::flat_zero();
  }
  const auto r = one_round(s);
  for (int id : {3, 4}) {
    const double expected = s.tag_response_delay + tof(s, 1, 2) + tof(s, 2, id) - tof(s, 1, id);
    const double bound = 20e-6 * s.tag_response_delay + 3 * kTick;
    EXPECT_LE(std::abs(r.anchor(id).dt12() - expected), bound) << id;
  }
}

TEST(SimulateExchange, InvalidSceneIsConfigError) {
  Scene s = ideal();
  s.stations.pop_back();
  s.stations.pop_back();
  s.stations.pop_back();
  Rng rng(1);
  EXPECT_THROW(simulate_exchange(s, 0.0, rng), ConfigError);

  Scene t = ideal();
  t.round_interval = 1e-9;
  EXPECT_THROW(simulate_exchange(t, 0.0, rng), ConfigError);

  Scene u = ideal();
  station(u, 3).role = Role::Tag;
  EXPECT_THROW(simulate_exchange(u, 0.0, rng), ConfigError);
}

TEST(SimulateExchange, PowerOutsideCurveIsConfigError) {
  Scene s = ideal();
  station(s, 2).power_curve = PowerCurve::synthetic_default();
  s.tx_power_dbm = 30.0;
  Rng rng(1);
  EXPECT_THROW(simulate_exchange(s, 0.0, rng), ConfigError);
}

TEST(SimulateSession, Singleton) {
  EXPECT_EQ(simulate_session(ideal(), 1, 0).size(), 1u);
  EXPECT_THROW(simulate_session(ideal(), 0, 0), ConfigError);
}

TEST(SimulateSession, SeedDeterminism) {
  const Scene s = presets::desk_paper_like();
  std::ostringstream a, b, c;
  write_records_csv(a, simulate_session(s, 50, 42));
  write_records_csv(b, simulate_session(s, 50, 42));
  write_records_csv(c, simulate_session(s, 50, 43));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(SimulateSession, RoundsAdvanceBySpacing) {
  const Scene s = ideal();
  const auto rs = simulate_session(s, 3, 0);
  for (std::size_t k = 0; k < rs.size(); ++k) {
    EXPECT_EQ(rs[k].round_idx, static_cast<std::int64_t>(k));
    EXPECT_NEAR(rs[k].t1_r, k * s.round_spacing, 1e-15);
  }
}

TEST(SimulateSession, ZeroNoiseStationarity) {
  Scene s = presets::desk_zero_noise();
  set_tick(s, kTick);
  const auto rs = simulate_session(s, 1000, 3);
  const auto& r0 = rs.front();
  for (const auto& r : rs) {
    EXPECT_NEAR(r.dt12_r(), r0.dt12_r(), 2 * kTick);
    EXPECT_NEAR(r.dt12_t(), r0.dt12_t(), 2 * kTick);
    EXPECT_NEAR(r.dt13_t(), r0.dt13_t(), 2 * kTick);
    for (std::size_t i = 0; i < r.anchors.size(); ++i) {
      EXPECT_NEAR(r.anchors[i].dt12(), r0.anchors[i].dt12(), 2 * kTick);
    }
  }
}

TEST(SimulateSession, FrequencyJitter) {
  Scene s = presets::desk_zero_noise();
  const auto plain = simulate_session(s, 20, 9);
  s.noise.frequency_jitter_sigma = 1e-7;
  const auto wandering = simulate_session(s, 20, 9);
  double spread = 0.0;
  for (std::size_t k = 0; k < plain.size(); ++k) {
    spread = std::max(spread, std::abs(wandering[k].dt13_t() - plain[k].dt13_t()));
  }
  // 0.1 ppm over a 1 ms window is ~1e-10 s.
  EXPECT_GT(spread, 1e-11);
  EXPECT_LT(spread, 1e-9);

  s.noise.frequency_jitter_sigma = -1.0;
  EXPECT_THROW(simulate_session(s, 1, 0), ConfigError);
}

TEST(SimulateSession, StationJitterOverride) {
  Scene s = ideal();
  s.noise.station_timestamp_jitter[3] = 1e-10;
  const auto r = one_round(s);
  EXPECT_NEAR(0.5 * (r.dt12_r() - r.dt12_t()), tof(s, 1, 2), 1e-18);
  const double expected = s.tag_response_delay + tof(s, 1, 2) + tof(s, 2, 3) - tof(s, 1, 3);
  EXPECT_GT(std::abs(r.anchor(3).dt12() - expected), 1e-14);

  s.noise.station_timestamp_jitter[9] = 1e-10;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(DeriveSeed, DistinctStreams) {
  EXPECT_NE(derive_seed(7, 1), derive_seed(7, 3));
  EXPECT_NE(derive_seed(7, 1), derive_seed(8, 1));
  EXPECT_EQ(derive_seed(7, 1), derive_seed(7, 1));
}

TEST(Scene, WithReference) {
  const Scene s = ideal().with_reference(3);
  EXPECT_EQ(s.reference().id, 3);
  EXPECT_EQ(s.tag().id, 2);
  EXPECT_EQ(s.anchor_ids(), (std::vector<int>{1, 4}));
  EXPECT_THROW(ideal().with_reference(2), ConfigError);
  EXPECT_THROW(ideal().with_reference(9), ConfigError);
}
