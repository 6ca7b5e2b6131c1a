#include "uwbfuse/simulator.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "uwbfuse/errors.hpp"

namespace uwbfuse {
namespace {

struct Reception {
  double timestamp;
  double measured_power;
};

class RoundSimulator {
 public:
  RoundSimulator(const Scene& scene, Rng& rng) : scene_(scene), rng_(rng) {}

  // Receive timestamp of a message that left its antenna at `emission` (true
  // time) from `from`, as stamped by station `to`.
  Reception receive(const Station& from, const Station& to, double emission) {
    const double distance = (from.position - to.position).norm();
    const double z_power = normal_(rng_);
    const double z_time = normal_(rng_);
    const double actual =
        rx_power(scene_.tx_power_dbm, std::max(distance, kNearFieldDistance),
                 scene_.radio.center_frequency_hz) +
        scene_.noise.power_jitter_sigma * z_power;
    double error = 0.0;
    double measured = 0.0;
    try {
      error = to.power_curve.power_error(actual);
      measured = to.power_curve.actual_to_measured_power(actual);
    } catch (const DomainError& e) {
      throw ConfigError("station " + std::to_string(to.id) + " power curve: " + e.what());
    }
    // The antenna-to-timestamp latency is physical; the power-dependent error
    // and the jitter are timestamping artefacts in the receiver's own units.
    const double arrival = emission + distance / kSpeedOfLight;
    const double local = to.clock.offset + (1.0 + to.clock.frequency_offset) *
                                               (arrival + to.hardware_delay);
    const double stamp = local + error + scene_.noise.timestamp_jitter(to.id) * z_time;
    return {quantize(stamp, to.clock.tick), measured};
  }

 private:
  const Scene& scene_;
  Rng& rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

ExchangeRecord simulate_exchange(const Scene& configured, double round_start, Rng& rng,
                                 std::int64_t round_idx) {
  configured.validate();
  if (!(round_start >= 0.0)) throw ConfigError("round_start must be non-negative");

  // Per-round frequency wander, drawn only when enabled so that scenes
  // without it keep their random stream.
  std::optional<Scene> wandered;
  if (configured.noise.frequency_jitter_sigma > 0.0) {
    wandered = configured;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& s : wandered->stations) {
      s.clock.frequency_offset += configured.noise.frequency_jitter_sigma * normal(rng);
    }
  }
  const Scene& scene = wandered ? *wandered : configured;

  const Station& ref = scene.reference();
  const Station& tag = scene.tag();
  const std::vector<int> anchor_ids = scene.anchor_ids();
  RoundSimulator sim(scene, rng);

  ExchangeRecord rec;
  rec.round_idx = round_idx;
  rec.reference_id = ref.id;
  rec.tag_id = tag.id;
  rec.anchors.resize(anchor_ids.size());

  // Message 1: reference -> all.
  rec.t1_r = clock_project(ref.clock, round_start);
  const double e1 = clock_true_time(ref.clock, rec.t1_r) + ref.hardware_delay;
  const Reception tag1 = sim.receive(ref, tag, e1);
  rec.t1_t = tag1.timestamp;
  rec.p1_t = tag1.measured_power;
  for (std::size_t i = 0; i < anchor_ids.size(); ++i) {
    const Reception r = sim.receive(ref, scene.station(anchor_ids[i]), e1);
    rec.anchors[i].id = anchor_ids[i];
    rec.anchors[i].t1 = r.timestamp;
    rec.anchors[i].p1 = r.measured_power;
  }

  // Message 2: tag -> all, scheduled on the tag clock.
  rec.t2_t = quantize(rec.t1_t + scene.tag_response_delay, tag.clock.tick);
  const double e2 = clock_true_time(tag.clock, rec.t2_t) + tag.hardware_delay;
  const Reception ref2 = sim.receive(tag, ref, e2);
  rec.t2_r = ref2.timestamp;
  rec.p2_r = ref2.measured_power;
  for (std::size_t i = 0; i < anchor_ids.size(); ++i) {
    const Reception r = sim.receive(tag, scene.station(anchor_ids[i]), e2);
    rec.anchors[i].t2 = r.timestamp;
    rec.anchors[i].p2 = r.measured_power;
  }

  // Message 3: reference -> all, closes the drift-measurement window.
  rec.t3_r = quantize(rec.t1_r + scene.round_interval, ref.clock.tick);
  const double e3 = clock_true_time(ref.clock, rec.t3_r) + ref.hardware_delay;
  const Reception tag3 = sim.receive(ref, tag, e3);
  rec.t3_t = tag3.timestamp;
  rec.p3_t = tag3.measured_power;
  for (std::size_t i = 0; i < anchor_ids.size(); ++i) {
    rec.anchors[i].t3 = sim.receive(ref, scene.station(anchor_ids[i]), e3).timestamp;
  }

  ExchangeTruth truth;
  truth.tag_position = tag.position;
  truth.tof_reference_tag = true_tof(ref.position, tag.position);
  for (int id : anchor_ids) {
    const auto& a = scene.station(id).position;
    truth.tdoa[id] = true_tof(tag.position, a) - true_tof(ref.position, a);
  }
  rec.truth = std::move(truth);
  return rec;
}

std::vector<ExchangeRecord> simulate_session(const Scene& scene, int n_rounds,
                                             std::uint64_t seed) {
  if (n_rounds < 1) throw ConfigError("n_rounds must be at least 1");
  Rng rng(seed);
  std::vector<ExchangeRecord> out;
  out.reserve(static_cast<std::size_t>(n_rounds));
  for (int k = 0; k < n_rounds; ++k) {
    out.push_back(simulate_exchange(scene, k * scene.round_spacing, rng, k));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace uwbfuse
