#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "uwbfuse/exchange_record.hpp"
#include "uwbfuse/scene.hpp"

namespace uwbfuse {

using Rng = std::mt19937_64;

/// Stations closer than this are treated as this far apart by the path-loss model.
inline constexpr double kNearFieldDistance = 1e-3;

/// Simulates one round starting at `round_start` (true time, s).
///
/// Transmit timestamps are the scheduled local times; the antenna emits
/// `hardware_delay` later. A receive timestamp is the local reading of
/// (arrival + hardware_delay), plus power_error(rx power) and jitter, then
/// quantized to the receiver's tick. The tag answers `tag_response_delay` after its
/// receive timestamp and the reference sends message 3 `round_interval`
/// after message 1, both measured on their own clocks.
ExchangeRecord simulate_exchange(const Scene& scene, double round_start, Rng& rng,
                                 std::int64_t round_idx = 0);

/// `n_rounds` consecutive rounds, round k starting at k * round_spacing.
std::vector<ExchangeRecord> simulate_session(const Scene& scene, int n_rounds,
                                             std::uint64_t seed);

/// Decorrelated seed for one stream of a session (e.g. one reference station).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace uwbfuse
