#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "orgym/core/config.hpp"

namespace orgym::ran {

using Rng = std::mt19937_64;

/// Seed for an independent substream, mixed from `root` and a key path
/// (bs index, UE id, stream kind, ...) with splitmix64.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

/// Bytes one RBG carries in one TTI at each CQI (index 0 is CQI 1).
/// Calibration values, strictly increasing from 8 to 120.
inline constexpr std::array<std::uint32_t, 15> kCqiBytesPerRbg = {
    8, 12, 16, 22, 28, 36, 44, 52, 62, 72, 82, 92, 102, 112, 120};

std::uint32_t cqi_to_bytes_per_rbg(int cqi);

/// Per-UE CQI random walk: each TTI the CQI moves by -1/0/+1 with
/// probabilities p/(1-2p)/p, clamped to [1, 15].
struct ChannelModel {
  double step_prob = 0.05;

  int advance(int cqi, Rng& rng) const;
};

/// Poisson packet arrivals per slice with fixed packet sizes.
struct TrafficModel {
  std::vector<SliceTraffic> per_slice;
  std::uint32_t tti_ms = 1;

  /// Bytes arriving for one UE of `slice` during one TTI.
  std::uint64_t arrivals(SliceId slice, Rng& rng) const;
};

}  // namespace orgym::ran
