#include "orgym/ran/channel.hpp"

#include <algorithm>

namespace orgym::ran {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(root);
  for (auto k : path) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ull));
  return h;
}

std::uint32_t cqi_to_bytes_per_rbg(int cqi) {
  return kCqiBytesPerRbg[static_cast<std::size_t>(std::clamp(cqi, 1, 15) - 1)];
}

int ChannelModel::advance(int cqi, Rng& rng) const {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  int delta = 0;
  if (u < step_prob) {
    delta = -1;
  } else if (u < 2.0 * step_prob) {
    delta = +1;
  }
  return std::clamp(cqi + delta, 1, 15);
}

std::uint64_t TrafficModel::arrivals(SliceId slice, Rng& rng) const {
  const auto& t = per_slice.at(slice);
  const double mean = t.rate_pps * static_cast<double>(tti_ms) / 1000.0;
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> packets(mean);
  return packets(rng) * t.packet_bytes;
}

}  // namespace orgym::ran
