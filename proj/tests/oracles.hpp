#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "orgym/ran/schedulers.hpp"

namespace orgym::test {

/// Delivered bytes per UE for the given RBG counts, sorted ascending.
inline std::vector<std::uint64_t> delivered_sorted(std::span<const ran::SchedUe> ues,
                                                   const std::vector<std::uint32_t>& counts) {
  std::vector<std::uint64_t> v;
  for (std::size_t i = 0; i < ues.size(); ++i) {
    v.push_back(std::min<std::uint64_t>(ues[i].buffer_bytes, std::uint64_t{counts[i]} * ues[i].bytes_per_rbg));
  }
  std::sort(v.begin(), v.end());
  return v;
}

/// Leximin optimum by enumerating every split of at most `rbgs` RBGs.
inline std::vector<std::uint64_t> brute_force_maxmin(std::span<const ran::SchedUe> ues, std::uint32_t rbgs) {
  std::vector<std::uint32_t> counts(ues.size(), 0);
  std::vector<std::uint64_t> best;
  bool have = false;
  std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t left) {
    if (i == ues.size()) {
      auto v = delivered_sorted(ues, counts);
      if (!have || v > best) best = v, have = true;
      return;
    }
    for (std::uint32_t c = 0; c <= left; ++c) {
      counts[i] = c;
      go(i + 1, left - c);
    }
  };
  go(0, rbgs);
  return best;
}

inline std::vector<std::uint32_t> counts_of(const ran::Grants& g, std::span<const ran::SchedUe> ues) {
  std::vector<std::uint32_t> out;
  for (const auto& u : ues) out.push_back(g.count(u.ue_id));
  return out;
}

/// Calls `fn(ues, rbgs)` for every instance of the exhaustive waterfilling
/// grid: 1..4 UEs, buffers and rates from small sets, 0..6 RBGs.
template <typename Fn>
std::size_t for_each_waterfilling_instance(Fn&& fn) {
  const std::vector<std::uint64_t> buffers = {0, 8, 20, 100, 1000};
  const std::vector<std::uint32_t> rates = {8, 12, 44};
  std::size_t instances = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= buffers.size() * rates.size();
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<ran::SchedUe> ues;
      std::size_t rest = code;
      for (std::size_t i = 0; i < n; ++i) {
        const auto b = rest % buffers.size();
        rest /= buffers.size();
        const auto r = rest % rates.size();
        rest /= rates.size();
        ues.push_back(ran::SchedUe{static_cast<UeId>(i + 1), buffers[b], rates[r], 0.0});
      }
      for (std::uint32_t rbgs = 0; rbgs <= 6; ++rbgs) {
        if (!fn(ues, rbgs)) return instances;
        ++instances;
      }
    }
  }
  return instances;
}

struct PfPick {
  std::optional<std::size_t> index;  // none when every buffer is empty
  bool tie = false;
};

/// Exact PF argmax by integer cross-multiplication of rate / avg; requires
/// integral avg_tput.
inline PfPick pf_oracle(std::span<const ran::SchedUe> ues) {
  PfPick p;
  for (std::size_t i = 0; i < ues.size(); ++i) {
    if (ues[i].buffer_bytes == 0) continue;
    if (!p.index) {
      p.index = i;
      continue;
    }
    const auto lhs = std::uint64_t{ues[i].bytes_per_rbg} * static_cast<std::uint64_t>(ues[*p.index].avg_tput);
    const auto rhs = std::uint64_t{ues[*p.index].bytes_per_rbg} * static_cast<std::uint64_t>(ues[i].avg_tput);
    if (lhs > rhs) p.index = i, p.tie = false;
    else if (lhs == rhs) p.tie = true;
  }
  return p;
}

}  // namespace orgym::test
