#include "orgym/ran/schedulers.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace orgym::ran {

std::uint32_t Grants::count(UeId ue) const {
  return static_cast<std::uint32_t>(std::count(rbg_owner.begin(), rbg_owner.end(), ue));
}

std::map<UeId, std::uint32_t> Grants::counts() const {
  std::map<UeId, std::uint32_t> out;
  for (const auto& owner : rbg_owner) {
    if (owner) ++out[*owner];
  }
  return out;
}

std::uint32_t Grants::total() const {
  return static_cast<std::uint32_t>(
      std::count_if(rbg_owner.begin(), rbg_owner.end(), [](const auto& o) { return o.has_value(); }));
}

RoundRobinResult schedule_round_robin(std::span<const SchedUe> ues, std::size_t num_rbgs,
                                      std::size_t cursor) {
  RoundRobinResult out;
  out.grants.rbg_owner.assign(num_rbgs, std::nullopt);
  const auto n = ues.size();
  out.cursor = n == 0 ? 0 : cursor % n;
  const bool any_backlogged =
      std::any_of(ues.begin(), ues.end(), [](const SchedUe& u) { return u.buffer_bytes > 0; });
  if (!any_backlogged) return out;

  std::size_t next = out.cursor;
  for (std::size_t rbg = 0; rbg < num_rbgs; ++rbg) {
    while (ues[next].buffer_bytes == 0) next = (next + 1) % n;
    out.grants.rbg_owner[rbg] = ues[next].ue_id;
    next = (next + 1) % n;
  }
  if (num_rbgs > 0) out.cursor = next;
  return out;
}

namespace {

using Leximin = std::vector<std::uint64_t>;  // delivered bytes, ascending

Leximin with_value(const Leximin& base, std::uint64_t v) {
  Leximin out;
  out.reserve(base.size() + 1);
  auto pos = std::upper_bound(base.begin(), base.end(), v);
  out.insert(out.end(), base.begin(), pos);
  out.push_back(v);
  out.insert(out.end(), pos, base.end());
  return out;
}

}  // namespace

Grants schedule_waterfilling(std::span<const SchedUe> ues, std::size_t num_rbgs) {
  Grants out;
  out.rbg_owner.assign(num_rbgs, std::nullopt);
  const std::size_t n = ues.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ues[a].ue_id < ues[b].ue_id; });

  auto delivered = [&](std::size_t i, std::uint64_t c) {
    return std::min(c * ues[i].bytes_per_rbg, ues[i].buffer_bytes);
  };
  auto need = [&](std::size_t i) -> std::size_t {
    const auto& u = ues[i];
    if (u.buffer_bytes == 0 || u.bytes_per_rbg == 0) return 0;
    return static_cast<std::size_t>((u.buffer_bytes + u.bytes_per_rbg - 1) / u.bytes_per_rbg);
  };

  // best[k][b]: leximin-best sorted delivered vector of UEs order[k..] with
  // at most b RBGs. Leximin order is translation invariant, so the suffix
  // optimum composes exactly.
  std::vector<std::vector<Leximin>> best(n + 1, std::vector<Leximin>(num_rbgs + 1));
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t i = order[k];
    for (std::size_t b = 0; b <= num_rbgs; ++b) {
      const std::size_t cmax = std::min(b, need(i));
      for (std::size_t c = 0; c <= cmax; ++c) {
        auto cand = with_value(best[k + 1][b - c], delivered(i, c));
        if (c == 0 || cand > best[k][b]) best[k][b] = std::move(cand);
      }
    }
  }

  // Among optimal allocations, give the lower UE id as many RBGs as possible.
  std::size_t budget = num_rbgs;
  std::size_t rbg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    for (std::size_t c = std::min(budget, need(i)) + 1; c-- > 0;) {
      if (with_value(best[k + 1][budget - c], delivered(i, c)) == best[k][budget]) {
        for (std::size_t j = 0; j < c; ++j) out.rbg_owner[rbg++] = ues[i].ue_id;
        budget -= c;
        break;
      }
    }
  }
  return out;
}

Grants schedule_proportional_fair(std::span<const SchedUe> ues, std::size_t num_rbgs,
                                  double epsilon) {
  Grants out;
  out.rbg_owner.assign(num_rbgs, std::nullopt);
  for (std::size_t rbg = 0; rbg < num_rbgs; ++rbg) {
    std::optional<std::size_t> pick;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ues.size(); ++i) {
      if (ues[i].buffer_bytes == 0) continue;
      double metric = ues[i].bytes_per_rbg / std::max(ues[i].avg_tput, epsilon);
      if (!pick || metric > best || (metric == best && ues[i].ue_id < ues[*pick].ue_id)) {
        pick = i;
        best = metric;
      }
    }
    if (!pick) break;
    out.rbg_owner[rbg] = ues[*pick].ue_id;
  }
  return out;
}

double ewma_update(double avg, double served_bytes, double alpha) {
  return (1.0 - alpha) * avg + alpha * served_bytes;
}

}  // namespace orgym::ran
