#include "orgym/ran/cell.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace orgym::ran {

namespace {

enum StreamKind : std::uint64_t { kTrafficStream = 1, kChannelStream = 2, kInitStream = 3 };

}  // namespace

UeCounters KpmAccumulator::take_delta(UeId ue, const UeCounters& now) {
  auto& base = baseline_[ue];
  UeCounters d{now.tx_bytes - base.tx_bytes, now.tx_tbs - base.tx_tbs,
               now.granted_rbgs - base.granted_rbgs};
  base = now;
  return d;
}

Cell::Cell(const ScenarioConfig& config, std::uint32_t bs_index, std::uint64_t seed)
    : node_(NodeId::for_base_station(bs_index + 1)) {
  params_.allocation = config.slice_allocation;
  params_.policies = config.slice_scheduling_policy;
  params_.network_slicing = config.network_slicing;
  params_.traffic = TrafficModel{config.traffic, config.tti_ms};
  params_.channel = ChannelModel{config.channel.cqi_step_prob};
  params_.pf_alpha = config.pf_alpha;
  params_.pf_epsilon = config.pf_epsilon;
  params_.tti_ms = config.tti_ms;

  for (UeId id : config.ue_ids()) {
    UeState ue;
    ue.ue_id = id;
    ue.slice = config.slice_of(id);
    ue.traffic_rng.seed(derive_seed(seed, {bs_index, id, kTrafficStream}));
    ue.channel_rng.seed(derive_seed(seed, {bs_index, id, kChannelStream}));
    Rng init(derive_seed(seed, {bs_index, id, kInitStream}));
    ue.cqi = std::uniform_int_distribution<int>(config.channel.initial_cqi_min,
                                                config.channel.initial_cqi_max)(init);
    ues_.push_back(std::move(ue));
  }
  cursors_.assign(std::max<std::size_t>(params_.policies.size(), 1), 0);
}

Cell::Cell(NodeId node, CellParams params, std::vector<UeState> ues)
    : node_(std::move(node)), params_(std::move(params)), ues_(std::move(ues)) {
  std::sort(ues_.begin(), ues_.end(),
            [](const UeState& a, const UeState& b) { return a.ue_id < b.ue_id; });
  for (const auto& ue : ues_) {
    if (ue.slice >= params_.policies.size()) {
      throw std::invalid_argument(fmt::format("UE {} in undeclared slice {}", ue.ue_id, ue.slice));
    }
  }
  cursors_.assign(std::max<std::size_t>(params_.policies.size(), 1), 0);
}

UeState& Cell::mutable_ue(UeId id) {
  for (auto& ue : ues_) {
    if (ue.ue_id == id) return ue;
  }
  throw std::out_of_range(fmt::format("no UE {}", id));
}

std::vector<Cell::Group> Cell::groups() const {
  std::vector<Group> out;
  if (!params_.network_slicing) {
    Group g{{}, {}, params_.policies.front()};
    for (std::uint32_t r = 0; r < params_.allocation.total_rbgs; ++r) g.rbgs.push_back(r);
    for (std::size_t i = 0; i < ues_.size(); ++i) g.ue_index.push_back(i);
    out.push_back(std::move(g));
    return out;
  }
  for (std::size_t s = 0; s < params_.policies.size(); ++s) {
    Group g{{}, {}, params_.policies[s]};
    auto it = params_.allocation.ranges.find(static_cast<SliceId>(s));
    if (it != params_.allocation.ranges.end()) {
      for (auto r = it->second.first; r <= it->second.last; ++r) g.rbgs.push_back(r);
    }
    for (std::size_t i = 0; i < ues_.size(); ++i) {
      if (ues_[i].slice == s) g.ue_index.push_back(i);
    }
    out.push_back(std::move(g));
  }
  return out;
}

TtiOutcome Cell::step_tti() {
  TtiOutcome out;
  out.rbg_owner.assign(params_.allocation.total_rbgs, std::nullopt);
  out.ues.resize(ues_.size());

  for (std::size_t i = 0; i < ues_.size(); ++i) {
    auto& ue = ues_[i];
    auto arrived = params_.traffic.arrivals(ue.slice, ue.traffic_rng);
    ue.dl_buffer_bytes += arrived;
    out.ues[i] = UeTti{ue.ue_id, ue.slice, arrived, 0, 0};
  }
  for (auto& ue : ues_) ue.cqi = params_.channel.advance(ue.cqi, ue.channel_rng);

  auto gs = groups();
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    const auto& g = gs[gi];
    std::vector<SchedUe> view;
    view.reserve(g.ue_index.size());
    for (auto i : g.ue_index) {
      const auto& ue = ues_[i];
      view.push_back(SchedUe{ue.ue_id, ue.dl_buffer_bytes, cqi_to_bytes_per_rbg(ue.cqi), ue.avg_tput});
    }
    Grants grants;
    switch (g.policy) {
      case SchedulingPolicy::RoundRobin: {
        auto rr = schedule_round_robin(view, g.rbgs.size(), cursors_[gi]);
        cursors_[gi] = rr.cursor;
        grants = std::move(rr.grants);
        break;
      }
      case SchedulingPolicy::Waterfilling:
        grants = schedule_waterfilling(view, g.rbgs.size());
        break;
      case SchedulingPolicy::ProportionallyFair:
        grants = schedule_proportional_fair(view, g.rbgs.size(), params_.pf_epsilon);
        break;
    }
    for (std::size_t pos = 0; pos < g.rbgs.size(); ++pos) out.rbg_owner[g.rbgs[pos]] = grants.rbg_owner[pos];
    for (auto i : g.ue_index) out.ues[i].granted_rbgs = grants.count(ues_[i].ue_id);
  }

  for (std::size_t i = 0; i < ues_.size(); ++i) {
    auto& ue = ues_[i];
    auto& rec = out.ues[i];
    std::uint64_t capacity = std::uint64_t{rec.granted_rbgs} * cqi_to_bytes_per_rbg(ue.cqi);
    rec.served = std::min(ue.dl_buffer_bytes, capacity);
    ue.dl_buffer_bytes -= rec.served;
    ue.totals.tx_bytes += rec.served;
    ue.totals.granted_rbgs += rec.granted_rbgs;
    if (rec.granted_rbgs > 0) ++ue.totals.tx_tbs;
    ue.avg_tput = ewma_update(ue.avg_tput, static_cast<double>(rec.served), params_.pf_alpha);
  }

  ++clock_tti_;
  out.clock_tti = clock_tti_;
  return out;
}

std::optional<Rejection> Cell::check_control(const ControlAction& action) const {
  const auto total = params_.allocation.total_rbgs;
  if (auto err = validate_control_action(action, total)) return err;
  const auto n = num_slices();
  if (action.slice_scheduling_policy.size() < n) {
    return Rejection{RejectReason::MissingPolicy,
                     fmt::format("{} policies for {} slices", action.slice_scheduling_policy.size(), n)};
  }
  if (action.slice_scheduling_policy.size() > n) {
    return Rejection{RejectReason::OutOfRange,
                     fmt::format("{} policies but the cell has {} slices",
                                 action.slice_scheduling_policy.size(), n)};
  }
  return std::nullopt;
}

std::optional<Rejection> Cell::apply_control(const ControlAction& action) {
  if (auto err = check_control(action)) return err;
  const auto total = params_.allocation.total_rbgs;
  params_.allocation = action.slice_allocation;
  params_.allocation.total_rbgs = total;
  params_.policies = action.slice_scheduling_policy;
  std::fill(cursors_.begin(), cursors_.end(), 0);
  return std::nullopt;
}

std::uint32_t Cell::slice_rbg_count(SliceId slice) const {
  return params_.network_slicing ? params_.allocation.rbg_count(slice) : params_.allocation.total_rbgs;
}

SchedulingPolicy Cell::slice_policy(SliceId slice) const {
  return params_.network_slicing ? params_.policies.at(slice) : params_.policies.front();
}

std::vector<KpmRecord> Cell::collect_kpms() { return collect_kpms(default_window_); }

std::vector<KpmRecord> Cell::collect_kpms(KpmAccumulator& window) const {
  std::vector<KpmRecord> out;
  out.reserve(ues_.size());
  for (const auto& ue : ues_) {
    auto d = window.take_delta(ue.ue_id, ue.totals);
    KpmRecord r;
    r.timestamp_ms = now_ms();
    r.bs_id = node_.str();
    r.ue_id = ue.ue_id;
    r.slice_id = ue.slice;
    r.dl_buffer_bytes = ue.dl_buffer_bytes;
    r.tx_bytes = d.tx_bytes;
    r.tx_tbs = static_cast<std::uint32_t>(d.tx_tbs);
    r.dl_cqi = static_cast<std::uint8_t>(ue.cqi);
    r.granted_rbgs = static_cast<std::uint32_t>(d.granted_rbgs);
    r.policy = slice_policy(ue.slice);
    r.slice_rbg_count = slice_rbg_count(ue.slice);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace orgym::ran
