#include "nfmeter/flow_table.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace nfmeter {

bool flow_order(const FlowAccumulator& a, const FlowAccumulator& b) {
  return std::tie(a.first_seen_us, a.key) < std::tie(b.first_seen_us, b.key);
}

FlowTable::FlowTable(FlowTimeouts timeouts)
    : timeouts_(timeouts), clock_(std::numeric_limits<std::int64_t>::min()) {
  if (timeouts.idle_us <= 0 || timeouts.active_us <= 0) {
    throw std::invalid_argument("flow timeouts must be positive");
  }
}

bool FlowTable::is_expired(const FlowAccumulator& acc, std::int64_t now) const {
  return now - acc.last_seen_us > timeouts_.idle_us ||
         now - acc.first_seen_us > timeouts_.active_us;
}

std::int64_t FlowTable::deadline(const FlowAccumulator& acc) const {
  return std::min(acc.last_seen_us + timeouts_.idle_us, acc.first_seen_us + timeouts_.active_us);
}

void FlowTable::advance_clock(std::int64_t now_us) { clock_ = std::max(clock_, now_us); }

UpsertResult FlowTable::upsert_packet(const PacketRecord& pkt) {
  advance_clock(pkt.timestamp_us);
  const auto canonical = CanonicalKey::of(pkt);
  auto it = active_.find(canonical);
  FlowEvent event = FlowEvent::Continued;
  if (it == active_.end()) {
    it = active_.emplace(canonical, FlowAccumulator{FlowKey::from_packet(pkt)}).first;
    event = FlowEvent::NewFlow;
  } else if (is_expired(it->second, clock_)) {
    expired_.push_back(std::move(it->second));
    it->second = FlowAccumulator{FlowKey::from_packet(pkt)};
    event = FlowEvent::ExpiredThenNew;
  }
  FlowAccumulator& acc = it->second;
  const Direction direction = acc.key.direction_of(pkt);
  accumulate(acc, pkt, direction);
  return {event, direction};
}

std::vector<FlowAccumulator> FlowTable::expire_flows(std::int64_t now_us) {
  advance_clock(now_us);
  std::vector<FlowAccumulator> out = std::move(expired_);
  expired_.clear();
  for (auto it = active_.begin(); it != active_.end();) {
    if (is_expired(it->second, now_us)) {
      out.push_back(std::move(it->second));
      it = active_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(out.begin(), out.end(), [this](const FlowAccumulator& a, const FlowAccumulator& b) {
    const auto da = deadline(a), db = deadline(b);
    if (da != db) return da < db;
    return flow_order(a, b);
  });
  return out;
}

std::vector<FlowAccumulator> FlowTable::flush() {
  std::vector<FlowAccumulator> out = std::move(expired_);
  expired_.clear();
  out.reserve(out.size() + active_.size());
  for (auto& [key, acc] : active_) out.push_back(std::move(acc));
  active_.clear();
  std::sort(out.begin(), out.end(), flow_order);
  return out;
}

} // namespace nfmeter
