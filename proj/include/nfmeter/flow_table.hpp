#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nfmeter/accumulator.hpp"
#include "nfmeter/flow_key.hpp"
#include "nfmeter/packet.hpp"

namespace nfmeter {

struct FlowTimeouts {
  std::int64_t idle_us = 30'000'000;
  std::int64_t active_us = 120'000'000;
};

enum class FlowEvent { NewFlow, Continued, ExpiredThenNew };

struct UpsertResult {
  FlowEvent event;
  Direction direction;
};

/// Bidirectional flow table with idle and active timeouts.
///
/// The table keeps its own clock: the highest packet timestamp seen (or
/// passed to advance_clock). A flow is expired once
///   clock - last_seen > idle   or   clock - first_seen > active,
/// so a packet exactly at last_seen + idle still continues the flow.
/// Expiry is checked lazily for the flow a packet maps to and in bulk by
/// expire_flows; no timers are involved.
class FlowTable {
public:
  explicit FlowTable(FlowTimeouts timeouts = {});

  UpsertResult upsert_packet(const PacketRecord& pkt);

  /// Raises the clock to `now_us` if it is behind.
  void advance_clock(std::int64_t now_us);
  std::int64_t clock() const noexcept { return clock_; }

  /// Drains every flow expired as of `now_us` (and any split off earlier by
  /// upsert_packet). Order: expiry deadline, then first_seen, then key.
  std::vector<FlowAccumulator> expire_flows(std::int64_t now_us);

  /// Drains all flows, expired or not. Order: first_seen, then key.
  std::vector<FlowAccumulator> flush();

  std::size_t active_count() const noexcept { return active_.size(); }
  std::size_t pending_expired() const noexcept { return expired_.size(); }
  const FlowTimeouts& timeouts() const noexcept { return timeouts_; }

private:
  bool is_expired(const FlowAccumulator& acc, std::int64_t now) const;
  std::int64_t deadline(const FlowAccumulator& acc) const;

  FlowTimeouts timeouts_;
  std::int64_t clock_;
  std::unordered_map<CanonicalKey, FlowAccumulator, CanonicalKeyHash> active_;
  std::vector<FlowAccumulator> expired_;
};

/// Orders flows by (first_seen, key).
bool flow_order(const FlowAccumulator& a, const FlowAccumulator& b);

} // namespace nfmeter
