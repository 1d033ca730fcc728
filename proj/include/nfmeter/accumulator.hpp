#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>

#include "nfmeter/flow_key.hpp"
#include "nfmeter/flow_record.hpp"
#include "nfmeter/l7_table.hpp"
#include "nfmeter/packet.hpp"

namespace nfmeter {

/// Highest TCP sequence boundary seen in one direction, in serial-number
/// space (RFC 1982 style comparison modulo 2^32).
class SequenceTracker {
public:
  bool has_boundary() const noexcept { return seen_; }
  std::uint32_t boundary() const noexcept { return boundary_; }

  /// Returns true when [seq, seq + len) ends at or before the current
  /// boundary, then advances the boundary to cover the segment. Segments
  /// with no payload never count and leave the boundary alone.
  bool observe(std::uint32_t seq, std::uint32_t payload_len);

private:
  bool seen_ = false;
  std::uint32_t boundary_ = 0;
};

inline bool detect_retransmission(SequenceTracker& state, std::uint32_t seq,
                                  std::uint32_t payload_len) {
  return state.observe(seq, payload_len);
}

/// true when a precedes b in serial-number order.
constexpr bool seq_before(std::uint32_t a, std::uint32_t b) {
  return static_cast<std::int32_t>(a - b) < 0;
}

struct DirectionState {
  std::uint64_t bytes = 0;
  std::uint64_t packets = 0;
  std::int64_t first_us = 0;
  std::int64_t last_us = 0;
  std::uint8_t tcp_flags = 0;
  std::uint16_t max_window = 0;
  std::uint64_t retransmitted_bytes = 0;
  std::uint64_t retransmitted_packets = 0;
  SequenceTracker sequence;
};

inline constexpr std::size_t kSizeBucketCount = 5;
/// Inclusive upper bounds of the packet-size buckets.
inline constexpr std::array<std::uint16_t, kSizeBucketCount> kSizeBucketLimits{128, 256, 512,
                                                                              1024, 1514};

struct DnsState {
  bool query_seen = false;
  std::uint16_t query_id = 0;
  std::uint16_t query_type = 0;
  bool answer_seen = false;
  std::uint32_t a_record_ttl = 0;
};

/// Mutable per-flow state.
struct FlowAccumulator {
  explicit FlowAccumulator(const FlowKey& k) : key(k) {}

  FlowKey key;
  std::int64_t first_seen_us = std::numeric_limits<std::int64_t>::max();
  std::int64_t last_seen_us = std::numeric_limits<std::int64_t>::min();
  DirectionState client;  // client -> server
  DirectionState server;  // server -> client

  std::uint8_t min_ttl = 0;
  std::uint8_t max_ttl = 0;
  std::uint16_t min_ip_len = 0;
  std::uint16_t max_ip_len = 0;
  std::array<std::uint64_t, kSizeBucketCount> size_buckets{};

  DnsState dns;
  std::uint16_t ftp_return_code = 0;
  std::optional<IcmpFields> icmp;

  std::uint64_t packets() const noexcept { return client.packets + server.packets; }
  bool is_dns() const noexcept;
  bool is_ftp_control() const noexcept;
};

/// Folds one packet into the flow.
void accumulate(FlowAccumulator& acc, const PacketRecord& pkt, Direction direction);

/// Builds the feature record. Rates use the flow duration in whole
/// milliseconds as divisor, or one second when that is zero. Throws
/// EmptyFlow for an accumulator that has seen no packets.
FlowRecord finalize(const FlowAccumulator& acc, const L7Table& l7_table);

inline FlowTiming timing_of(const FlowAccumulator& acc) {
  return {acc.first_seen_us, acc.last_seen_us};
}

} // namespace nfmeter
