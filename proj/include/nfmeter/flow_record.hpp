#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "nfmeter/packet.hpp"

namespace nfmeter {

/// The 43 NetFlow v9 based features of one finished flow.
///
/// IN/src->dst fields describe the client->server direction of the flow.
/// Packet sizes and byte counters use the IP total-length field.
struct FlowRecord {
  Ipv4Addr ipv4_src_addr;
  Ipv4Addr ipv4_dst_addr;
  std::uint64_t l4_src_port = 0;
  std::uint64_t l4_dst_port = 0;
  std::uint64_t protocol = 0;
  std::uint64_t l7_proto = 0;
  std::uint64_t in_bytes = 0;
  std::uint64_t out_bytes = 0;
  std::uint64_t in_pkts = 0;
  std::uint64_t out_pkts = 0;
  std::uint64_t flow_duration_milliseconds = 0;
  std::uint64_t tcp_flags = 0;
  std::uint64_t client_tcp_flags = 0;
  std::uint64_t server_tcp_flags = 0;
  std::uint64_t duration_in = 0;
  std::uint64_t duration_out = 0;
  std::uint64_t min_ttl = 0;
  std::uint64_t max_ttl = 0;
  std::uint64_t longest_flow_pkt = 0;
  std::uint64_t shortest_flow_pkt = 0;
  std::uint64_t min_ip_pkt_len = 0;
  std::uint64_t max_ip_pkt_len = 0;
  double src_to_dst_second_bytes = 0;
  double dst_to_src_second_bytes = 0;
  std::uint64_t retransmitted_in_bytes = 0;
  std::uint64_t retransmitted_in_pkts = 0;
  std::uint64_t retransmitted_out_bytes = 0;
  std::uint64_t retransmitted_out_pkts = 0;
  double src_to_dst_avg_throughput = 0;
  double dst_to_src_avg_throughput = 0;
  std::uint64_t num_pkts_up_to_128_bytes = 0;
  std::uint64_t num_pkts_128_to_256_bytes = 0;
  std::uint64_t num_pkts_256_to_512_bytes = 0;
  std::uint64_t num_pkts_512_to_1024_bytes = 0;
  std::uint64_t num_pkts_1024_to_1514_bytes = 0;
  std::uint64_t tcp_win_max_in = 0;
  std::uint64_t tcp_win_max_out = 0;
  std::uint64_t icmp_type = 0;
  std::uint64_t icmp_ipv4_type = 0;
  std::uint64_t dns_query_id = 0;
  std::uint64_t dns_query_type = 0;
  std::uint64_t dns_ttl_answer = 0;
  std::uint64_t ftp_command_ret_code = 0;

  bool operator==(const FlowRecord&) const = default;
};

using FieldMember = std::variant<Ipv4Addr FlowRecord::*, std::uint64_t FlowRecord::*,
                                 double FlowRecord::*>;

struct FeatureColumn {
  std::string_view name;
  FieldMember member;
};

inline constexpr std::size_t kExtendedFeatureCount = 43;
inline constexpr std::size_t kBasicFeatureCount = 12;

/// Column order of the extended feature set.
extern const std::array<FeatureColumn, kExtendedFeatureCount> kFeatureColumns;

/// Positions in kFeatureColumns of the basic feature set, in output order.
extern const std::array<std::size_t, kBasicFeatureCount> kBasicFeatureIndices;

enum class FeatureSet { Basic, Extended };

std::optional<std::size_t> feature_index(std::string_view name);

/// Copies only the basic-set columns; every other feature is zero.
FlowRecord project_basic(const FlowRecord& record);

/// Flow start and end, microseconds since the epoch. Not part of the CSV
/// schema; available only when records come straight from extraction.
struct FlowTiming {
  std::int64_t first_seen_us = 0;
  std::int64_t last_seen_us = 0;

  bool operator==(const FlowTiming&) const = default;
};

} // namespace nfmeter
