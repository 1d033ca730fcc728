#include "nfmeter/accumulator.hpp"

#include <algorithm>

#include "nfmeter/errors.hpp"
#include "nfmeter/protocols.hpp"

namespace nfmeter {

namespace {

constexpr std::uint16_t kDnsPort = 53;
constexpr std::uint16_t kFtpControlPort = 21;

std::uint64_t duration_ms(std::int64_t first_us, std::int64_t last_us) {
  return last_us > first_us ? static_cast<std::uint64_t>(last_us - first_us) / 1000 : 0;
}

} // namespace

bool SequenceTracker::observe(std::uint32_t seq, std::uint32_t payload_len) {
  if (payload_len == 0) return false;
  const std::uint32_t end = seq + payload_len;
  if (!seen_) {
    seen_ = true;
    boundary_ = end;
    return false;
  }
  const bool covered = !seq_before(boundary_, end);
  if (seq_before(boundary_, end)) boundary_ = end;
  return covered;
}

bool FlowAccumulator::is_dns() const noexcept {
  return key.l4_protocol == ipproto::kUdp &&
         (key.client_port == kDnsPort || key.server_port == kDnsPort);
}

bool FlowAccumulator::is_ftp_control() const noexcept {
  return key.l4_protocol == ipproto::kTcp &&
         (key.client_port == kFtpControlPort || key.server_port == kFtpControlPort);
}

void accumulate(FlowAccumulator& acc, const PacketRecord& pkt, Direction direction) {
  DirectionState& dir = direction == Direction::ClientToServer ? acc.client : acc.server;
  const std::int64_t ts = pkt.timestamp_us;

  if (dir.packets == 0) {
    dir.first_us = dir.last_us = ts;
  } else {
    dir.first_us = std::min(dir.first_us, ts);
    dir.last_us = std::max(dir.last_us, ts);
  }
  const bool first_packet = acc.packets() == 0;
  ++dir.packets;
  dir.bytes += pkt.ip_total_length;
  acc.first_seen_us = std::min(acc.first_seen_us, ts);
  acc.last_seen_us = std::max(acc.last_seen_us, ts);

  if (first_packet) {
    acc.min_ttl = acc.max_ttl = pkt.ttl;
    acc.min_ip_len = acc.max_ip_len = pkt.ip_total_length;
  } else {
    acc.min_ttl = std::min(acc.min_ttl, pkt.ttl);
    acc.max_ttl = std::max(acc.max_ttl, pkt.ttl);
    acc.min_ip_len = std::min(acc.min_ip_len, pkt.ip_total_length);
    acc.max_ip_len = std::max(acc.max_ip_len, pkt.ip_total_length);
  }
  for (std::size_t b = 0; b < kSizeBucketCount; ++b) {
    if (pkt.ip_total_length <= kSizeBucketLimits[b]) {
      ++acc.size_buckets[b];
      break;
    }
  }

  if (pkt.tcp) {
    dir.tcp_flags |= pkt.tcp->flags;
    dir.max_window = std::max(dir.max_window, pkt.tcp->window);
    if (pkt.tcp->payload_len > 0 &&
        detect_retransmission(dir.sequence, pkt.tcp->seq, pkt.tcp->payload_len)) {
      ++dir.retransmitted_packets;
      dir.retransmitted_bytes += pkt.ip_total_length;
    }
    if (acc.is_ftp_control() && pkt.src_port == kFtpControlPort && !pkt.payload.empty()) {
      if (auto code = parse_ftp_response(pkt.payload)) acc.ftp_return_code = *code;
    }
  }

  if (pkt.icmp && !acc.icmp) acc.icmp = pkt.icmp;

  if (acc.is_dns() && !pkt.payload.empty() && (!acc.dns.query_seen || !acc.dns.answer_seen)) {
    if (auto msg = parse_dns(pkt.payload)) {
      if (!msg->is_response && !acc.dns.query_seen) {
        acc.dns.query_seen = true;
        acc.dns.query_id = msg->id;
        acc.dns.query_type = msg->query_type;
      } else if (msg->is_response && msg->first_a_ttl && !acc.dns.answer_seen) {
        acc.dns.answer_seen = true;
        acc.dns.a_record_ttl = *msg->first_a_ttl;
      }
    }
  }
}

FlowRecord finalize(const FlowAccumulator& acc, const L7Table& l7_table) {
  if (acc.packets() == 0) throw EmptyFlow("cannot finalize a flow without packets");

  FlowRecord r;
  r.ipv4_src_addr = acc.key.client_ip;
  r.ipv4_dst_addr = acc.key.server_ip;
  r.l4_src_port = acc.key.client_port;
  r.l4_dst_port = acc.key.server_port;
  r.protocol = acc.key.l4_protocol;
  r.l7_proto = classify_l7(acc.key, l7_table);

  r.in_bytes = acc.client.bytes;
  r.out_bytes = acc.server.bytes;
  r.in_pkts = acc.client.packets;
  r.out_pkts = acc.server.packets;
  r.flow_duration_milliseconds = duration_ms(acc.first_seen_us, acc.last_seen_us);

  r.client_tcp_flags = acc.client.tcp_flags;
  r.server_tcp_flags = acc.server.tcp_flags;
  r.tcp_flags = r.client_tcp_flags | r.server_tcp_flags;

  r.duration_in = acc.client.packets >= 2 ? duration_ms(acc.client.first_us, acc.client.last_us) : 0;
  r.duration_out = acc.server.packets >= 2 ? duration_ms(acc.server.first_us, acc.server.last_us) : 0;

  r.min_ttl = acc.min_ttl;
  r.max_ttl = acc.max_ttl;
  r.longest_flow_pkt = acc.max_ip_len;
  r.shortest_flow_pkt = acc.min_ip_len;
  r.min_ip_pkt_len = acc.min_ip_len;
  r.max_ip_pkt_len = acc.max_ip_len;

  const double seconds =
      r.flow_duration_milliseconds == 0 ? 1.0 : static_cast<double>(r.flow_duration_milliseconds) / 1000.0;
  r.src_to_dst_second_bytes = static_cast<double>(r.in_bytes) / seconds;
  r.dst_to_src_second_bytes = static_cast<double>(r.out_bytes) / seconds;
  r.src_to_dst_avg_throughput = 8.0 * static_cast<double>(r.in_bytes) / seconds;
  r.dst_to_src_avg_throughput = 8.0 * static_cast<double>(r.out_bytes) / seconds;

  r.retransmitted_in_bytes = acc.client.retransmitted_bytes;
  r.retransmitted_in_pkts = acc.client.retransmitted_packets;
  r.retransmitted_out_bytes = acc.server.retransmitted_bytes;
  r.retransmitted_out_pkts = acc.server.retransmitted_packets;

  r.num_pkts_up_to_128_bytes = acc.size_buckets[0];
  r.num_pkts_128_to_256_bytes = acc.size_buckets[1];
  r.num_pkts_256_to_512_bytes = acc.size_buckets[2];
  r.num_pkts_512_to_1024_bytes = acc.size_buckets[3];
  r.num_pkts_1024_to_1514_bytes = acc.size_buckets[4];

  r.tcp_win_max_in = acc.client.max_window;
  r.tcp_win_max_out = acc.server.max_window;

  if (acc.icmp) {
    r.icmp_type = std::uint64_t{acc.icmp->type} * 256 + acc.icmp->code;
    r.icmp_ipv4_type = acc.icmp->type;
  }
  r.dns_query_id = acc.dns.query_id;
  r.dns_query_type = acc.dns.query_type;
  r.dns_ttl_answer = acc.dns.a_record_ttl;
  r.ftp_command_ret_code = acc.ftp_return_code;
  return r;
}

} // namespace nfmeter
