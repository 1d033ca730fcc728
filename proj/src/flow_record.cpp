#include "nfmeter/flow_record.hpp"

namespace nfmeter {

using R = FlowRecord;

const std::array<FeatureColumn, kExtendedFeatureCount> kFeatureColumns{{
    {"IPV4_SRC_ADDR", &R::ipv4_src_addr},
    {"IPV4_DST_ADDR", &R::ipv4_dst_addr},
    {"L4_SRC_PORT", &R::l4_src_port},
    {"L4_DST_PORT", &R::l4_dst_port},
    {"PROTOCOL", &R::protocol},
    {"L7_PROTO", &R::l7_proto},
    {"IN_BYTES", &R::in_bytes},
    {"OUT_BYTES", &R::out_bytes},
    {"IN_PKTS", &R::in_pkts},
    {"OUT_PKTS", &R::out_pkts},
    {"FLOW_DURATION_MILLISECONDS", &R::flow_duration_milliseconds},
    {"TCP_FLAGS", &R::tcp_flags},
    {"CLIENT_TCP_FLAGS", &R::client_tcp_flags},
    {"SERVER_TCP_FLAGS", &R::server_tcp_flags},
    {"DURATION_IN", &R::duration_in},
    {"DURATION_OUT", &R::duration_out},
    {"MIN_TTL", &R::min_ttl},
    {"MAX_TTL", &R::max_ttl},
    {"LONGEST_FLOW_PKT", &R::longest_flow_pkt},
    {"SHORTEST_FLOW_PKT", &R::shortest_flow_pkt},
    {"MIN_IP_PKT_LEN", &R::min_ip_pkt_len},
    {"MAX_IP_PKT_LEN", &R::max_ip_pkt_len},
    {"SRC_TO_DST_SECOND_BYTES", &R::src_to_dst_second_bytes},
    {"DST_TO_SRC_SECOND_BYTES", &R::dst_to_src_second_bytes},
    {"RETRANSMITTED_IN_BYTES", &R::retransmitted_in_bytes},
    {"RETRANSMITTED_IN_PKTS", &R::retransmitted_in_pkts},
    {"RETRANSMITTED_OUT_BYTES", &R::retransmitted_out_bytes},
    {"RETRANSMITTED_OUT_PKTS", &R::retransmitted_out_pkts},
    {"SRC_TO_DST_AVG_THROUGHPUT", &R::src_to_dst_avg_throughput},
    {"DST_TO_SRC_AVG_THROUGHPUT", &R::dst_to_src_avg_throughput},
    {"NUM_PKTS_UP_TO_128_BYTES", &R::num_pkts_up_to_128_bytes},
    {"NUM_PKTS_128_TO_256_BYTES", &R::num_pkts_128_to_256_bytes},
    {"NUM_PKTS_256_TO_512_BYTES", &R::num_pkts_256_to_512_bytes},
    {"NUM_PKTS_512_TO_1024_BYTES", &R::num_pkts_512_to_1024_bytes},
    {"NUM_PKTS_1024_TO_1514_BYTES", &R::num_pkts_1024_to_1514_bytes},
    {"TCP_WIN_MAX_IN", &R::tcp_win_max_in},
    {"TCP_WIN_MAX_OUT", &R::tcp_win_max_out},
    {"ICMP_TYPE", &R::icmp_type},
    {"ICMP_IPV4_TYPE", &R::icmp_ipv4_type},
    {"DNS_QUERY_ID", &R::dns_query_id},
    {"DNS_QUERY_TYPE", &R::dns_query_type},
    {"DNS_TTL_ANSWER", &R::dns_ttl_answer},
    {"FTP_COMMAND_RET_CODE", &R::ftp_command_ret_code},
}};

// IPV4_SRC_ADDR, IPV4_DST_ADDR, L4_SRC_PORT, L4_DST_PORT, PROTOCOL, L7_PROTO,
// IN_BYTES, OUT_BYTES, IN_PKTS, OUT_PKTS, TCP_FLAGS, FLOW_DURATION_MILLISECONDS
const std::array<std::size_t, kBasicFeatureCount> kBasicFeatureIndices{
    0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 10};

std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureColumns.size(); ++i) {
    if (kFeatureColumns[i].name == name) return i;
  }
  return std::nullopt;
}

FlowRecord project_basic(const FlowRecord& record) {
  FlowRecord out;
  for (const std::size_t index : kBasicFeatureIndices) {
    std::visit([&](auto member) { out.*member = record.*member; }, kFeatureColumns[index].member);
  }
  return out;
}

} // namespace nfmeter
