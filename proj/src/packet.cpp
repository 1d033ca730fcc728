#include "nfmeter/packet.hpp"

#include <charconv>

namespace nfmeter {

namespace {

constexpr std::size_t kEthHeaderLen = 14;
constexpr std::size_t kVlanTagLen = 4;
constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
constexpr std::uint16_t kEtherTypeIpv6 = 0x86dd;
constexpr std::uint16_t kEtherTypeVlan = 0x8100;
constexpr std::uint16_t kEtherTypeQinQ = 0x88a8;

std::uint16_t load_be16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}

std::uint32_t load_be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

} // namespace

std::string Ipv4Addr::to_string() const {
  std::string out;
  out.reserve(15);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out += std::to_string((value_ >> shift) & 0xff);
    if (shift != 0) out += '.';
  }
  return out;
}

std::optional<Ipv4Addr> Ipv4Addr::parse(std::string_view text) {
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 4; ++i) {
    if (i > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    unsigned octet = 0;
    auto [next, ec] = std::from_chars(p, end, octet);
    if (ec != std::errc{} || next == p || next - p > 3 || octet > 255) return std::nullopt;
    // no leading zeros ("010" is ambiguous)
    if (next - p > 1 && *p == '0') return std::nullopt;
    value = (value << 8) | octet;
    p = next;
  }
  if (p != end) return std::nullopt;
  return Ipv4Addr{value};
}

std::string_view to_string(SkipReason reason) {
  switch (reason) {
  case SkipReason::NotIpv4: return "not-ipv4";
  case SkipReason::Ipv6: return "ipv6";
  case SkipReason::StackedVlan: return "stacked-vlan";
  case SkipReason::UnsupportedLink: return "unsupported-link";
  case SkipReason::Malformed: return "malformed";
  }
  return "unknown";
}

DecodeResult decode_packet(std::span<const std::uint8_t> frame, std::uint32_t link_type,
                           std::int64_t timestamp_us,
                           std::optional<std::uint32_t> wire_length) {
  if (link_type != kLinkTypeEthernet) return SkipReason::UnsupportedLink;
  if (frame.size() < kEthHeaderLen) return SkipReason::Malformed;

  std::size_t offset = kEthHeaderLen;
  std::uint16_t ethertype = load_be16(frame, 12);
  if (ethertype == kEtherTypeVlan) {
    if (frame.size() < offset + kVlanTagLen) return SkipReason::Malformed;
    ethertype = load_be16(frame, offset + 2);
    offset += kVlanTagLen;
    if (ethertype == kEtherTypeVlan || ethertype == kEtherTypeQinQ) return SkipReason::StackedVlan;
  } else if (ethertype == kEtherTypeQinQ) {
    return SkipReason::StackedVlan;
  }
  if (ethertype == kEtherTypeIpv6) return SkipReason::Ipv6;
  if (ethertype != kEtherTypeIpv4) return SkipReason::NotIpv4;

  const auto ip = frame.subspan(offset);
  if (ip.size() < 20) return SkipReason::Malformed;
  const unsigned version = ip[0] >> 4;
  const std::size_t ihl = std::size_t{ip[0] & 0x0fu} * 4;
  const std::uint16_t total_length = load_be16(ip, 2);
  if (version != 4 || ihl < 20 || total_length < ihl || ip.size() < ihl) {
    return SkipReason::Malformed;
  }
  if (wire_length && *wire_length >= offset && total_length > *wire_length - offset) {
    return SkipReason::Malformed;
  }

  PacketRecord pkt;
  pkt.timestamp_us = timestamp_us;
  pkt.ip_total_length = total_length;
  pkt.ttl = ip[8];
  pkt.l4_protocol = ip[9];
  pkt.src_ip = Ipv4Addr{load_be32(ip, 12)};
  pkt.dst_ip = Ipv4Addr{load_be32(ip, 16)};

  const std::uint16_t fragment_offset = load_be16(ip, 6) & 0x1fff;
  if (fragment_offset != 0) return pkt;

  // Bytes of the transport segment per the IP header, and how many of them
  // were actually captured (ethernet padding excluded).
  const std::size_t l4_len = total_length - ihl;
  const auto l4 = ip.subspan(ihl, std::min(l4_len, ip.size() - ihl));

  switch (pkt.l4_protocol) {
  case ipproto::kTcp: {
    if (l4_len < 20) return SkipReason::Malformed;
    if (l4.size() < 20) return pkt;
    const std::size_t data_offset = static_cast<std::size_t>(l4[12] >> 4) * 4;
    if (data_offset < 20 || data_offset > l4_len) return SkipReason::Malformed;
    if (l4.size() < data_offset) return pkt;
    pkt.src_port = load_be16(l4, 0);
    pkt.dst_port = load_be16(l4, 2);
    TcpFields tcp;
    tcp.seq = load_be32(l4, 4);
    tcp.flags = l4[13];
    tcp.window = load_be16(l4, 14);
    tcp.payload_len = static_cast<std::uint32_t>(l4_len - data_offset);
    pkt.tcp = tcp;
    pkt.payload.assign(l4.begin() + static_cast<std::ptrdiff_t>(data_offset), l4.end());
    break;
  }
  case ipproto::kUdp: {
    if (l4_len < 8) return SkipReason::Malformed;
    if (l4.size() < 8) return pkt;
    const std::uint16_t udp_len = load_be16(l4, 4);
    if (udp_len < 8 || udp_len > l4_len) return SkipReason::Malformed;
    pkt.src_port = load_be16(l4, 0);
    pkt.dst_port = load_be16(l4, 2);
    const std::size_t payload_end = std::min<std::size_t>(udp_len, l4.size());
    pkt.payload.assign(l4.begin() + 8, l4.begin() + static_cast<std::ptrdiff_t>(payload_end));
    break;
  }
  case ipproto::kIcmp: {
    if (l4_len < 4) return SkipReason::Malformed;
    if (l4.size() < 2) return pkt;
    pkt.icmp = IcmpFields{l4[0], l4[1]};
    if (l4.size() > 4) pkt.payload.assign(l4.begin() + 4, l4.end());
    break;
  }
  default:
    pkt.payload.assign(l4.begin(), l4.end());
    break;
  }
  return pkt;
}

} // namespace nfmeter
