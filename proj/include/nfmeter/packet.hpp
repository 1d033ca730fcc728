#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nfmeter {

/// IPv4 address in host byte order.
class Ipv4Addr {
public:
  constexpr Ipv4Addr() = default;
  constexpr explicit Ipv4Addr(std::uint32_t value) : value_(value) {}
  constexpr Ipv4Addr(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) |
               (std::uint32_t{c} << 8) | std::uint32_t{d}) {}

  constexpr std::uint32_t value() const noexcept { return value_; }

  std::string to_string() const;
  static std::optional<Ipv4Addr> parse(std::string_view text);

  constexpr auto operator<=>(const Ipv4Addr&) const = default;

private:
  std::uint32_t value_ = 0;
};

namespace ipproto {
inline constexpr std::uint8_t kIcmp = 1;
inline constexpr std::uint8_t kTcp = 6;
inline constexpr std::uint8_t kUdp = 17;
} // namespace ipproto

namespace tcpflag {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kPsh = 0x08;
inline constexpr std::uint8_t kAck = 0x10;
inline constexpr std::uint8_t kUrg = 0x20;
inline constexpr std::uint8_t kEce = 0x40;
inline constexpr std::uint8_t kCwr = 0x80;
} // namespace tcpflag

struct TcpFields {
  std::uint8_t flags = 0;
  std::uint32_t seq = 0;
  std::uint32_t payload_len = 0;
  std::uint16_t window = 0;

  bool operator==(const TcpFields&) const = default;
};

struct IcmpFields {
  std::uint8_t type = 0;
  std::uint8_t code = 0;

  bool operator==(const IcmpFields&) const = default;
};

/// One decoded IPv4 packet.
///
/// `tcp` is set only for TCP packets whose header was captured intact and
/// that are not non-initial fragments; `icmp` likewise for ICMP. Packets
/// whose transport header is missing keep their protocol number but carry
/// ports 0 and no transport fields.
struct PacketRecord {
  std::int64_t timestamp_us = 0;
  Ipv4Addr src_ip;
  Ipv4Addr dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t l4_protocol = 0;
  std::uint16_t ip_total_length = 0;
  std::uint8_t ttl = 0;
  std::optional<TcpFields> tcp;
  std::optional<IcmpFields> icmp;
  /// Transport payload as captured (may be shorter than the header claims).
  std::vector<std::uint8_t> payload;

  bool operator==(const PacketRecord&) const = default;
};

enum class SkipReason {
  NotIpv4,   // ARP and any other ethertype
  Ipv6,
  StackedVlan,
  UnsupportedLink,
  Malformed,
};

std::string_view to_string(SkipReason reason);

using DecodeResult = std::variant<PacketRecord, SkipReason>;

inline constexpr std::uint32_t kLinkTypeEthernet = 1;

/// Decodes one link-layer frame. `wire_length`, when known, is the original
/// frame length before snap-length truncation and is used to tell truncation
/// apart from inconsistent length fields.
DecodeResult decode_packet(std::span<const std::uint8_t> frame, std::uint32_t link_type,
                           std::int64_t timestamp_us = 0,
                           std::optional<std::uint32_t> wire_length = std::nullopt);

} // namespace nfmeter
