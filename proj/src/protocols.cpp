#include "nfmeter/protocols.hpp"

#include <cstddef>

namespace nfmeter {

namespace {

constexpr std::size_t kDnsHeaderLen = 12;
constexpr std::uint16_t kTypeA = 1;
constexpr int kMaxPointerHops = 32;
constexpr std::size_t kMaxNameLen = 255;

std::uint16_t be16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

/// Walks an encoded name starting at `offset` and returns the offset just past
/// it in the original position. Compression pointers are followed to
/// validate the full name; every hop must go strictly backwards and the hop
/// count is bounded, so crafted pointer loops terminate.
std::optional<std::size_t> skip_name(std::span<const std::uint8_t> msg, std::size_t offset) {
  std::optional<std::size_t> resume;
  std::size_t pos = offset;
  std::size_t name_len = 0;
  int hops = 0;
  while (true) {
    if (pos >= msg.size()) return std::nullopt;
    const std::uint8_t len = msg[pos];
    if ((len & 0xc0) == 0xc0) {
      if (pos + 1 >= msg.size()) return std::nullopt;
      const std::size_t target = ((len & 0x3fu) << 8) | msg[pos + 1];
      if (!resume) resume = pos + 2;
      if (target >= pos || ++hops > kMaxPointerHops) return std::nullopt;
      pos = target;
      continue;
    }
    if ((len & 0xc0) != 0) return std::nullopt;
    if (len == 0) return resume ? *resume : pos + 1;
    name_len += len + 1u;
    if (name_len > kMaxNameLen) return std::nullopt;
    pos += 1u + len;
  }
}

} // namespace

std::optional<DnsMessageInfo> parse_dns(std::span<const std::uint8_t> payload) {
  if (payload.size() < kDnsHeaderLen) return std::nullopt;
  DnsMessageInfo info;
  info.id = be16(payload, 0);
  info.is_response = (payload[2] & 0x80) != 0;
  const std::uint16_t questions = be16(payload, 4);
  const std::uint16_t answers = be16(payload, 6);

  std::size_t pos = kDnsHeaderLen;
  for (std::uint16_t q = 0; q < questions; ++q) {
    auto end = skip_name(payload, pos);
    if (!end || *end + 4 > payload.size()) return std::nullopt;
    if (q == 0) info.query_type = be16(payload, *end);
    pos = *end + 4;
    // a query needs only its first question
    if (!info.is_response) return info;
  }
  if (!info.is_response) return info;

  for (std::uint16_t a = 0; a < answers; ++a) {
    auto end = skip_name(payload, pos);
    if (!end || *end + 10 > payload.size()) return std::nullopt;
    const std::uint16_t type = be16(payload, *end);
    const std::uint32_t ttl = be32(payload, *end + 4);
    const std::uint16_t rdlength = be16(payload, *end + 8);
    if (*end + 10 + rdlength > payload.size()) return std::nullopt;
    if (type == kTypeA) {
      info.first_a_ttl = ttl;
      break;
    }
    pos = *end + 10 + rdlength;
  }
  return info;
}

std::optional<std::uint16_t> parse_ftp_response(std::span<const std::uint8_t> payload) {
  if (payload.size() < 4) return std::nullopt;
  std::uint16_t code = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (payload[i] < '0' || payload[i] > '9') return std::nullopt;
    code = static_cast<std::uint16_t>(code * 10 + (payload[i] - '0'));
  }
  if (payload[3] != ' ' && payload[3] != '-') return std::nullopt;
  return code;
}

} // namespace nfmeter
