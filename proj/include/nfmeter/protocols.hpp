#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace nfmeter {

/// Fields of interest from one DNS message.
struct DnsMessageInfo {
  std::uint16_t id = 0;
  bool is_response = false;
  /// QTYPE of the first question, 0 when the message carries none.
  std::uint16_t query_type = 0;
  /// TTL of the first answer record of type A (responses only).
  std::optional<std::uint32_t> first_a_ttl;
};

/// Parses a DNS message carried over UDP. Returns nullopt for anything that
/// does not parse cleanly up to the fields needed.
std::optional<DnsMessageInfo> parse_dns(std::span<const std::uint8_t> payload);

/// Reply code of an FTP control-channel response: three ASCII digits at the
/// start of the payload followed by a space or hyphen.
std::optional<std::uint16_t> parse_ftp_response(std::span<const std::uint8_t> payload);

} // namespace nfmeter
