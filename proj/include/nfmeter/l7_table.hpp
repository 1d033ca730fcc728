#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string_view>
#include <utility>

#include "nfmeter/flow_key.hpp"

namespace nfmeter {

/// Port based application protocol table. Ids follow nDPI numbering.
///
/// File format, one entry per line: `protocol,port,id`, where protocol is
/// `tcp`, `udp` or an IP protocol number. Blank lines and lines starting
/// with `#` are ignored; anything else that does not parse is rejected.
class L7Table {
public:
  static L7Table defaults();
  static L7Table load(const std::filesystem::path& path);
  static L7Table parse(std::string_view text, std::string_view origin = "<l7 table>");

  void set(std::uint8_t l4_protocol, std::uint16_t port, std::uint16_t id);

  /// 0 when the port is unmapped.
  std::uint16_t lookup(std::uint8_t l4_protocol, std::uint16_t port) const;

  std::size_t size() const noexcept { return entries_.size(); }

private:
  std::map<std::pair<std::uint8_t, std::uint16_t>, std::uint16_t> entries_;
};

namespace l7 {
inline constexpr std::uint16_t kUnknown = 0;
inline constexpr std::uint16_t kFtpControl = 1;
inline constexpr std::uint16_t kPop3 = 2;
inline constexpr std::uint16_t kSmtp = 3;
inline constexpr std::uint16_t kImap = 4;
inline constexpr std::uint16_t kDns = 5;
inline constexpr std::uint16_t kHttp = 7;
inline constexpr std::uint16_t kNtp = 9;
inline constexpr std::uint16_t kSnmp = 14;
inline constexpr std::uint16_t kDhcp = 18;
inline constexpr std::uint16_t kTelnet = 70;
inline constexpr std::uint16_t kTls = 91;
inline constexpr std::uint16_t kSsh = 92;
} // namespace l7

/// Application protocol of a flow, looked up on the lower of its two ports.
std::uint16_t classify_l7(const FlowKey& key, const L7Table& table);

} // namespace nfmeter
