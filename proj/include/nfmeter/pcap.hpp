#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nfmeter/packet.hpp"

namespace nfmeter {

enum class TimestampResolution { Micro, Nano };

inline constexpr std::uint32_t kPcapMagicMicro = 0xa1b2c3d4;
inline constexpr std::uint32_t kPcapMagicNano = 0xa1b23c4d;

/// One raw record of a classic pcap file.
struct RawFrame {
  std::int64_t timestamp_us = 0;
  std::uint32_t wire_length = 0;
  std::vector<std::uint8_t> data;
};

/// Sequential reader for classic (non-ng) pcap files.
///
/// Accepts both byte orders and both the microsecond and nanosecond magic.
/// Only Ethernet captures are accepted. A record cut short by end of file
/// raises TruncatedFile after every complete record before it was returned.
class PcapReader {
public:
  explicit PcapReader(const std::filesystem::path& path);

  /// Next record, or nullopt at a clean end of file.
  std::optional<RawFrame> next();
  bool next(RawFrame& frame);

  std::uint32_t link_type() const noexcept { return link_type_; }
  std::uint32_t snap_length() const noexcept { return snap_length_; }
  TimestampResolution resolution() const noexcept { return resolution_; }
  bool swapped() const noexcept { return swapped_; }

private:
  std::uint32_t read_u32(const std::uint8_t* p) const;

  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<char> buffer_;
  bool swapped_ = false;
  TimestampResolution resolution_ = TimestampResolution::Micro;
  std::uint32_t link_type_ = 0;
  std::uint32_t snap_length_ = 0;
  std::uint64_t record_index_ = 0;
};

/// Writes classic pcap files in host byte order.
class PcapWriter {
public:
  PcapWriter(const std::filesystem::path& path,
             TimestampResolution resolution = TimestampResolution::Micro,
             std::uint32_t snap_length = 65535, std::uint32_t link_type = kLinkTypeEthernet);

  /// Writes one record; `timestamp` is in the file's resolution. The
  /// captured bytes are cut to the snap length; the wire length defaults to
  /// the full frame length.
  void write(std::uint64_t timestamp, std::span<const std::uint8_t> frame,
             std::optional<std::uint32_t> wire_length = std::nullopt);
  void flush();

private:
  std::ofstream out_;
  TimestampResolution resolution_;
  std::uint32_t snap_length_;
};

struct CaptureStats {
  std::uint64_t frames = 0;
  std::uint64_t decoded = 0;
  std::map<SkipReason, std::uint64_t> skipped;

  std::uint64_t skipped_total() const;
};

/// A pcap file viewed as a stream of decoded IPv4 packets.
class CaptureReader {
public:
  explicit CaptureReader(const std::filesystem::path& path) : reader_(path) {}

  /// Next decodable packet; frames that decode to Skip are counted and
  /// passed over. Propagates TruncatedFile from the underlying reader.
  std::optional<PacketRecord> next();

  const CaptureStats& stats() const noexcept { return stats_; }

private:
  PcapReader reader_;
  RawFrame frame_;
  CaptureStats stats_;
};

inline CaptureReader open_capture(const std::filesystem::path& path) {
  return CaptureReader{path};
}

/// True when the file starts with a classic pcap magic number.
bool looks_like_pcap(const std::filesystem::path& path);

} // namespace nfmeter
