#include "nfmeter/pcap.hpp"

#include <array>
#include <cstring>

#include "nfmeter/errors.hpp"

namespace nfmeter {

namespace {

constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;
// Upper bound on a single record; anything larger means a corrupt header.
constexpr std::uint32_t kMaxRecordLen = 256 * 1024;

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) | (v >> 24);
}

std::uint32_t load_host32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

} // namespace

PcapReader::PcapReader(const std::filesystem::path& path) : path_(path), buffer_(1 << 20) {
  in_.rdbuf()->pubsetbuf(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  in_.open(path, std::ios::binary);
  if (!in_) throw IoError("cannot open " + path.string());

  std::array<std::uint8_t, kGlobalHeaderLen> header{};
  in_.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in_.gcount() != static_cast<std::streamsize>(header.size())) {
    throw UnsupportedFormat(path.string() + ": too short for a pcap header");
  }
  const std::uint32_t magic = load_host32(header.data());
  if (magic == kPcapMagicMicro || magic == kPcapMagicNano) {
    swapped_ = false;
  } else if (byteswap32(magic) == kPcapMagicMicro || byteswap32(magic) == kPcapMagicNano) {
    swapped_ = true;
  } else {
    throw UnsupportedFormat(path.string() + ": unrecognised pcap magic");
  }
  const std::uint32_t native = swapped_ ? byteswap32(magic) : magic;
  resolution_ = native == kPcapMagicNano ? TimestampResolution::Nano : TimestampResolution::Micro;
  snap_length_ = read_u32(header.data() + 16);
  // Upper bits of the link-type word carry FCS info in some writers.
  link_type_ = read_u32(header.data() + 20) & 0x0fffffff;
  if (link_type_ != kLinkTypeEthernet) {
    throw UnsupportedFormat(path.string() + ": link type " + std::to_string(link_type_) +
                            " is not Ethernet");
  }
}

std::uint32_t PcapReader::read_u32(const std::uint8_t* p) const {
  const std::uint32_t v = load_host32(p);
  return swapped_ ? byteswap32(v) : v;
}

std::optional<RawFrame> PcapReader::next() {
  RawFrame frame;
  if (!next(frame)) return std::nullopt;
  return frame;
}

bool PcapReader::next(RawFrame& frame) {
  std::array<std::uint8_t, kRecordHeaderLen> header{};
  in_.read(reinterpret_cast<char*>(header.data()), header.size());
  const auto got = in_.gcount();
  if (got == 0) return false;
  const auto where = [&] {
    return path_.string() + ": record " + std::to_string(record_index_ + 1);
  };
  if (got != static_cast<std::streamsize>(header.size())) {
    throw TruncatedFile(where() + " header cut short");
  }
  const std::uint32_t ts_sec = read_u32(header.data());
  const std::uint32_t ts_frac = read_u32(header.data() + 4);
  const std::uint32_t caplen = read_u32(header.data() + 8);
  const std::uint32_t wirelen = read_u32(header.data() + 12);
  if (caplen > kMaxRecordLen) throw UnsupportedFormat(where() + " has implausible length");

  frame.data.resize(caplen);
  in_.read(reinterpret_cast<char*>(frame.data.data()), caplen);
  if (in_.gcount() != static_cast<std::streamsize>(caplen)) {
    throw TruncatedFile(where() + " data cut short");
  }
  const std::int64_t frac_us =
      resolution_ == TimestampResolution::Nano ? ts_frac / 1000 : ts_frac;
  frame.timestamp_us = std::int64_t{ts_sec} * 1'000'000 + frac_us;
  frame.wire_length = wirelen;
  ++record_index_;
  return true;
}

PcapWriter::PcapWriter(const std::filesystem::path& path, TimestampResolution resolution,
                       std::uint32_t snap_length, std::uint32_t link_type)
    : out_(path, std::ios::binary | std::ios::trunc), resolution_(resolution),
      snap_length_(snap_length) {
  if (!out_) throw IoError("cannot create " + path.string());
  put<std::uint32_t>(out_, resolution == TimestampResolution::Nano ? kPcapMagicNano
                                                                   : kPcapMagicMicro);
  put<std::uint16_t>(out_, 2);
  put<std::uint16_t>(out_, 4);
  put<std::int32_t>(out_, 0);
  put<std::uint32_t>(out_, 0);
  put<std::uint32_t>(out_, snap_length);
  put<std::uint32_t>(out_, link_type);
}

void PcapWriter::write(std::uint64_t timestamp, std::span<const std::uint8_t> frame,
                       std::optional<std::uint32_t> wire_length) {
  const std::uint64_t per_second = resolution_ == TimestampResolution::Nano ? 1'000'000'000 : 1'000'000;
  const auto caplen = static_cast<std::uint32_t>(std::min<std::size_t>(frame.size(), snap_length_));
  put<std::uint32_t>(out_, static_cast<std::uint32_t>(timestamp / per_second));
  put<std::uint32_t>(out_, static_cast<std::uint32_t>(timestamp % per_second));
  put<std::uint32_t>(out_, caplen);
  put<std::uint32_t>(out_, wire_length.value_or(static_cast<std::uint32_t>(frame.size())));
  out_.write(reinterpret_cast<const char*>(frame.data()), caplen);
  if (!out_) throw IoError("pcap write failed");
}

void PcapWriter::flush() { out_.flush(); }

std::uint64_t CaptureStats::skipped_total() const {
  std::uint64_t total = 0;
  for (const auto& [reason, count] : skipped) total += count;
  return total;
}

std::optional<PacketRecord> CaptureReader::next() {
  while (reader_.next(frame_)) {
    ++stats_.frames;
    auto decoded = decode_packet(frame_.data, reader_.link_type(), frame_.timestamp_us,
                                 frame_.wire_length);
    if (auto* pkt = std::get_if<PacketRecord>(&decoded)) {
      ++stats_.decoded;
      return std::move(*pkt);
    }
    ++stats_.skipped[std::get<SkipReason>(decoded)];
  }
  return std::nullopt;
}

bool looks_like_pcap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<std::uint8_t, 4> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), magic.size());
  if (in.gcount() != 4) return false;
  const std::uint32_t v = load_host32(magic.data());
  return v == kPcapMagicMicro || v == kPcapMagicNano || byteswap32(v) == kPcapMagicMicro ||
         byteswap32(v) == kPcapMagicNano;
}

} // namespace nfmeter
