#include "doctest.h"

#include <fstream>

#include "frames.hpp"
#include "nfmeter/errors.hpp"
#include "nfmeter/pcap.hpp"
#include "scenarios.hpp"

using namespace nfmeter;
using namespace nfmeter::testing;

namespace {

std::vector<FrameSpec> three_packets() {
  std::vector<FrameSpec> frames(3);
  for (int i = 0; i < 3; ++i) {
    auto& f = frames[i];
    f.timestamp_us = 1'700'000'000'000'000 + i * 1'500'250;
    f.protocol = i == 2 ? ipproto::kUdp : ipproto::kTcp;
    f.src = Ipv4Addr(10, 1, 1, static_cast<std::uint8_t>(i + 1));
    f.dst = Ipv4Addr(10, 2, 2, 2);
    f.src_port = static_cast<std::uint16_t>(1000 + i);
    f.dst_port = 80;
    f.ttl = static_cast<std::uint8_t>(60 + i);
    f.tcp_flags = tcpflag::kAck;
    f.seq = 100u * static_cast<std::uint32_t>(i);
    f.window = 512;
    f.payload = std::vector<std::uint8_t>(static_cast<std::size_t>(10 * i), 0x55);
  }
  return frames;
}

std::vector<PacketRecord> read_all(const std::filesystem::path& path) {
  auto reader = open_capture(path);
  std::vector<PacketRecord> out;
  while (auto pkt = reader.next()) out.push_back(*pkt);
  return out;
}

void check_matches(const std::vector<PacketRecord>& got, const std::vector<FrameSpec>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].timestamp_us == want[i].timestamp_us);
    CHECK(got[i].src_ip == want[i].src);
    CHECK(got[i].dst_ip == want[i].dst);
    CHECK(got[i].src_port == want[i].src_port);
    CHECK(got[i].ttl == want[i].ttl);
    CHECK(got[i].ip_total_length == ip_length_of(want[i]));
    CHECK(got[i].payload == want[i].payload);
  }
}

} // namespace

TEST_CASE("crafted three-packet capture, microsecond magic") {
  const auto dir = scratch_dir("pcap");
  const auto frames = three_packets();
  write_capture(dir / "a.pcap", frames);
  check_matches(read_all(dir / "a.pcap"), frames);
}

TEST_CASE("nanosecond magic truncates to microseconds") {
  const auto dir = scratch_dir("pcap");
  const auto frames = three_packets();
  write_capture(dir / "ns.pcap", frames, TimestampResolution::Nano);
  PcapReader reader(dir / "ns.pcap");
  CHECK(reader.resolution() == TimestampResolution::Nano);
  check_matches(read_all(dir / "ns.pcap"), frames);
}

TEST_CASE("opposite byte order is accepted") {
  const auto dir = scratch_dir("pcap");
  const auto frames = three_packets();
  write_capture(dir / "be.pcap", frames, TimestampResolution::Micro, true);
  CHECK(PcapReader(dir / "be.pcap").swapped());
  check_matches(read_all(dir / "be.pcap"), frames);
  write_capture(dir / "be-ns.pcap", frames, TimestampResolution::Nano, true);
  check_matches(read_all(dir / "be-ns.pcap"), frames);
}

TEST_CASE("library writer output reads back") {
  const auto dir = scratch_dir("pcap");
  const auto frames = three_packets();
  {
    PcapWriter writer(dir / "w.pcap");
    for (const auto& f : frames) writer.write(static_cast<std::uint64_t>(f.timestamp_us), build_frame(f));
  }
  check_matches(read_all(dir / "w.pcap"), frames);
  CHECK(looks_like_pcap(dir / "w.pcap"));
}

TEST_CASE("bad magic and non-Ethernet link types are rejected") {
  const auto dir = scratch_dir("pcap");
  {
    std::ofstream out(dir / "bad.pcap", std::ios::binary);
    out << "this is not a capture file at all";
  }
  CHECK_THROWS_AS(PcapReader(dir / "bad.pcap"), UnsupportedFormat);
  CHECK_FALSE(looks_like_pcap(dir / "bad.pcap"));
  {
    PcapWriter writer(dir / "raw.pcap", TimestampResolution::Micro, 65535, 101);
  }
  CHECK_THROWS_AS(PcapReader(dir / "raw.pcap"), UnsupportedFormat);
  CHECK_THROWS_AS(PcapReader(dir / "missing.pcap"), IoError);
}

TEST_CASE("mid-record EOF yields earlier packets then TruncatedFile") {
  const auto dir = scratch_dir("pcap");
  const auto frames = three_packets();
  write_capture(dir / "t.pcap", frames);
  const auto size = std::filesystem::file_size(dir / "t.pcap");
  std::filesystem::resize_file(dir / "t.pcap", size - 5);

  auto reader = open_capture(dir / "t.pcap");
  std::vector<PacketRecord> got;
  bool truncated = false;
  try {
    while (auto pkt = reader.next()) got.push_back(*pkt);
  } catch (const TruncatedFile&) {
    truncated = true;
  }
  CHECK(truncated);
  CHECK(got.size() == 2);
}

TEST_CASE("capture stats count skipped frames") {
  const auto dir = scratch_dir("pcap");
  std::vector<FrameSpec> frames = three_packets();
  FrameSpec arp;
  arp.kind = FrameKind::Arp;
  frames.insert(frames.begin() + 1, arp);
  FrameSpec v6;
  v6.kind = FrameKind::Ipv6;
  frames.push_back(v6);
  write_capture(dir / "mix.pcap", frames);
  auto reader = open_capture(dir / "mix.pcap");
  std::size_t n = 0;
  while (reader.next()) ++n;
  CHECK(n == 3);
  CHECK(reader.stats().frames == 5);
  CHECK(reader.stats().decoded == 3);
  CHECK(reader.stats().skipped.at(SkipReason::NotIpv4) == 1);
  CHECK(reader.stats().skipped.at(SkipReason::Ipv6) == 1);
  CHECK(reader.stats().skipped_total() == 2);
}
