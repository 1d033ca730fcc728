#include "doctest.h"

#include <fstream>
#include <random>

#include "nfmeter/errors.hpp"
#include "nfmeter/pipeline.hpp"
#include "oracle.hpp"

using namespace nfmeter;
using namespace nfmeter::testing;

TEST_CASE("crafted scenarios match the reference computation") {
  const auto dir = scratch_dir("pipeline");
  const auto scenarios = crafted_scenarios();
  CHECK(scenarios.size() >= 20);
  for (const auto& scenario : scenarios) {
    CAPTURE(scenario.name);
    for (const unsigned workers : {1u, 3u}) {
      const auto outcome = check_scenario(scenario, dir, workers);
      CHECK(outcome.flows > 0);
      for (const auto& m : outcome.mismatches) FAIL_CHECK(m);
    }
  }
}

TEST_CASE("scenarios under short timeouts") {
  const auto dir = scratch_dir("pipeline_short");
  for (const auto& scenario : crafted_scenarios()) {
    CAPTURE(scenario.name);
    const auto outcome = check_scenario(scenario, dir, 2, FlowTimeouts{50'000, 200'000});
    for (const auto& m : outcome.mismatches) FAIL_CHECK(m);
  }
}

namespace {

std::vector<PacketRecord> random_packets(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PacketRecord> out;
  std::int64_t t = 1'000'000;
  for (std::size_t i = 0; i < n; ++i) {
    PacketRecord p;
    t += static_cast<std::int64_t>(rng() % 20'000);
    // occasional reordering
    p.timestamp_us = rng() % 10 == 0 ? t - static_cast<std::int64_t>(rng() % 50'000) : t;
    const std::uint32_t host = static_cast<std::uint32_t>(rng() % 40);
    const bool fwd = rng() % 2;
    const Ipv4Addr a(0x0a000000u + host), b(0x0a010000u + host % 7);
    const std::uint16_t pa = static_cast<std::uint16_t>(40000 + rng() % 3), pb = 80;
    p.src_ip = fwd ? a : b;
    p.dst_ip = fwd ? b : a;
    p.src_port = fwd ? pa : pb;
    p.dst_port = fwd ? pb : pa;
    p.l4_protocol = rng() % 5 == 0 ? ipproto::kUdp : ipproto::kTcp;
    p.ip_total_length = static_cast<std::uint16_t>(40 + rng() % 1460);
    p.ttl = static_cast<std::uint8_t>(rng());
    if (p.l4_protocol == ipproto::kTcp) {
      p.tcp = TcpFields{static_cast<std::uint8_t>(rng()), static_cast<std::uint32_t>(rng() % 100000),
                        static_cast<std::uint32_t>(rng() % 1000), static_cast<std::uint16_t>(rng())};
    }
    out.push_back(p);
  }
  return out;
}

} // namespace

TEST_CASE("results do not depend on the worker count") {
  const auto packets = random_packets(60'000, 21);
  ExtractConfig config;
  config.timeouts = {200'000, 2'000'000};
  const auto one = extract_packets(packets, config);
  CHECK(one.size() > 100);
  for (const unsigned workers : {2u, 5u, 8u}) {
    config.workers = workers;
    const auto many = extract_packets(packets, config);
    REQUIRE(many.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(many[i].key == one[i].key);
      CHECK(many[i].timing.first_seen_us == one[i].timing.first_seen_us);
      CHECK(many[i].record == one[i].record);
    }
  }
}

TEST_CASE("packet conservation") {
  const auto packets = random_packets(20'000, 4);
  ExtractConfig config;
  config.timeouts = {100'000, 500'000};
  config.workers = 4;
  const auto flows = extract_packets(packets, config);
  std::uint64_t pkts = 0, bytes = 0, want_bytes = 0;
  for (const auto& f : flows) {
    pkts += f.record.in_pkts + f.record.out_pkts;
    bytes += f.record.in_bytes + f.record.out_bytes;
  }
  for (const auto& p : packets) want_bytes += p.ip_total_length;
  CHECK(pkts == packets.size());
  CHECK(bytes == want_bytes);
  CHECK(std::is_sorted(flows.begin(), flows.end(), extraction_order));
}

TEST_CASE("files are separate flow domains") {
  const auto dir = scratch_dir("domains");
  const auto scenarios = crafted_scenarios();
  const auto& s = scenarios.front();
  write_capture(dir / "a.pcap", s.frames);
  write_capture(dir / "b.pcap", s.frames);
  const std::vector<std::filesystem::path> single{dir / "a.pcap"};
  const std::vector<std::filesystem::path> both{dir / "a.pcap", dir / "b.pcap"};
  const auto one = extract_flows(single, {});
  const auto two = extract_flows(both, {});
  CHECK(two.flows.size() == 2 * one.flows.size());
  CHECK(two.captures.size() == 2);
  CHECK(two.packets() == 2 * one.packets());
}

TEST_CASE("truncated capture: strict fails, lenient keeps the complete records") {
  const auto dir = scratch_dir("truncated");
  const auto scenarios = crafted_scenarios();
  const auto& s = scenarios.front();
  const auto path = dir / "cut.pcap";
  write_capture(path, s.frames);
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 5);
  const std::vector<std::filesystem::path> paths{path};

  CHECK_THROWS_AS(extract_flows(paths, {}), TruncatedFile);

  ExtractConfig lenient;
  lenient.strict = false;
  const auto result = extract_flows(paths, lenient);
  REQUIRE(result.captures.size() == 1);
  CHECK_FALSE(result.captures[0].truncation.empty());
  CHECK(result.packets() == s.frames.size() - 1);
}

TEST_CASE("configuration errors") {
  ExtractConfig config;
  config.workers = 0;
  CHECK_THROWS_AS(extract_packets({}, config), std::invalid_argument);
  const std::vector<std::filesystem::path> missing{"/nonexistent/capture.pcap"};
  CHECK_THROWS_AS(extract_flows(missing, {}), IoError);
  CHECK(extract_packets({}, {}).empty());
}
