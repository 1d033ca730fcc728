#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>

#include "nfmeter/flow_table.hpp"

using namespace nfmeter;

namespace {

constexpr std::int64_t kSec = 1'000'000;

PacketRecord udp(std::int64_t ts, Ipv4Addr src, std::uint16_t sport, Ipv4Addr dst,
                 std::uint16_t dport, std::uint16_t len = 100) {
  PacketRecord p;
  p.timestamp_us = ts;
  p.src_ip = src;
  p.dst_ip = dst;
  p.src_port = sport;
  p.dst_port = dport;
  p.l4_protocol = ipproto::kUdp;
  p.ip_total_length = len;
  p.ttl = 64;
  return p;
}

PacketRecord tcp(std::int64_t ts, Ipv4Addr src, std::uint16_t sport, Ipv4Addr dst,
                 std::uint16_t dport, std::uint8_t flags) {
  auto p = udp(ts, src, sport, dst, dport, 40);
  p.l4_protocol = ipproto::kTcp;
  p.tcp = TcpFields{flags, 0, 0, 1000};
  return p;
}

const Ipv4Addr A{10, 0, 0, 1};
const Ipv4Addr B{10, 0, 0, 2};

} // namespace

TEST_CASE("handshake orientation") {
  FlowTable table;
  auto syn = table.upsert_packet(tcp(0, A, 40000, B, 80, tcpflag::kSyn));
  CHECK(syn.event == FlowEvent::NewFlow);
  CHECK(syn.direction == Direction::ClientToServer);
  auto synack = table.upsert_packet(tcp(10, B, 80, A, 40000, tcpflag::kSyn | tcpflag::kAck));
  CHECK(synack.event == FlowEvent::Continued);
  CHECK(synack.direction == Direction::ServerToClient);
  CHECK(table.active_count() == 1);
  auto flows = table.flush();
  REQUIRE(flows.size() == 1);
  CHECK(flows[0].key.client_ip == A);
  CHECK(flows[0].key.server_port == 80);
  CHECK(flows[0].client.packets == 1);
  CHECK(flows[0].server.packets == 1);
}

TEST_CASE("idle gap splits a flow") {
  // 120 s apart with a 30 s idle timeout: 120 s > 30 s, so the second packet
  // opens a new flow.
  FlowTable table({30 * kSec, 300 * kSec});
  CHECK(table.upsert_packet(udp(0, A, 5000, B, 6000)).event == FlowEvent::NewFlow);
  CHECK(table.upsert_packet(udp(120 * kSec, A, 5000, B, 6000)).event == FlowEvent::ExpiredThenNew);
  CHECK(table.pending_expired() == 1);
  auto flows = table.flush();
  REQUIRE(flows.size() == 2);
  CHECK(flows[0].first_seen_us == 0);
  CHECK(flows[1].first_seen_us == 120 * kSec);
}

TEST_CASE("idle boundary is closed: equal continues, one microsecond later splits") {
  FlowTable table({30 * kSec, 300 * kSec});
  table.upsert_packet(udp(0, A, 1, B, 2));
  CHECK(table.upsert_packet(udp(30 * kSec, B, 2, A, 1)).event == FlowEvent::Continued);
  CHECK(table.upsert_packet(udp(60 * kSec + 1, A, 1, B, 2)).event == FlowEvent::ExpiredThenNew);
}

TEST_CASE("active timeout bounds a flow's lifetime") {
  FlowTable table({30 * kSec, 120 * kSec});
  int splits = 0;
  for (int i = 0; i <= 20; ++i) {
    if (table.upsert_packet(udp(i * 10 * kSec, A, 1, B, 2)).event == FlowEvent::ExpiredThenNew) ++splits;
  }
  // flows cover [0,120], [130,200]: the packet at 130 s is 130 s after first_seen
  CHECK(splits == 1);
  auto flows = table.flush();
  REQUIRE(flows.size() == 2);
  CHECK(flows[0].packets() == 13);
  CHECK(flows[1].packets() == 8);
}

TEST_CASE("expire_flows") {
  FlowTable table({30 * kSec, 120 * kSec});
  SUBCASE("empty table") { CHECK(table.expire_flows(1000 * kSec).empty()); }
  SUBCASE("boundary") {
    table.upsert_packet(udp(5 * kSec, A, 1, B, 2));
    CHECK(table.expire_flows(35 * kSec).empty());
    auto out = table.expire_flows(35 * kSec + 1);
    REQUIRE(out.size() == 1);
    CHECK(table.active_count() == 0);
    CHECK(table.expire_flows(100 * kSec).empty());
  }
  SUBCASE("staggered flows come out by deadline, then first_seen, then key") {
    // deadlines: f1 last 10 -> 40; f2 last 4 -> 34; f3 first 0 last 4 -> 34
    table.upsert_packet(udp(2 * kSec, A, 3, B, 9));   // f2
    table.upsert_packet(udp(0, A, 7, B, 9));          // f3 starts earlier
    table.upsert_packet(udp(4 * kSec, A, 3, B, 9));   // f2 last 4
    table.upsert_packet(udp(4 * kSec, A, 7, B, 9));   // f3 last 4
    table.upsert_packet(udp(10 * kSec, A, 5, B, 9));  // f1
    auto out = table.expire_flows(100 * kSec);
    REQUIRE(out.size() == 3);
    // oracle: sort (deadline, first_seen, key)
    CHECK(out[0].key.client_port == 7); // deadline 34, first 0
    CHECK(out[1].key.client_port == 3); // deadline 34, first 2
    CHECK(out[2].key.client_port == 5); // deadline 40
  }
}

TEST_CASE("flush drains deterministically and is idempotent") {
  FlowTable table;
  table.upsert_packet(udp(50, A, 9, B, 1));
  table.upsert_packet(udp(50, A, 2, B, 1));
  table.upsert_packet(udp(10, B, 4, A, 4));
  auto out = table.flush();
  REQUIRE(out.size() == 3);
  CHECK(out[0].first_seen_us == 10);
  CHECK(out[1].key.client_port == 2);
  CHECK(out[2].key.client_port == 9);
  CHECK(table.active_count() == 0);
  CHECK(table.flush().empty());
}

TEST_CASE("interleaved packets of five flows") {
  FlowTable table;
  std::map<std::uint16_t, int> expected;
  for (int i = 0; i < 57; ++i) {
    const auto port = static_cast<std::uint16_t>(100 + (i * 7) % 5);
    ++expected[port];
    if (i % 3 == 0) table.upsert_packet(udp(i, B, 53, A, port));
    else table.upsert_packet(udp(i, A, port, B, 53));
  }
  auto flows = table.flush();
  REQUIRE(flows.size() == 5);
  for (const auto& f : flows) {
    const auto port = f.key.client_port == 53 ? f.key.server_port : f.key.client_port;
    CHECK(f.packets() == static_cast<std::uint64_t>(expected[port]));
  }
}

TEST_CASE("reordered packets extend first_seen backwards") {
  FlowTable table;
  table.upsert_packet(udp(5000, A, 1, B, 2));
  table.upsert_packet(udp(1000, B, 2, A, 1));
  auto flows = table.flush();
  REQUIRE(flows.size() == 1);
  CHECK(flows[0].first_seen_us == 1000);
  CHECK(flows[0].last_seen_us == 5000);
  CHECK(flows[0].key.client_ip == A);
}

TEST_CASE("conservation and interleaving independence") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    const int flows = 1 + static_cast<int>(rng() % 6);
    std::vector<std::vector<PacketRecord>> per_flow(static_cast<std::size_t>(flows));
    std::int64_t t = 0;
    for (int f = 0; f < flows; ++f) {
      const int n = 1 + static_cast<int>(rng() % 10);
      for (int k = 0; k < n; ++k) {
        t += static_cast<std::int64_t>(rng() % (5 * kSec));
        const bool fwd = rng() % 2;
        const auto port = static_cast<std::uint16_t>(1000 + f);
        per_flow[f].push_back(fwd ? udp(t, A, port, B, 80, 60) : udp(t, B, 80, A, port, 60));
      }
    }
    // two different interleavings that keep each flow's order, with
    // timestamps assigned in interleaved order so the clock stays sane
    const auto run = [&](std::uint64_t seed) {
      std::mt19937_64 pick(seed);
      std::vector<std::size_t> cursor(per_flow.size(), 0);
      std::vector<PacketRecord> stream;
      while (true) {
        std::vector<std::size_t> open;
        for (std::size_t f = 0; f < per_flow.size(); ++f) {
          if (cursor[f] < per_flow[f].size()) open.push_back(f);
        }
        if (open.empty()) break;
        const auto f = open[pick() % open.size()];
        stream.push_back(per_flow[f][cursor[f]++]);
      }
      FlowTable table({1000 * kSec, 10000 * kSec});
      for (const auto& p : stream) table.upsert_packet(p);
      auto out = table.flush();
      std::uint64_t total = 0;
      std::vector<std::pair<FlowKey, std::uint64_t>> summary;
      for (const auto& acc : out) {
        total += acc.client.packets + acc.server.packets;
        summary.emplace_back(acc.key, acc.packets());
      }
      std::sort(summary.begin(), summary.end());
      CHECK(total == stream.size());
      return summary;
    };
    CHECK(run(1) == run(2));
  }
}
