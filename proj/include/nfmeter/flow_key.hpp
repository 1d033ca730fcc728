#pragma once

#include <cstdint>
#include <functional>

#include "nfmeter/packet.hpp"

namespace nfmeter {

enum class Direction : std::uint8_t { ClientToServer, ServerToClient };

/// Bidirectional five-tuple. The client is the source of the first packet
/// observed for the flow.
struct FlowKey {
  Ipv4Addr client_ip;
  Ipv4Addr server_ip;
  std::uint16_t client_port = 0;
  std::uint16_t server_port = 0;
  std::uint8_t l4_protocol = 0;

  static FlowKey from_packet(const PacketRecord& pkt) {
    return {pkt.src_ip, pkt.dst_ip, pkt.src_port, pkt.dst_port, pkt.l4_protocol};
  }

  FlowKey reversed() const {
    return {server_ip, client_ip, server_port, client_port, l4_protocol};
  }

  /// Direction of `pkt` relative to this key; the packet must belong to it.
  Direction direction_of(const PacketRecord& pkt) const {
    return pkt.src_ip == client_ip && pkt.src_port == client_port ? Direction::ClientToServer
                                                                  : Direction::ServerToClient;
  }

  auto operator<=>(const FlowKey&) const = default;
};

/// Orientation-free form of a five-tuple, used for table lookup.
struct CanonicalKey {
  std::uint32_t low_ip = 0;
  std::uint32_t high_ip = 0;
  std::uint16_t low_port = 0;
  std::uint16_t high_port = 0;
  std::uint8_t l4_protocol = 0;

  static CanonicalKey of(Ipv4Addr a, std::uint16_t a_port, Ipv4Addr b, std::uint16_t b_port,
                         std::uint8_t proto) {
    if (std::pair{a.value(), a_port} <= std::pair{b.value(), b_port}) {
      return {a.value(), b.value(), a_port, b_port, proto};
    }
    return {b.value(), a.value(), b_port, a_port, proto};
  }
  static CanonicalKey of(const PacketRecord& p) {
    return of(p.src_ip, p.src_port, p.dst_ip, p.dst_port, p.l4_protocol);
  }
  static CanonicalKey of(const FlowKey& k) {
    return of(k.client_ip, k.client_port, k.server_ip, k.server_port, k.l4_protocol);
  }

  bool operator==(const CanonicalKey&) const = default;

  std::uint64_t hash() const noexcept {
    // splitmix64 over the packed tuple
    std::uint64_t x = (std::uint64_t{low_ip} << 32) ^ high_ip;
    x ^= (std::uint64_t{low_port} << 40) ^ (std::uint64_t{high_port} << 16) ^ l4_protocol;
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const noexcept {
    return static_cast<std::size_t>(k.hash());
  }
};

} // namespace nfmeter
