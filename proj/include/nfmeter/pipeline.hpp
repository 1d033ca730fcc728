#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nfmeter/flow_key.hpp"
#include "nfmeter/flow_record.hpp"
#include "nfmeter/flow_table.hpp"
#include "nfmeter/l7_table.hpp"
#include "nfmeter/pcap.hpp"

namespace nfmeter {

struct ExtractConfig {
  FlowTimeouts timeouts;
  L7Table l7_table = L7Table::defaults();
  /// Flow tables per capture; packets are sharded across them by five-tuple.
  unsigned workers = 1;
  /// Treat a capture cut short mid-record as fatal.
  bool strict = true;
};

struct ExtractedFlow {
  FlowKey key;
  FlowTiming timing;
  FlowRecord record;
};

struct CaptureSummary {
  std::filesystem::path path;
  CaptureStats stats;
  std::uint64_t flows = 0;
  /// Set when the capture ended mid-record (lenient mode only).
  std::string truncation;
};

struct ExtractResult {
  std::vector<ExtractedFlow> flows;
  std::vector<CaptureSummary> captures;

  std::uint64_t packets() const;
};

/// Output order of extracted flows: first_seen, then key, then the
/// remaining counters so that the order is total.
bool extraction_order(const ExtractedFlow& a, const ExtractedFlow& b);

/// Meters each capture independently (flows never span files) and returns
/// all flows in extraction_order. The result does not depend on `workers`.
ExtractResult extract_flows(std::span<const std::filesystem::path> captures,
                            const ExtractConfig& config);

/// Same as above for already decoded packets, taken in the given order.
std::vector<ExtractedFlow> extract_packets(std::span<const PacketRecord> packets,
                                           const ExtractConfig& config);

} // namespace nfmeter
