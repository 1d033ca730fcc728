#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nfmeter/csv.hpp"
#include "nfmeter/distribution.hpp"
#include "nfmeter/flow_record.hpp"
#include "nfmeter/packet.hpp"

namespace nfmeter {

/// One published attack event. Unset ports/protocol are wildcards.
struct GroundTruthEvent {
  Ipv4Addr src_ip;
  Ipv4Addr dst_ip;
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;
  std::optional<std::uint8_t> l4_protocol;
  std::string attack;
  std::optional<std::int64_t> start_us;
  std::optional<std::int64_t> end_us;

  int wildcard_count() const noexcept {
    return !src_port + !dst_port + !l4_protocol;
  }
  bool has_window() const noexcept { return start_us || end_us; }
};

struct LabelOptions {
  /// Match events against both orientations of the flow.
  bool bidirectional = true;
  /// Require event windows to overlap the flow's [first, last] interval.
  /// Only consulted when flow timing is supplied.
  bool use_time_windows = false;
};

/// Immutable lookup structure over ground-truth events.
class LabelIndex {
public:
  LabelIndex() = default;
  explicit LabelIndex(std::vector<GroundTruthEvent> events,
                      std::vector<RowDiagnostic> diagnostics = {});

  /// Best matching event for the flow, or nullptr. Among several matches the
  /// one with fewest wildcards wins, then the earliest in file order.
  const GroundTruthEvent* match(const FlowRecord& record, const std::optional<FlowTiming>& timing,
                                const LabelOptions& options) const;

  std::size_t size() const noexcept { return events_.size(); }
  const std::vector<GroundTruthEvent>& events() const noexcept { return events_; }
  const std::vector<RowDiagnostic>& diagnostics() const noexcept { return diagnostics_; }
  bool has_windows() const noexcept;

private:
  std::vector<GroundTruthEvent> events_;
  std::vector<RowDiagnostic> diagnostics_;
  // unordered address pair -> event positions, ascending
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_addresses_;
};

/// Loads a ground-truth CSV. Required columns: src_ip, dst_ip, src_port,
/// dst_port, protocol, attack; optional start_us, end_us. `*` (or an empty
/// cell) is a wildcard for ports and protocol; protocol may also be tcp,
/// udp or icmp. Bad rows are skipped and listed in the index diagnostics.
/// Throws SchemaError for a missing required column.
LabelIndex load_ground_truth(const std::filesystem::path& path);
LabelIndex parse_ground_truth(std::istream& in, const std::string& origin = "<ground truth>");

FlowLabel label_flow(const LabelIndex& index, const FlowRecord& record,
                     const std::optional<FlowTiming>& timing = std::nullopt,
                     const LabelOptions& options = {});

struct LabelSummary {
  DistributionReport distribution;
  std::vector<RowDiagnostic> skipped_events;
};

/// Labels every row in place (replacing any existing label) and reports
/// the resulting class distribution. `timings`, when non-empty, must be
/// parallel to `rows`.
LabelSummary label_dataset(std::span<FlowRow> rows, const LabelIndex& index,
                           std::span<const FlowTiming> timings = {},
                           const LabelOptions& options = {});

} // namespace nfmeter
