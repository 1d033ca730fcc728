#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nfmeter/csv.hpp"
#include "nfmeter/labeller.hpp"

namespace nfmeter::testing {

/// Unlabelled flows plus ground-truth events whose intended label for each
/// flow is known by construction.
struct PlantedCorpus {
  std::vector<FlowRow> rows;
  std::vector<FlowTiming> timings;
  std::vector<GroundTruthEvent> events;
  std::vector<FlowLabel> expected;
};

/// Every flow gets its own address pair. Attack flows are covered by one of
/// several event shapes: exact, reversed orientation, port wildcards,
/// protocol wildcard, or an exact event shadowing a broader one. Benign
/// flows get near-miss events (other port, other protocol, disjoint
/// window) that must not match.
PlantedCorpus planted_corpus(std::size_t flows, std::uint64_t seed, bool with_windows = false);

/// Brute-force label: scans every event in file order, no index.
FlowLabel naive_label(const std::vector<GroundTruthEvent>& events, const FlowRecord& record,
                      const FlowTiming* timing);

std::string ground_truth_csv(const std::vector<GroundTruthEvent>& events);

} // namespace nfmeter::testing
