#include "oracle.hpp"

#include <cmath>
#include <variant>

namespace nfmeter::testing {

std::vector<std::string> compare_records(const FlowRecord& got, const FlowRecord& want,
                                         double rate_rel_tol) {
  std::vector<std::string> out;
  for (const auto& col : kFeatureColumns) {
    std::visit(
        [&](auto member) {
          const auto& g = got.*member;
          const auto& w = want.*member;
          using T = std::decay_t<decltype(g)>;
          bool same = false;
          std::string gs, ws;
          if constexpr (std::is_same_v<T, double>) {
            same = std::fabs(g - w) <= rate_rel_tol * std::max(1.0, std::fabs(w));
            gs = std::to_string(g);
            ws = std::to_string(w);
          } else if constexpr (std::is_same_v<T, Ipv4Addr>) {
            same = g == w;
            gs = g.to_string();
            ws = w.to_string();
          } else {
            same = g == w;
            gs = std::to_string(g);
            ws = std::to_string(w);
          }
          if (!same) out.push_back(std::string(col.name) + ": got " + gs + ", expected " + ws);
        },
        col.member);
  }
  return out;
}

ScenarioOutcome check_scenario(const Scenario& scenario, const std::filesystem::path& dir,
                               unsigned workers, FlowTimeouts timeouts, double rate_rel_tol) {
  const auto path = dir / (scenario.name + ".pcap");
  write_capture(path, scenario.frames, scenario.resolution, scenario.swapped);

  std::vector<RefPacket> packets;
  for (const auto& spec : scenario.frames) {
    if (auto p = expected_packet(spec)) packets.push_back(std::move(*p));
  }
  const L7Table l7 = L7Table::defaults();
  const auto want = reference_flows(packets, timeouts.idle_us, timeouts.active_us, l7);

  ExtractConfig config;
  config.timeouts = timeouts;
  config.workers = workers;
  const std::vector<std::filesystem::path> paths{path};
  const auto got = extract_flows(paths, config);

  ScenarioOutcome outcome;
  outcome.flows = got.flows.size();
  if (got.flows.size() != want.size()) {
    outcome.mismatches.push_back(scenario.name + ": " + std::to_string(got.flows.size()) +
                                 " flows, expected " + std::to_string(want.size()));
    return outcome;
  }
  if (got.packets() != packets.size()) {
    outcome.mismatches.push_back(scenario.name + ": decoded " + std::to_string(got.packets()) +
                                 " packets, expected " + std::to_string(packets.size()));
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto& g = got.flows[i];
    if (g.timing.first_seen_us != want[i].first || g.timing.last_seen_us != want[i].last) {
      outcome.mismatches.push_back(scenario.name + " flow " + std::to_string(i) + ": timing differs");
    }
    for (auto& m : compare_records(g.record, want[i].record, rate_rel_tol)) {
      outcome.mismatches.push_back(scenario.name + " flow " + std::to_string(i) + ": " + m);
    }
  }
  return outcome;
}

} // namespace nfmeter::testing
