#include "nfmeter/labeller.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>

#include "nfmeter/errors.hpp"

namespace nfmeter {

namespace {

std::uint64_t address_pair(Ipv4Addr a, Ipv4Addr b) {
  const auto lo = std::min(a.value(), b.value());
  const auto hi = std::max(a.value(), b.value());
  return (std::uint64_t{lo} << 32) | hi;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
}

bool wildcard(std::string_view s) { return s.empty() || s == "*"; }

bool port_matches(const std::optional<std::uint16_t>& want, std::uint64_t port) {
  return !want || *want == port;
}

bool oriented_match(const GroundTruthEvent& e, Ipv4Addr src, std::uint64_t sport, Ipv4Addr dst,
                    std::uint64_t dport) {
  return e.src_ip == src && e.dst_ip == dst && port_matches(e.src_port, sport) &&
         port_matches(e.dst_port, dport);
}

} // namespace

LabelIndex::LabelIndex(std::vector<GroundTruthEvent> events, std::vector<RowDiagnostic> diagnostics)
    : events_(std::move(events)), diagnostics_(std::move(diagnostics)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    by_addresses_[address_pair(events_[i].src_ip, events_[i].dst_ip)].push_back(i);
  }
}

bool LabelIndex::has_windows() const noexcept {
  return std::any_of(events_.begin(), events_.end(),
                     [](const GroundTruthEvent& e) { return e.has_window(); });
}

const GroundTruthEvent* LabelIndex::match(const FlowRecord& r, const std::optional<FlowTiming>& timing,
                                          const LabelOptions& options) const {
  const auto it = by_addresses_.find(address_pair(r.ipv4_src_addr, r.ipv4_dst_addr));
  if (it == by_addresses_.end()) return nullptr;
  const GroundTruthEvent* best = nullptr;
  for (const std::size_t i : it->second) {
    const GroundTruthEvent& e = events_[i];
    if (e.l4_protocol && *e.l4_protocol != r.protocol) continue;
    const bool forward = oriented_match(e, r.ipv4_src_addr, r.l4_src_port, r.ipv4_dst_addr, r.l4_dst_port);
    const bool backward = options.bidirectional &&
        oriented_match(e, r.ipv4_dst_addr, r.l4_dst_port, r.ipv4_src_addr, r.l4_src_port);
    if (!forward && !backward) continue;
    if (options.use_time_windows && timing && e.has_window()) {
      const auto start = e.start_us.value_or(std::numeric_limits<std::int64_t>::min());
      const auto end = e.end_us.value_or(std::numeric_limits<std::int64_t>::max());
      if (start > timing->last_seen_us || end < timing->first_seen_us) continue;
    }
    // positions are ascending, so strict < keeps the earliest on ties
    if (!best || e.wildcard_count() < best->wildcard_count()) best = &e;
  }
  return best;
}

LabelIndex parse_ground_truth(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(origin + ": empty ground-truth file");
  const auto header = split_csv_line(trim(line));
  if (!header) throw SchemaError(origin + ": unreadable header");

  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header->size(); ++i) column.emplace(std::string(trim((*header)[i])), i);
  for (const char* required : {"src_ip", "dst_ip", "src_port", "dst_port", "protocol", "attack"}) {
    if (!column.count(required)) {
      throw SchemaError(origin + ": ground truth lacks required column '" + required + "'");
    }
  }
  const auto optional_column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = column.find(name);
    return it == column.end() ? std::nullopt : std::optional{it->second};
  };
  const auto start_col = optional_column("start_us");
  const auto end_col = optional_column("end_us");

  std::vector<GroundTruthEvent> events;
  std::vector<RowDiagnostic> diagnostics;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(trim(line));
    const auto fail = [&](std::string why) { diagnostics.push_back({line_no, std::move(why)}); };
    if (!fields || fields->size() != header->size()) {
      fail("expected " + std::to_string(header->size()) + " fields");
      continue;
    }
    const auto cell = [&](std::size_t idx) { return trim((*fields)[idx]); };
    const auto get = [&](const char* name) { return cell(column.find(name)->second); };

    GroundTruthEvent e;
    auto src = Ipv4Addr::parse(get("src_ip"));
    auto dst = Ipv4Addr::parse(get("dst_ip"));
    if (!src || !dst) {
      fail("invalid IPv4 address");
      continue;
    }
    e.src_ip = *src;
    e.dst_ip = *dst;

    bool ok = true;
    for (auto [name, slot] : {std::pair{"src_port", &e.src_port}, std::pair{"dst_port", &e.dst_port}}) {
      const auto text = get(name);
      if (wildcard(text)) continue;
      std::uint16_t port = 0;
      if (!parse_int(text, port)) {
        fail(std::string("invalid ") + name + " '" + std::string(text) + "'");
        ok = false;
        break;
      }
      *slot = port;
    }
    if (!ok) continue;

    const auto proto = get("protocol");
    if (!wildcard(proto)) {
      std::uint8_t p = 0;
      if (proto == "tcp" || proto == "TCP") p = ipproto::kTcp;
      else if (proto == "udp" || proto == "UDP") p = ipproto::kUdp;
      else if (proto == "icmp" || proto == "ICMP") p = ipproto::kIcmp;
      else if (!parse_int(proto, p)) {
        fail("invalid protocol '" + std::string(proto) + "'");
        continue;
      }
      e.l4_protocol = p;
    }

    e.attack = std::string(get("attack"));
    if (e.attack.empty() || e.attack == kBenign) {
      fail("attack category must be a non-Benign name");
      continue;
    }

    for (auto [col, slot] : {std::pair{start_col, &e.start_us}, std::pair{end_col, &e.end_us}}) {
      if (!col || cell(*col).empty()) continue;
      std::int64_t v = 0;
      if (!parse_int(cell(*col), v)) {
        ok = false;
        break;
      }
      *slot = v;
    }
    if (!ok) {
      fail("invalid time window bound");
      continue;
    }
    if (e.start_us && e.end_us && *e.start_us > *e.end_us) {
      fail("time window starts after it ends");
      continue;
    }
    events.push_back(std::move(e));
  }
  return LabelIndex{std::move(events), std::move(diagnostics)};
}

LabelIndex load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_ground_truth(in, path.string());
}

FlowLabel label_flow(const LabelIndex& index, const FlowRecord& record,
                     const std::optional<FlowTiming>& timing, const LabelOptions& options) {
  if (const auto* event = index.match(record, timing, options)) {
    return FlowLabel::attack_of(event->attack);
  }
  return FlowLabel::benign();
}

LabelSummary label_dataset(std::span<FlowRow> rows, const LabelIndex& index,
                           std::span<const FlowTiming> timings, const LabelOptions& options) {
  if (!timings.empty() && timings.size() != rows.size()) {
    throw std::invalid_argument("timings must be parallel to rows");
  }
  LabelSummary summary;
  summary.skipped_events = index.diagnostics();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::optional<FlowTiming> timing;
    if (!timings.empty()) timing = timings[i];
    rows[i].label = label_flow(index, rows[i].record, timing, options);
    summary.distribution.add(rows[i].label->attack);
  }
  return summary;
}

} // namespace nfmeter
