#include "nfmeter/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <thread>
#include <tuple>

#include "nfmeter/errors.hpp"

namespace nfmeter {

namespace {

constexpr std::size_t kBatchSize = 16384;

/// Packets of one capture spread over `workers` flow tables by canonical
/// five-tuple. Each table's clock is raised to the capture-wide watermark
/// before every packet, so expiry decisions match a single table exactly.
class ShardedMeter {
public:
  explicit ShardedMeter(const ExtractConfig& config)
      : config_(config), shards_(std::max(1u, config.workers)) {
    for (auto& shard : shards_) shard.table = FlowTable{config.timeouts};
    batch_.reserve(kBatchSize);
  }

  void push(PacketRecord pkt) {
    watermark_ = std::max(watermark_, pkt.timestamp_us);
    clocks_.push_back(watermark_);
    batch_.push_back(std::move(pkt));
    if (batch_.size() == kBatchSize) process_batch();
  }

  std::vector<ExtractedFlow> finish() {
    process_batch();
    std::vector<ExtractedFlow> flows;
    for (auto& shard : shards_) {
      emit(shard, shard.table.flush());
      std::move(shard.out.begin(), shard.out.end(), std::back_inserter(flows));
      shard.out.clear();
    }
    std::sort(flows.begin(), flows.end(), extraction_order);
    return flows;
  }

private:
  struct Shard {
    FlowTable table;
    std::vector<std::size_t> indices;
    std::vector<ExtractedFlow> out;
  };

  void emit(Shard& shard, std::vector<FlowAccumulator> done) {
    for (const auto& acc : done) {
      shard.out.push_back({acc.key, timing_of(acc), finalize(acc, config_.l7_table)});
    }
  }

  void run_shard(Shard& shard) {
    for (const std::size_t i : shard.indices) {
      shard.table.advance_clock(clocks_[i]);
      shard.table.upsert_packet(batch_[i]);
    }
    if (!shard.indices.empty()) emit(shard, shard.table.expire_flows(shard.table.clock()));
    shard.indices.clear();
  }

  void process_batch() {
    if (batch_.empty()) return;
    if (shards_.size() == 1) {
      auto& only = shards_.front();
      for (std::size_t i = 0; i < batch_.size(); ++i) only.indices.push_back(i);
      run_shard(only);
    } else {
      for (std::size_t i = 0; i < batch_.size(); ++i) {
        shards_[CanonicalKey::of(batch_[i]).hash() % shards_.size()].indices.push_back(i);
      }
      std::vector<std::jthread> threads;
      threads.reserve(shards_.size());
      for (auto& shard : shards_) threads.emplace_back([this, &shard] { run_shard(shard); });
    }
    batch_.clear();
    clocks_.clear();
  }

  const ExtractConfig& config_;
  std::vector<Shard> shards_;
  std::vector<PacketRecord> batch_;
  std::vector<std::int64_t> clocks_;
  std::int64_t watermark_ = std::numeric_limits<std::int64_t>::min();
};

} // namespace

std::uint64_t ExtractResult::packets() const {
  std::uint64_t total = 0;
  for (const auto& c : captures) total += c.stats.decoded;
  return total;
}

bool extraction_order(const ExtractedFlow& a, const ExtractedFlow& b) {
  const auto& ra = a.record;
  const auto& rb = b.record;
  return std::tie(a.timing.first_seen_us, a.key, a.timing.last_seen_us, ra.in_pkts, ra.out_pkts,
                  ra.in_bytes, ra.out_bytes) <
         std::tie(b.timing.first_seen_us, b.key, b.timing.last_seen_us, rb.in_pkts, rb.out_pkts,
                  rb.in_bytes, rb.out_bytes);
}

ExtractResult extract_flows(std::span<const std::filesystem::path> captures,
                            const ExtractConfig& config) {
  if (config.workers == 0) throw std::invalid_argument("worker count must be at least 1");
  ExtractResult result;
  for (const auto& path : captures) {
    CaptureSummary summary;
    summary.path = path;
    ShardedMeter meter(config);
    CaptureReader reader(path);
    try {
      while (auto pkt = reader.next()) meter.push(std::move(*pkt));
    } catch (const TruncatedFile& e) {
      if (config.strict) throw;
      summary.truncation = e.what();
    }
    summary.stats = reader.stats();
    auto flows = meter.finish();
    summary.flows = flows.size();
    std::move(flows.begin(), flows.end(), std::back_inserter(result.flows));
    result.captures.push_back(std::move(summary));
  }
  std::stable_sort(result.flows.begin(), result.flows.end(), extraction_order);
  return result;
}

std::vector<ExtractedFlow> extract_packets(std::span<const PacketRecord> packets,
                                           const ExtractConfig& config) {
  if (config.workers == 0) throw std::invalid_argument("worker count must be at least 1");
  ShardedMeter meter(config);
  for (const auto& pkt : packets) meter.push(pkt);
  return meter.finish();
}

} // namespace nfmeter
