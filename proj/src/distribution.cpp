#include "nfmeter/distribution.hpp"

#include <algorithm>
#include <cstdio>

#include "nfmeter/csv.hpp"

namespace nfmeter {

std::string format_percent(std::uint64_t part, std::uint64_t whole) {
  char buf[32];
  const double pct = whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
  std::snprintf(buf, sizeof buf, "%.2f", pct);
  return buf;
}

void DistributionReport::add(std::string_view category, std::uint64_t count) {
  auto it = counts_.find(category);
  if (it == counts_.end()) it = counts_.emplace(std::string(category), 0).first;
  it->second += count;
  total_ += count;
}

std::uint64_t DistributionReport::count(std::string_view category) const {
  const auto it = counts_.find(category);
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t DistributionReport::benign() const { return count(kBenign); }

std::vector<std::pair<std::string, std::uint64_t>> DistributionReport::ordered() const {
  std::vector<std::pair<std::string, std::uint64_t>> rows(counts_.begin(), counts_.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    const bool a_benign = a.first == kBenign, b_benign = b.first == kBenign;
    if (a_benign != b_benign) return a_benign;
    return a.second > b.second;
  });
  return rows;
}

std::string DistributionReport::percent_text() const {
  return format_percent(benign(), total_) + "% / " + format_percent(attacks(), total_) + "%";
}

std::string DistributionReport::ratio_text() const {
  if (total_ == 0) return "0.0 to 0.0";
  // tenths of ten, rounded on the benign side so the two halves add up
  const auto benign_tenths = static_cast<std::uint64_t>(
      (200.0 * static_cast<double>(benign()) / static_cast<double>(total_) + 1.0) / 2.0);
  const std::uint64_t attack_tenths = 100 - benign_tenths;
  const auto tenths = [](std::uint64_t t) {
    return std::to_string(t / 10) + "." + std::to_string(t % 10);
  };
  return tenths(benign_tenths) + " to " + tenths(attack_tenths);
}

std::string DistributionReport::render() const {
  std::string out = "Class,Count,Percent\n";
  for (const auto& [name, n] : ordered()) {
    out += name + "," + std::to_string(n) + "," + format_percent(n, total_) + "%\n";
  }
  out += "Total," + std::to_string(total_) + "\n";
  out += "Benign/Attack," + percent_text() + "\n";
  out += "Benign to attack ratio," + ratio_text() + "\n";
  return out;
}

} // namespace nfmeter
