#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nfmeter {

/// Class histogram of a labelled dataset.
class DistributionReport {
public:
  void add(std::string_view category, std::uint64_t count = 1);

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t benign() const;
  std::uint64_t attacks() const { return total_ - benign(); }
  std::uint64_t count(std::string_view category) const;
  const std::map<std::string, std::uint64_t, std::less<>>& counts() const noexcept {
    return counts_;
  }

  /// Benign first, then by descending count, then by name.
  std::vector<std::pair<std::string, std::uint64_t>> ordered() const;

  /// "96.00% / 4.00%" (benign / attack), two decimals.
  std::string percent_text() const;
  /// Benign to attack ratio scaled to ten, one decimal: "9.6 to 0.4".
  std::string ratio_text() const;
  /// Class,Count,Percent table followed by the summary lines.
  std::string render() const;

  bool operator==(const DistributionReport&) const = default;

private:
  std::map<std::string, std::uint64_t, std::less<>> counts_;
  std::uint64_t total_ = 0;
};

/// Percentage of `part` in `whole` with two decimals, "0.00" for empty.
std::string format_percent(std::uint64_t part, std::uint64_t whole);

} // namespace nfmeter
