#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nfmeter/csv.hpp"
#include "nfmeter/distribution.hpp"

namespace nfmeter {

/// Renames source attack categories to canonical ones. Unmapped names pass
/// through unchanged. Loading rejects tables that are not a function, that
/// rename Benign, or that would not be idempotent.
class CategoryMapping {
public:
  /// The merged-corpus renames: DoS, DDoS and brute-force variants to their
  /// parent category, SQL Injection to Injection.
  static CategoryMapping defaults();
  /// Lines `source,canonical`; `#` comments and blank lines ignored.
  static CategoryMapping load(const std::filesystem::path& path);
  static CategoryMapping parse(std::string_view text, std::string_view origin = "<mapping>");

  void add(std::string source, std::string canonical);

  std::string map(std::string_view name) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::string, std::less<>> lookup_;
};

inline std::string map_category(std::string_view name, const CategoryMapping& mapping) {
  return mapping.map(name);
}

struct DatasetManifest {
  std::string name;
  std::filesystem::path path;
  FeatureSet features = FeatureSet::Extended;
  std::uint64_t rows = 0;
  DistributionReport histogram;
};

/// Scans a labelled flow file.
DatasetManifest describe_dataset(const std::filesystem::path& path, std::string name,
                                 ReadOptions options = {});

struct MergeInput {
  std::string name;
  std::filesystem::path path;
};

struct MergeResult {
  CsvSchema schema;
  std::vector<DatasetManifest> inputs;
  DistributionReport merged;
  std::uint64_t rows = 0;
};

/// Concatenates labelled flow files, canonicalising Attack and appending a
/// Dataset column holding each input's name. Inputs that already carry a
/// Dataset column keep their values. All inputs must share one header
/// (SchemaMismatch otherwise) and must be labelled (SchemaError).
MergeResult merge_datasets(std::span<const MergeInput> inputs, const CategoryMapping& mapping,
                           std::ostream& out, ReadOptions options = {});

/// Reduces a flow file to the basic feature set, keeping label columns.
std::uint64_t project_basic(std::istream& in, std::ostream& out, ReadOptions options = {},
                            const std::string& origin = "<csv>");

/// Class distribution of labelled rows.
DistributionReport stats(std::span<const FlowRow> rows);

} // namespace nfmeter
