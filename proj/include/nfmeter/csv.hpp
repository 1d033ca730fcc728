#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfmeter/flow_record.hpp"

namespace nfmeter {

inline constexpr std::string_view kBenign = "Benign";
inline constexpr std::string_view kLabelColumn = "Label";
inline constexpr std::string_view kAttackColumn = "Attack";
inline constexpr std::string_view kDatasetColumn = "Dataset";

struct FlowLabel {
  /// 1 for attack, 0 for benign; 1 exactly when attack != "Benign".
  std::uint8_t value = 0;
  std::string attack{kBenign};

  static FlowLabel benign() { return {}; }
  static FlowLabel attack_of(std::string category) { return {1, std::move(category)}; }

  bool operator==(const FlowLabel&) const = default;
};

/// One CSV row: features plus whatever label columns the schema carries.
struct FlowRow {
  FlowRecord record;
  std::optional<FlowLabel> label;
  std::optional<std::string> dataset;

  bool operator==(const FlowRow&) const = default;
};

/// Column layout of a flow CSV file: the feature columns (basic or
/// extended), optionally followed by Label and Attack, optionally followed
/// by Dataset.
struct CsvSchema {
  FeatureSet features = FeatureSet::Extended;
  bool labelled = false;
  bool has_dataset = false;

  std::vector<std::string_view> columns() const;
  std::string header_line() const;
  /// Recognises one of the six known layouts, or nullopt.
  static std::optional<CsvSchema> from_columns(std::span<const std::string> columns);

  bool operator==(const CsvSchema&) const = default;
};

/// Fixed-point rendering with at most six fractional digits, trailing zeros
/// and a bare trailing dot removed.
std::string format_rate(double value);

/// Splits one CSV line, honouring double-quoted fields.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);

class FlowCsvWriter {
public:
  FlowCsvWriter(std::ostream& out, CsvSchema schema);

  /// Throws SchemaError when the row lacks columns the schema requires.
  void write(const FlowRow& row);
  std::size_t rows() const noexcept { return rows_; }

private:
  std::ostream& out_;
  CsvSchema schema_;
  std::size_t rows_ = 0;
  std::string line_;
};

struct ReadOptions {
  bool strict = true;
};

struct RowDiagnostic {
  std::size_t line = 0;
  std::string message;
};

/// Streaming reader. The header is validated on construction (SchemaError).
/// Bad rows throw ParseError in strict mode; in lenient mode they are
/// skipped and recorded in diagnostics().
class FlowCsvReader {
public:
  FlowCsvReader(std::istream& in, ReadOptions options = {}, std::string origin = "<csv>");

  const CsvSchema& schema() const noexcept { return schema_; }
  std::optional<FlowRow> next();
  const std::vector<RowDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
  std::optional<FlowRow> parse_row(std::string_view line, std::string& error) const;

  std::istream& in_;
  ReadOptions options_;
  std::string origin_;
  CsvSchema schema_;
  std::size_t line_no_ = 0;
  std::string line_;
  std::vector<RowDiagnostic> diagnostics_;
};

struct FlowFile {
  CsvSchema schema;
  std::vector<FlowRow> rows;
  std::vector<RowDiagnostic> diagnostics;
};

std::size_t write_flows(const std::filesystem::path& path, const CsvSchema& schema,
                        std::span<const FlowRow> rows);
FlowFile read_flows(const std::filesystem::path& path, ReadOptions options = {});

} // namespace nfmeter
