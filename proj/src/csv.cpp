#include "nfmeter/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "nfmeter/errors.hpp"

namespace nfmeter {

namespace {

void append_field(std::string& line, std::string_view value) {
  if (value.find_first_of(",\"") == std::string_view::npos) {
    line += value;
    return;
  }
  line += '"';
  for (char c : value) {
    if (c == '"') line += '"';
    line += c;
  }
  line += '"';
}

void append_uint(std::string& line, std::uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, p);
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  if (s.empty()) return std::nullopt;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_rate(std::string_view s) {
  double v = 0;
  if (s.empty()) return std::nullopt;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::fixed);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v) || v < 0) {
    return std::nullopt;
  }
  return v;
}

std::span<const std::size_t> feature_positions(FeatureSet set) {
  static const auto all = [] {
    std::array<std::size_t, kExtendedFeatureCount> idx{};
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }();
  if (set == FeatureSet::Basic) return kBasicFeatureIndices;
  return all;
}

bool valid_text(std::string_view s) {
  return s.find_first_of("\r\n") == std::string_view::npos;
}

} // namespace

std::vector<std::string_view> CsvSchema::columns() const {
  std::vector<std::string_view> cols;
  for (const std::size_t i : feature_positions(features)) cols.push_back(kFeatureColumns[i].name);
  if (labelled) {
    cols.push_back(kLabelColumn);
    cols.push_back(kAttackColumn);
  }
  if (has_dataset) cols.push_back(kDatasetColumn);
  return cols;
}

std::string CsvSchema::header_line() const {
  std::string line;
  for (const auto col : columns()) {
    if (!line.empty()) line += ',';
    line += col;
  }
  return line;
}

std::optional<CsvSchema> CsvSchema::from_columns(std::span<const std::string> columns) {
  for (const auto features : {FeatureSet::Extended, FeatureSet::Basic}) {
    for (const bool labelled : {false, true}) {
      for (const bool dataset : {false, true}) {
        if (dataset && !labelled) continue;
        const CsvSchema candidate{features, labelled, dataset};
        const auto expected = candidate.columns();
        if (expected.size() == columns.size() &&
            std::equal(expected.begin(), expected.end(), columns.begin())) {
          return candidate;
        }
      }
    }
  }
  return std::nullopt;
}

std::string format_rate(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  if (ec != std::errc{}) throw SchemaError("rate value out of range");
  std::string_view s(buf, static_cast<std::size_t>(p - buf));
  if (s.find('.') != std::string_view::npos) {
    while (s.back() == '0') s.remove_suffix(1);
    if (s.back() == '.') s.remove_suffix(1);
  }
  if (s == "-0") s = "0";
  return std::string(s);
}

std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  std::size_t i = 0;
  while (true) {
    field.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (true) {
        if (i >= line.size()) return std::nullopt;
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field += line[i++];
      }
      if (i < line.size() && line[i] != ',') return std::nullopt;
    } else {
      const auto comma = line.find(',', i);
      const auto end = comma == std::string_view::npos ? line.size() : comma;
      field.assign(line.substr(i, end - i));
      if (field.find('"') != std::string::npos) return std::nullopt;
      i = end;
    }
    fields.push_back(field);
    if (i >= line.size()) break;
    ++i; // comma
  }
  return fields;
}

FlowCsvWriter::FlowCsvWriter(std::ostream& out, CsvSchema schema)
    : out_(out), schema_(schema) {
  out_ << schema_.header_line() << '\n';
}

void FlowCsvWriter::write(const FlowRow& row) {
  if (schema_.labelled && !row.label) throw SchemaError("row has no label for a labelled schema");
  if (schema_.has_dataset && !row.dataset) throw SchemaError("row has no Dataset value");
  line_.clear();
  bool first = true;
  for (const std::size_t i : feature_positions(schema_.features)) {
    if (!first) line_ += ',';
    first = false;
    std::visit(
        [&](auto member) {
          const auto& value = row.record.*member;
          using T = std::decay_t<decltype(value)>;
          if constexpr (std::is_same_v<T, Ipv4Addr>) line_ += value.to_string();
          else if constexpr (std::is_same_v<T, double>) line_ += format_rate(value);
          else append_uint(line_, value);
        },
        kFeatureColumns[i].member);
  }
  if (schema_.labelled) {
    const FlowLabel& label = *row.label;
    if (label.value > 1 || label.attack.empty() || !valid_text(label.attack) ||
        (label.value == 1) == (label.attack == kBenign)) {
      throw SchemaError("inconsistent label '" + std::to_string(label.value) + "," +
                        label.attack + "'");
    }
    line_ += ',';
    append_uint(line_, label.value);
    line_ += ',';
    append_field(line_, label.attack);
  }
  if (schema_.has_dataset) {
    if (!valid_text(*row.dataset)) throw SchemaError("Dataset value contains a line break");
    line_ += ',';
    append_field(line_, *row.dataset);
  }
  line_ += '\n';
  out_ << line_;
  if (!out_) throw IoError("write failed");
  ++rows_;
}

FlowCsvReader::FlowCsvReader(std::istream& in, ReadOptions options, std::string origin)
    : in_(in), options_(options), origin_(std::move(origin)) {
  if (!std::getline(in_, line_)) throw SchemaError(origin_ + ": empty file, no header");
  ++line_no_;
  if (!line_.empty() && line_.back() == '\r') line_.pop_back();
  const auto cols = split_csv_line(line_);
  const auto schema = cols ? CsvSchema::from_columns(*cols) : std::nullopt;
  if (!schema) throw SchemaError(origin_ + ": header does not match a known flow schema");
  schema_ = *schema;
}

std::optional<FlowRow> FlowCsvReader::parse_row(std::string_view line, std::string& error) const {
  const auto fields = split_csv_line(line);
  const auto positions = feature_positions(schema_.features);
  const std::size_t expected =
      positions.size() + (schema_.labelled ? 2 : 0) + (schema_.has_dataset ? 1 : 0);
  if (!fields) {
    error = "unbalanced quotes";
    return std::nullopt;
  }
  if (fields->size() != expected) {
    error = "expected " + std::to_string(expected) + " fields, found " +
            std::to_string(fields->size());
    return std::nullopt;
  }
  FlowRow row;
  for (std::size_t c = 0; c < positions.size(); ++c) {
    const auto& column = kFeatureColumns[positions[c]];
    const std::string& text = (*fields)[c];
    const bool ok = std::visit(
        [&](auto member) {
          auto& slot = row.record.*member;
          using T = std::decay_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, Ipv4Addr>) {
            auto v = Ipv4Addr::parse(text);
            if (v) slot = *v;
            return v.has_value();
          } else if constexpr (std::is_same_v<T, double>) {
            auto v = parse_rate(text);
            if (v) slot = *v;
            return v.has_value();
          } else {
            auto v = parse_uint(text);
            if (v) slot = *v;
            return v.has_value();
          }
        },
        column.member);
    if (!ok) {
      error = "invalid " + std::string(column.name) + " value '" + text + "'";
      return std::nullopt;
    }
  }
  std::size_t next = positions.size();
  if (schema_.labelled) {
    const std::string& label_text = (*fields)[next];
    const std::string& attack = (*fields)[next + 1];
    if (label_text != "0" && label_text != "1") {
      error = "invalid Label value '" + label_text + "'";
      return std::nullopt;
    }
    FlowLabel label{static_cast<std::uint8_t>(label_text == "1"), attack};
    if (attack.empty() || (label.value == 1) == (attack == kBenign)) {
      error = "Label " + label_text + " disagrees with Attack '" + attack + "'";
      return std::nullopt;
    }
    row.label = std::move(label);
    next += 2;
  }
  if (schema_.has_dataset) row.dataset = (*fields)[next];
  return row;
}

std::optional<FlowRow> FlowCsvReader::next() {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    std::string error;
    if (auto row = parse_row(line_, error)) return row;
    if (options_.strict) throw ParseError(line_no_, origin_ + ": " + error);
    diagnostics_.push_back({line_no_, error});
  }
  return std::nullopt;
}

std::size_t write_flows(const std::filesystem::path& path, const CsvSchema& schema,
                        std::span<const FlowRow> rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  FlowCsvWriter writer(out, schema);
  for (const auto& row : rows) writer.write(row);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
  return writer.rows();
}

FlowFile read_flows(const std::filesystem::path& path, ReadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  FlowCsvReader reader(in, options, path.string());
  FlowFile file{reader.schema(), {}, {}};
  while (auto row = reader.next()) file.rows.push_back(std::move(*row));
  file.diagnostics = reader.diagnostics();
  return file;
}

} // namespace nfmeter
