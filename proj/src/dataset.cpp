#include "nfmeter/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nfmeter/errors.hpp"

namespace nfmeter {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

} // namespace

CategoryMapping CategoryMapping::defaults() {
  CategoryMapping m;
  for (const char* name : {"DoS attacks-Hulk", "DoS attacks-SlowHTTPTest", "DoS attacks-GoldenEye",
                           "DoS attacks-Slowloris"}) {
    m.add(name, "DoS");
  }
  for (const char* name : {"DDoS attack-LOIC-UDP", "DDoS attack-HOIC", "DDoS attacks-LOIC-HTTP"}) {
    m.add(name, "DDoS");
  }
  for (const char* name : {"FTP-BruteForce", "SSH-Bruteforce", "Brute Force -Web", "Brute Force -XSS"}) {
    m.add(name, "Brute Force");
  }
  m.add("SQL Injection", "Injection");
  return m;
}

void CategoryMapping::add(std::string source, std::string canonical) {
  if (source.empty() || canonical.empty()) throw SchemaError("empty category name in mapping");
  if ((source == kBenign) != (canonical == kBenign)) {
    throw SchemaError("only Benign may map to Benign, and it must map to itself");
  }
  if (const auto it = lookup_.find(source); it != lookup_.end()) {
    if (it->second != canonical) {
      throw SchemaError("category '" + source + "' mapped to both '" + it->second + "' and '" +
                        canonical + "'");
    }
    return;
  }
  // keep map(map(x)) == map(x)
  if (const auto it = lookup_.find(canonical); it != lookup_.end() && it->second != canonical) {
    throw SchemaError("canonical name '" + canonical + "' is itself renamed to '" + it->second + "'");
  }
  for (const auto& [src, dst] : entries_) {
    if (dst == source && source != canonical) {
      throw SchemaError("'" + source + "' is a canonical target and cannot be renamed");
    }
  }
  lookup_.emplace(source, canonical);
  entries_.emplace_back(std::move(source), std::move(canonical));
}

std::string CategoryMapping::map(std::string_view name) const {
  const auto it = lookup_.find(name);
  return it == lookup_.end() ? std::string(name) : it->second;
}

CategoryMapping CategoryMapping::parse(std::string_view text, std::string_view origin) {
  CategoryMapping m;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_csv_line(line);
    if (!fields || fields->size() != 2) {
      throw ParseError(line_no, std::string(origin) + ": expected source,canonical");
    }
    try {
      m.add(std::string(trim((*fields)[0])), std::string(trim((*fields)[1])));
    } catch (const SchemaError& e) {
      throw ParseError(line_no, std::string(origin) + ": " + e.what());
    }
  }
  return m;
}

CategoryMapping CategoryMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

DatasetManifest describe_dataset(const std::filesystem::path& path, std::string name,
                                 ReadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  FlowCsvReader reader(in, options, path.string());
  if (!reader.schema().labelled) throw SchemaError(path.string() + ": dataset is not labelled");
  DatasetManifest manifest{std::move(name), path, reader.schema().features, 0, {}};
  while (auto row = reader.next()) {
    ++manifest.rows;
    manifest.histogram.add(row->label->attack);
  }
  return manifest;
}

MergeResult merge_datasets(std::span<const MergeInput> inputs, const CategoryMapping& mapping,
                           std::ostream& out, ReadOptions options) {
  MergeResult result;
  if (inputs.empty()) throw SchemaError("merge needs at least one input");

  std::vector<std::ifstream> streams;
  std::vector<CsvSchema> schemas;
  for (const auto& input : inputs) {
    std::ifstream in(input.path, std::ios::binary);
    if (!in) throw IoError("cannot open " + input.path.string());
    streams.push_back(std::move(in));
  }
  // Validate every header before writing anything.
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    FlowCsvReader probe(streams[i], options, inputs[i].path.string());
    if (!probe.schema().labelled) {
      throw SchemaError(inputs[i].path.string() + ": merge inputs must be labelled");
    }
    if (i > 0 && !(probe.schema() == schemas.front())) {
      throw SchemaMismatch(inputs[i].path.string() + ": header differs from " +
                           inputs.front().path.string());
    }
    schemas.push_back(probe.schema());
    streams[i].clear();
    streams[i].seekg(0);
  }

  result.schema = schemas.front();
  result.schema.has_dataset = true;
  FlowCsvWriter writer(out, result.schema);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    FlowCsvReader reader(streams[i], options, inputs[i].path.string());
    DatasetManifest manifest{inputs[i].name, inputs[i].path, reader.schema().features, 0, {}};
    while (auto row = reader.next()) {
      manifest.histogram.add(row->label->attack);
      ++manifest.rows;
      row->label->attack = mapping.map(row->label->attack);
      if (!row->dataset) row->dataset = inputs[i].name;
      result.merged.add(row->label->attack);
      writer.write(*row);
    }
    result.rows += manifest.rows;
    result.inputs.push_back(std::move(manifest));
  }
  return result;
}

std::uint64_t project_basic(std::istream& in, std::ostream& out, ReadOptions options,
                            const std::string& origin) {
  FlowCsvReader reader(in, options, origin);
  CsvSchema schema = reader.schema();
  schema.features = FeatureSet::Basic;
  FlowCsvWriter writer(out, schema);
  while (auto row = reader.next()) {
    row->record = project_basic(row->record);
    writer.write(*row);
  }
  return writer.rows();
}

DistributionReport stats(std::span<const FlowRow> rows) {
  DistributionReport report;
  for (const auto& row : rows) {
    if (!row.label) throw SchemaError("class distribution needs labelled rows");
    report.add(row.label->attack);
  }
  return report;
}

} // namespace nfmeter
