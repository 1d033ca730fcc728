#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfmeter/csv.hpp"
#include "nfmeter/dataset.hpp"
#include "nfmeter/errors.hpp"
#include "nfmeter/labeller.hpp"
#include "nfmeter/pcap.hpp"
#include "nfmeter/pipeline.hpp"

namespace fs = std::filesystem;
using namespace nfmeter;

namespace {

constexpr int kExitFatal = 2;

struct RunConfig {
  std::vector<std::string> inputs;
  std::string output;
  double idle_timeout_s = 30;
  double active_timeout_s = 120;
  std::string l7_table;
  std::string ground_truth;
  std::string mapping;
  std::string variant = "extended";
  bool lenient = false;
  unsigned workers = 1;
  bool time_windows = false;
  bool unidirectional = false;
};

class Fatal : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Destination for data: the -o file, or standard output.
class Output {
public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw Fatal("cannot create output file " + path);
    path_ = path;
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw Fatal("write failed for " + (path_.empty() ? "standard output" : path_));
  }

private:
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

void require_inputs_exist(const std::vector<std::string>& inputs) {
  for (const auto& in : inputs) {
    std::error_code ec;
    if (!fs::is_regular_file(in, ec)) throw Fatal("input file not found: " + in);
  }
}

ReadOptions read_options(const RunConfig& cfg) { return ReadOptions{!cfg.lenient}; }

FeatureSet variant_of(const RunConfig& cfg) {
  return cfg.variant == "basic" ? FeatureSet::Basic : FeatureSet::Extended;
}

ExtractConfig extract_config(const RunConfig& cfg) {
  const auto to_us = [](double s, const char* what) {
    const double us = std::floor(s * 1e6);
    if (!(us >= 1) || us > 1e15) throw Fatal(std::string(what) + " must be a positive number of seconds");
    return static_cast<std::int64_t>(us);
  };
  ExtractConfig config;
  config.timeouts = {to_us(cfg.idle_timeout_s, "--idle-timeout"),
                     to_us(cfg.active_timeout_s, "--active-timeout")};
  if (cfg.workers == 0) throw Fatal("--workers must be at least 1");
  config.workers = cfg.workers;
  config.strict = !cfg.lenient;
  if (!cfg.l7_table.empty()) {
    require_inputs_exist({cfg.l7_table});
    config.l7_table = L7Table::load(cfg.l7_table);
  }
  return config;
}

void report_diagnostics(const std::string& origin, const std::vector<RowDiagnostic>& diags) {
  for (const auto& d : diags) {
    std::cerr << origin << ":" << d.line << ": skipped: " << d.message << "\n";
  }
}

ExtractResult run_extraction(const RunConfig& cfg) {
  const auto config = extract_config(cfg);
  std::vector<fs::path> paths(cfg.inputs.begin(), cfg.inputs.end());
  auto result = extract_flows(paths, config);
  for (const auto& c : result.captures) {
    std::cerr << c.path.string() << ": " << c.stats.frames << " frames, " << c.stats.decoded
              << " IPv4 packets, " << c.flows << " flows";
    if (c.stats.skipped_total() > 0) {
      std::cerr << ", skipped";
      for (const auto& [reason, n] : c.stats.skipped) std::cerr << " " << to_string(reason) << "=" << n;
    }
    std::cerr << "\n";
    if (!c.truncation.empty()) std::cerr << "warning: " << c.truncation << "\n";
  }
  return result;
}

LabelIndex ground_truth(const RunConfig& cfg) {
  require_inputs_exist({cfg.ground_truth});
  auto index = load_ground_truth(cfg.ground_truth);
  if (!index.diagnostics().empty()) {
    report_diagnostics(cfg.ground_truth, index.diagnostics());
    if (!cfg.lenient) {
      throw Fatal(cfg.ground_truth + ": " + std::to_string(index.diagnostics().size()) +
                  " malformed ground-truth rows (use --lenient to skip them)");
    }
  }
  return index;
}

LabelOptions label_options(const RunConfig& cfg) {
  LabelOptions options;
  options.bidirectional = !cfg.unidirectional;
  options.use_time_windows = cfg.time_windows;
  return options;
}

void write_rows(const RunConfig& cfg, const CsvSchema& schema, std::span<const FlowRow> rows) {
  Output out(cfg.output);
  FlowCsvWriter writer(out.stream(), schema);
  for (const auto& row : rows) writer.write(row);
  out.close();
}

std::vector<FlowRow> rows_of(const ExtractResult& result, FeatureSet features) {
  std::vector<FlowRow> rows;
  rows.reserve(result.flows.size());
  for (const auto& f : result.flows) {
    rows.push_back({features == FeatureSet::Basic ? project_basic(f.record) : f.record,
                    std::nullopt, std::nullopt});
  }
  return rows;
}

int cmd_extract(const RunConfig& cfg) {
  require_inputs_exist(cfg.inputs);
  const auto result = run_extraction(cfg);
  const auto features = variant_of(cfg);
  auto rows = rows_of(result, features);
  if (!cfg.ground_truth.empty()) {
    const auto index = ground_truth(cfg);
    std::vector<FlowTiming> timings;
    for (const auto& f : result.flows) timings.push_back(f.timing);
    const auto summary = label_dataset(rows, index, timings, label_options(cfg));
    write_rows(cfg, {features, true, false}, rows);
    std::cerr << summary.distribution.render();
    return 0;
  }
  write_rows(cfg, {features, false, false}, rows);
  std::cerr << "wrote " << rows.size() << " flows\n";
  return 0;
}

int cmd_label(const RunConfig& cfg) {
  require_inputs_exist(cfg.inputs);
  if (cfg.ground_truth.empty()) throw Fatal("label needs --ground-truth");
  const auto index = ground_truth(cfg);
  const bool captures = looks_like_pcap(cfg.inputs.front());
  for (const auto& in : cfg.inputs) {
    if (looks_like_pcap(in) != captures) throw Fatal("cannot mix captures and flow files: " + in);
  }

  std::vector<FlowRow> rows;
  std::vector<FlowTiming> timings;
  CsvSchema schema{variant_of(cfg), true, false};
  if (captures) {
    const auto result = run_extraction(cfg);
    rows = rows_of(result, schema.features);
    for (const auto& f : result.flows) timings.push_back(f.timing);
  } else {
    if (cfg.time_windows) {
      throw Fatal("--time-windows needs flow timing, which flow CSV files do not carry; "
                  "label the captures directly");
    }
    std::optional<CsvSchema> first;
    for (const auto& in : cfg.inputs) {
      auto file = read_flows(in, read_options(cfg));
      report_diagnostics(in, file.diagnostics);
      if (first && !(file.schema == *first)) throw SchemaMismatch(in + ": header differs from " + cfg.inputs.front());
      first = file.schema;
      std::move(file.rows.begin(), file.rows.end(), std::back_inserter(rows));
    }
    schema = *first;
    schema.labelled = true;
  }
  const auto summary = label_dataset(rows, index, timings, label_options(cfg));
  write_rows(cfg, schema, rows);
  std::cerr << summary.distribution.render();
  return 0;
}

MergeInput merge_input(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0 && !fs::exists(arg)) {
    return {arg.substr(0, eq), arg.substr(eq + 1)};
  }
  return {fs::path(arg).stem().string(), arg};
}

int cmd_merge(const RunConfig& cfg) {
  std::vector<MergeInput> inputs;
  for (const auto& arg : cfg.inputs) inputs.push_back(merge_input(arg));
  for (const auto& in : inputs) require_inputs_exist({in.path.string()});
  CategoryMapping mapping = CategoryMapping::defaults();
  if (!cfg.mapping.empty()) {
    require_inputs_exist({cfg.mapping});
    mapping = CategoryMapping::load(cfg.mapping);
  }
  // merge validates every header before producing output, so a failure
  // never leaves a partial file behind
  std::ostringstream buffer;
  const auto result = merge_datasets(inputs, mapping, buffer, read_options(cfg));
  Output out(cfg.output);
  out.stream() << buffer.view();
  out.close();
  for (const auto& m : result.inputs) std::cerr << m.name << ": " << m.rows << " rows\n";
  std::cerr << result.merged.render();
  return 0;
}

int cmd_stats(const RunConfig& cfg) {
  require_inputs_exist(cfg.inputs);
  Output out(cfg.output);
  for (const auto& in : cfg.inputs) {
    const auto file = read_flows(in, read_options(cfg));
    report_diagnostics(in, file.diagnostics);
    if (!file.schema.labelled) throw SchemaError(in + ": statistics need a labelled flow file");
    if (cfg.inputs.size() > 1) out.stream() << "# " << in << "\n";
    out.stream() << stats(file.rows).render();
    if (file.schema.has_dataset) {
      std::map<std::string, std::vector<FlowRow>> by_dataset;
      for (const auto& row : file.rows) by_dataset[*row.dataset].push_back(row);
      for (const auto& [name, rows] : by_dataset) {
        out.stream() << "\n# Dataset " << name << "\n" << stats(rows).render();
      }
    }
  }
  out.close();
  return 0;
}

int cmd_project(const RunConfig& cfg) {
  require_inputs_exist(cfg.inputs);
  if (cfg.inputs.size() != 1) throw Fatal("project takes exactly one input file");
  std::ifstream in(cfg.inputs.front(), std::ios::binary);
  if (!in) throw Fatal("cannot open " + cfg.inputs.front());
  std::ostringstream buffer;
  const auto n = project_basic(in, buffer, read_options(cfg), cfg.inputs.front());
  Output out(cfg.output);
  out.stream() << buffer.view();
  out.close();
  std::cerr << "projected " << n << " rows to " << kBasicFeatureCount << " features\n";
  return 0;
}

void add_common(CLI::App& cmd, RunConfig& cfg, bool timeouts) {
  cmd.add_option("-o,--output", cfg.output, "Output file (standard output when omitted)");
  auto* strict = cmd.add_flag("--strict", "Treat malformed input rows or truncated captures as fatal (default)");
  auto* lenient = cmd.add_flag("--lenient", cfg.lenient, "Skip malformed input with a warning instead of failing");
  strict->excludes(lenient);
  if (!timeouts) return;
  cmd.add_option("--idle-timeout", cfg.idle_timeout_s, "Idle timeout in seconds")->capture_default_str();
  cmd.add_option("--active-timeout", cfg.active_timeout_s, "Active (lifetime) timeout in seconds")
      ->capture_default_str();
  cmd.add_option("--l7-table", cfg.l7_table, "Port to application protocol table (protocol,port,id)");
  cmd.add_option("--variant", cfg.variant, "Feature set to write")
      ->check(CLI::IsMember({"basic", "extended"}))
      ->capture_default_str();
  cmd.add_option("--workers", cfg.workers, "Flow tables per capture; output does not depend on it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_labelling(CLI::App& cmd, RunConfig& cfg, bool required) {
  auto* gt = cmd.add_option("--ground-truth", cfg.ground_truth,
                            "Ground-truth events CSV (src_ip,dst_ip,src_port,dst_port,protocol,attack"
                            "[,start_us,end_us])");
  if (required) gt->required();
  cmd.add_flag("--time-windows", cfg.time_windows,
               "Only match events whose start_us/end_us window overlaps the flow (capture input only)");
  cmd.add_flag("--unidirectional", cfg.unidirectional,
               "Match events only in the flow's own client to server orientation");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert packet captures into labelled NetFlow feature datasets"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* extract = app.add_subcommand("extract", "Meter pcap captures into flow records");
  extract->add_option("inputs", cfg.inputs, "Input pcap files")->required();
  add_common(*extract, cfg, true);
  add_labelling(*extract, cfg, false);

  auto* label = app.add_subcommand("label", "Label flow CSV files or captures against ground truth");
  label->add_option("inputs", cfg.inputs, "Flow CSV files, or pcap captures")->required();
  add_common(*label, cfg, true);
  add_labelling(*label, cfg, true);

  auto* merge = app.add_subcommand("merge", "Merge labelled flow files and canonicalise attack names");
  merge->add_option("inputs", cfg.inputs,
                    "Labelled flow files as NAME=PATH, or PATH (dataset named after the file)")
      ->required();
  merge->add_option("--mapping", cfg.mapping, "Category mapping CSV (source,canonical)");
  add_common(*merge, cfg, false);

  auto* stats_cmd = app.add_subcommand("stats", "Print the class distribution of labelled flow files");
  stats_cmd->add_option("inputs", cfg.inputs, "Labelled flow files")->required();
  add_common(*stats_cmd, cfg, false);

  auto* project = app.add_subcommand("project", "Reduce a flow file to the 12 basic features");
  project->add_option("input", cfg.inputs, "Flow CSV file")->required()->expected(1);
  add_common(*project, cfg, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFatal;
  }

  try {
    if (extract->parsed()) return cmd_extract(cfg);
    if (label->parsed()) return cmd_label(cfg);
    if (merge->parsed()) return cmd_merge(cfg);
    if (stats_cmd->parsed()) return cmd_stats(cfg);
    if (project->parsed()) return cmd_project(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
