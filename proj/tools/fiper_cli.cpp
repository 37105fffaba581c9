// fiper command line: validate, summarize, render, serve, score-study.
// Documents go to stdout (or -o), diagnostics to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fiper/fiper.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fiper;

void report(const Error& e) {
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    std::cerr << "error: " << v->what() << "\n";
    return;
  }
  std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
}

void write_output(const std::string& body, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << body << std::flush;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("io-error", "cannot open '" + out + "' for writing", out);
  f << body;
  if (!f.flush()) throw Error("io-error", "write to '" + out + "' failed", out);
}

/// `<dir>/<stem>.csv` pairs with `<dir>/<stem>.schema.json`.
std::string sibling_schema(const std::string& csv) {
  fs::path p(csv);
  return (p.parent_path() / (p.stem().string() + ".schema.json")).string();
}

int run_validate(const std::string& schema_path, const std::string& csv_path, const std::vector<std::string>& bundles) {
  int failures = 0;
  std::optional<DatasetSchema> schema;
  try {
    schema = parse_schema(read_file(schema_path), schema_path);
  } catch (const Error& e) {
    report(e);
    return 1;
  }
  try {
    const Dataset data = parse_dataset_csv(read_file(csv_path), *schema, csv_path);
    std::cerr << csv_path << ": ok (" << data.rows.size() << " rows)\n";
  } catch (const Error& e) {
    report(e);
    ++failures;
  }
  for (const auto& b : bundles) {
    try {
      parse_bundle(read_file(b), *schema, b);
      std::cerr << b << ": ok\n";
    } catch (const Error& e) {
      report(e);
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

int run_summarize(const std::string& schema_path, const std::string& csv_path, const std::string& out) {
  const DatasetEntry entry = load_dataset(read_file(schema_path), read_file(csv_path), schema_path, csv_path);
  write_output(dump(summaries_to_json(entry.schema().id, entry.summaries)) + "\n", out);
  return 0;
}

struct RenderArgs {
  std::string bundle;
  std::string dataset;
  std::string schema;
  std::string format = "svg";
  std::string filter = "all";
  std::string sort = "abs";
  std::string out;
};

int run_render(const RenderArgs& a) {
  const std::string schema_path = a.schema.empty() ? sibling_schema(a.dataset) : a.schema;
  const DatasetEntry entry = load_dataset(read_file(schema_path), read_file(a.dataset), schema_path, a.dataset);
  const ExplanationBundle bundle = parse_bundle(read_file(a.bundle), entry.schema(), a.bundle);
  ViewOptions options;
  options.filter = parse_filter(a.filter);
  options.sort = parse_sort(a.sort);
  write_output(render_explanation(bundle, entry, parse_format(a.format), options), a.out);
  return 0;
}

int run_serve(const std::string& data_dir, const std::string& host, int port, const std::string& ui_dir) {
  Api api(data_dir.empty() ? Store{} : load_data_dir(data_dir));
  const auto snap = api.snapshot();
  std::cerr << "loaded " << snap->datasets.size() << " dataset(s), " << snap->bundles.size() << " bundle(s)\n";
  Server server(api, ui_dir);
  int bound = port;
  if (port == 0) {
    bound = server.bind_any(host);
    if (bound < 0) throw Error("bind-failed", "cannot bind " + host + " on any port");
  } else if (!server.bind(host, port)) {
    throw Error("bind-failed", "cannot bind " + host + ":" + std::to_string(port));
  }
  std::cerr << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  return server.listen_after_bind() ? 0 : 1;
}

void print_report_text(const study::StudyReport& r, std::ostream& os) {
  using namespace study;
  const auto& m = r.matrix;
  os << "scored cells: " << m.cells.size() << " of " << m.grid_size() << "\n";
  const ErrorCounts t = m.total();
  os << "errors: E1 " << t.e1 << ", E2 " << t.e2 << ", total " << t.total() << "\n";
  for (Modality c : m.conditions) {
    const ErrorCounts ct = m.total_for(c);
    os << "  " << to_string(c) << ": E1 " << ct.e1 << ", E2 " << ct.e2 << ", total " << ct.total() << "\n";
  }
  if (!m.missing.empty()) os << "missing cells: " << m.missing.size() << "\n";
  if (r.delta) {
    os << "delta vs " << to_string(r.delta->baseline) << ":\n";
    for (Modality c : m.conditions) {
      if (c == r.delta->baseline) continue;
      int sum = 0;
      for (const auto& [k, d] : r.delta->cells)
        if (k.condition == c) sum += d.total;
      os << "  " << to_string(c) << ": " << (sum > 0 ? "+" : "") << sum << "\n";
    }
  }
  if (!r.times.empty()) {
    os << "median completion time (s):\n";
    for (const auto& ts : r.times)
      os << "  " << to_string(ts.group.condition) << " instance " << ts.group.instance << ": "
         << format_number(ts.median) << "\n";
  }
  for (const auto& [e, score] : r.tlx)
    os << "raw TLX " << e.participant_id << " " << to_string(e.condition) << ": " << format_number(score) << "\n";
  for (const auto& [e, s] : r.ues)
    os << "UES " << e.participant_id << ": FA " << format_number(s.focused_attention) << ", PU "
       << format_number(s.perceived_usability) << ", AE " << format_number(s.aesthetic_appeal) << ", RW "
       << format_number(s.reward) << ", overall " << format_number(s.overall) << "\n";
}

int run_score(const std::string& truth_path, const std::string& responses_path, const std::string& baseline,
              bool json, const std::string& out) {
  study::StudyInput input;
  input.truths = truths_from_json(parse_json(read_file(truth_path), truth_path));
  responses_from_json(parse_json(read_file(responses_path), responses_path), input);
  const study::StudyReport report = study::score_study(input, study::parse_modality(baseline));
  if (json) {
    write_output(dump(report_to_json(report)) + "\n", out);
  } else {
    std::ostringstream os;
    print_report_text(report, os);
    write_output(os.str(), out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiper: feature importance + rule explanation views"};
  app.require_subcommand(1);

  std::string schema, dataset, out;
  std::vector<std::string> bundles;

  auto* validate = app.add_subcommand("validate", "Validate a schema, its dataset and bundles");
  validate->add_option("schema", schema, "Schema document")->required();
  validate->add_option("dataset", dataset, "Dataset CSV")->required();
  validate->add_option("bundles", bundles, "Explanation bundles");

  auto* summarize = app.add_subcommand("summarize", "Print per-feature summaries");
  summarize->add_option("schema", schema, "Schema document")->required();
  summarize->add_option("dataset", dataset, "Dataset CSV")->required();
  summarize->add_option("-o,--output", out, "Output file (default stdout)");

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "Render one explanation");
  render->add_option("bundle", ra.bundle, "Explanation bundle")->required();
  render->add_option("--dataset", ra.dataset, "Dataset CSV")->required();
  render->add_option("--schema", ra.schema, "Schema document (default: <dataset stem>.schema.json)");
  render->add_option("--format", ra.format, "svg, text, blocks or view")->capture_default_str();
  render->add_option("--filter", ra.filter, "all or rule")->capture_default_str();
  render->add_option("--sort", ra.sort, "abs or schema")->capture_default_str();
  render->add_option("-o,--output", ra.out, "Output file (default stdout)");

  std::string data_dir, host = "127.0.0.1", ui_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--data-dir", data_dir, "Directory of schemas, datasets and bundles")->envname("FIPER_DATA_DIR");
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--ui-dir", ui_dir, "Static UI assets mounted at /");

  std::string truth, responses, baseline = "text";
  bool json = false;
  auto* score = app.add_subcommand("score-study", "Score study responses against truth vectors");
  score->add_option("truth", truth, "Truth document")->required();
  score->add_option("responses", responses, "Responses document")->required();
  score->add_option("--baseline", baseline, "Baseline condition")->capture_default_str();
  score->add_flag("--json", json, "Print the report as JSON");
  score->add_option("-o,--output", out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return run_validate(schema, dataset, bundles);
    if (*summarize) return run_summarize(schema, dataset, out);
    if (*render) return run_render(ra);
    if (*serve) return run_serve(data_dir, host, port, ui_dir);
    if (*score) return run_score(truth, responses, baseline, json, out);
  } catch (const Error& e) {
    report(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
