#pragma once

// In-memory store of schemas, datasets, summaries and bundles, plus the render
// entry point shared by the CLI and the HTTP service so both produce the same
// bytes.
//
// Data directory layout:
//   <dir>/<name>.schema.json   schema document
//   <dir>/<name>.csv           dataset for that schema
//   <dir>/bundles/*.json       one explanation bundle per file

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fiper/document.hpp"
#include "fiper/serialize.hpp"
#include "fiper/stats.hpp"
#include "fiper/svg.hpp"
#include "fiper/view.hpp"

namespace fiper {

struct DatasetEntry {
  Dataset data;
  std::vector<FeatureSummary> summaries;  // schema order

  const DatasetSchema& schema() const noexcept { return data.schema; }
};

inline DatasetEntry load_dataset(std::string_view schema_text, std::string_view csv_text,
                                 const std::string& schema_source = {}, const std::string& csv_source = {}) {
  DatasetSchema schema = parse_schema(schema_text, schema_source);
  DatasetEntry entry{parse_dataset_csv(csv_text, schema, csv_source), {}};
  entry.summaries = summarize_dataset(entry.data);
  return entry;
}

struct Store {
  std::map<std::string, DatasetEntry> datasets;
  std::map<std::string, ExplanationBundle> bundles;

  const DatasetEntry* dataset(std::string_view id) const {
    auto it = datasets.find(std::string(id));
    return it == datasets.end() ? nullptr : &it->second;
  }

  const ExplanationBundle* bundle(std::string_view id) const {
    auto it = bundles.find(std::string(id));
    return it == bundles.end() ? nullptr : &it->second;
  }

  void add_dataset(DatasetEntry entry) {
    const std::string id = entry.schema().id;
    if (id.empty()) throw Error("empty-id", "schema has no id", "id");
    datasets.insert_or_assign(id, std::move(entry));
  }

  /// Parses, validates and inserts a bundle. Its schema_ref must resolve.
  const ExplanationBundle& add_bundle(std::string_view text, const std::string& source = {}) {
    const Json doc = parse_json(text, source);
    auto ref = doc.is_object() ? doc.find("schema_ref") : doc.end();
    if (!doc.is_object() || ref == doc.end() || !ref->is_string())
      throw Error("parse-error", source + ": bundle has no schema_ref", source);
    const DatasetEntry* entry = dataset(ref->get<std::string>());
    if (!entry)
      throw Error("unknown-schema", source + ": schema_ref '" + ref->get<std::string>() + "' does not resolve", source);
    ExplanationBundle b = parse_bundle(text, entry->schema(), source);
    if (bundles.count(b.id)) throw Error("duplicate-id", source + ": bundle id '" + b.id + "' already loaded", source);
    auto [it, _] = bundles.emplace(b.id, std::move(b));
    return it->second;
  }
};

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

/// Loads every schema/dataset pair and every bundle under `dir`. Any
/// malformed file aborts the load with its path in the error.
inline Store load_data_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("io-error", "data directory '" + dir.string() + "' is not readable", dir.string());
  Store store;

  std::vector<fs::path> schemas;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && ends_with(e.path().filename().string(), ".schema.json")) schemas.push_back(e.path());
  std::sort(schemas.begin(), schemas.end());
  for (const auto& schema_path : schemas) {
    const std::string name = schema_path.filename().string();
    const fs::path csv_path = dir / (name.substr(0, name.size() - std::string_view(".schema.json").size()) + ".csv");
    DatasetEntry entry = load_dataset(read_file(schema_path.string()), read_file(csv_path.string()),
                                      schema_path.string(), csv_path.string());
    if (store.dataset(entry.schema().id))
      throw Error("duplicate-id", schema_path.string() + ": dataset id '" + entry.schema().id + "' already loaded",
                  schema_path.string());
    store.add_dataset(std::move(entry));
  }

  const fs::path bundle_dir = dir / "bundles";
  if (fs::is_directory(bundle_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(bundle_dir))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) store.add_bundle(read_file(f.string()), f.string());
  }
  return store;
}

// ---------------------------------------------------------------------------
// Rendering shared by CLI and service

enum class OutputFormat { svg, text, blocks, view };

inline OutputFormat parse_format(std::string_view s) {
  if (s == "svg") return OutputFormat::svg;
  if (s == "text") return OutputFormat::text;
  if (s == "blocks") return OutputFormat::blocks;
  if (s == "view" || s == "json") return OutputFormat::view;
  throw Error("bad-option", "unknown format '" + std::string(s) + "' (expected svg, text, blocks or view)", "format");
}

inline std::string_view content_type(OutputFormat f) {
  switch (f) {
    case OutputFormat::svg: return "image/svg+xml";
    case OutputFormat::text: return "text/plain; charset=utf-8";
    case OutputFormat::blocks:
    case OutputFormat::view: return "application/json";
  }
  return "application/octet-stream";
}

inline std::string render_explanation(const ExplanationBundle& bundle, const DatasetEntry& entry, OutputFormat format,
                                      const ViewOptions& options = {}, const SvgGeometry& geometry = {}) {
  switch (format) {
    case OutputFormat::svg: return render_svg(build_fiper_view(bundle, entry.summaries, options), geometry);
    case OutputFormat::text: return render_text_modality(bundle, entry.schema().target_name);
    case OutputFormat::blocks: return dump(blocks_to_json(render_block_modality(bundle, entry.schema().target_name))) + "\n";
    case OutputFormat::view: return dump(view_to_json(build_fiper_view(bundle, entry.summaries, options))) + "\n";
  }
  return {};
}

}  // namespace fiper
