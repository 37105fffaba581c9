#pragma once

// Canonical documents: schema and bundle JSON, dataset CSV.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fiper/error.hpp"
#include "fiper/model.hpp"
#include "fiper/rule_text.hpp"

namespace fiper {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json(std::string_view text, const std::string& source = {}) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw Error("parse-error", (source.empty() ? "" : source + ": ") + e.what(), source);
  }
}

/// Serializes with invalid UTF-8 replaced rather than thrown on.
inline std::string dump(const Json& doc, int indent = 2) {
  return doc.dump(indent, ' ', false, Json::error_handler_t::replace);
}

namespace document_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw Error("parse-error", path + ": " + what, path);
}

inline const Json& member(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline std::string string_at(const Json& obj, const char* key, const std::string& path) {
  const Json& v = member(obj, key, path);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

inline double number_of(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

inline std::vector<std::string> strings_of(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) fail(path + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

inline bool bool_at(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return false;
  if (!it->is_boolean()) fail(join(path, key), "expected a boolean");
  return it->get<bool>();
}

}  // namespace document_detail

// ---------------------------------------------------------------------------
// Schema

inline Json schema_to_json(const DatasetSchema& schema) {
  Json features = Json::array();
  for (const auto& f : schema.features) {
    Json doc{{"name", f.name}, {"kind", std::string(to_string(f.kind))}};
    if (f.is_numerical())
      doc["domain"] = Json::array({f.lo, f.hi});
    else
      doc["domain"] = f.labels;
    features.push_back(std::move(doc));
  }
  return Json{{"id", schema.id},
              {"target_name", schema.target_name},
              {"target_classes", schema.target_classes},
              {"features", std::move(features)}};
}

inline DatasetSchema schema_from_json(const Json& doc) {
  using namespace document_detail;
  DatasetSchema schema;
  schema.id = string_at(doc, "id", "");
  schema.target_name = string_at(doc, "target_name", "");
  schema.target_classes = strings_of(member(doc, "target_classes", ""), "target_classes");
  const Json& features = member(doc, "features", "");
  if (!features.is_array()) fail("features", "expected an array");
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::string path = "features[" + std::to_string(i) + "]";
    const Json& f = features[i];
    FeatureSpec spec;
    spec.name = string_at(f, "name", path);
    const std::string kind = string_at(f, "kind", path);
    const Json& domain = member(f, "domain", path);
    if (kind == "numerical") {
      spec.kind = FeatureKind::numerical;
      if (!domain.is_array() || domain.size() != 2) fail(path + ".domain", "expected [lo, hi]");
      spec.lo = number_of(domain[0], path + ".domain[0]");
      spec.hi = number_of(domain[1], path + ".domain[1]");
    } else if (kind == "categorical") {
      spec.kind = FeatureKind::categorical;
      spec.labels = strings_of(domain, path + ".domain");
    } else {
      fail(path + ".kind", "expected \"numerical\" or \"categorical\"");
    }
    schema.features.push_back(std::move(spec));
  }
  return schema;
}

/// Parses and validates a schema document.
inline DatasetSchema parse_schema(std::string_view text, const std::string& source = {}) {
  DatasetSchema schema = schema_from_json(parse_json(text, source));
  if (auto report = validate_schema(schema); !report.empty()) throw ValidationError(std::move(report), source);
  return schema;
}

// ---------------------------------------------------------------------------
// Rules and bundles

inline Json predicate_to_json(const Predicate& p) {
  Json doc{{"feature", p.feature}};
  if (p.is_interval()) {
    const auto& iv = p.interval();
    doc["kind"] = "interval";
    if (iv.lower) doc["lower"] = *iv.lower;
    if (iv.upper) doc["upper"] = *iv.upper;
    if (iv.lower_open) doc["lower_open"] = true;
    if (iv.upper_open) doc["upper_open"] = true;
  } else {
    doc["kind"] = "set";
    doc["labels"] = p.set().labels;
  }
  return doc;
}

inline Json rule_to_json(const Rule& rule) {
  Json premise = Json::array();
  for (const auto& p : rule.premise) premise.push_back(predicate_to_json(p));
  return Json{{"premise", std::move(premise)}, {"consequence", rule.consequence}};
}

inline Predicate predicate_from_json(const Json& doc, const std::string& path) {
  using namespace document_detail;
  Predicate p;
  p.feature = string_at(doc, "feature", path);
  const std::string kind = string_at(doc, "kind", path);
  if (kind == "interval") {
    NumericInterval iv;
    if (auto it = doc.find("lower"); it != doc.end() && !it->is_null()) iv.lower = number_of(*it, path + ".lower");
    if (auto it = doc.find("upper"); it != doc.end() && !it->is_null()) iv.upper = number_of(*it, path + ".upper");
    iv.lower_open = bool_at(doc, "lower_open", path);
    iv.upper_open = bool_at(doc, "upper_open", path);
    p.body = iv;
  } else if (kind == "set") {
    p.body = CategorySet{strings_of(member(doc, "labels", path), path + ".labels")};
  } else {
    fail(path + ".kind", "expected \"interval\" or \"set\"");
  }
  return p;
}

inline Rule rule_from_json(const Json& doc, const DatasetSchema& schema, const std::string& path = "rule") {
  using namespace document_detail;
  if (doc.is_string()) {
    try {
      return parse_rule_text(doc.get<std::string>(), schema);
    } catch (const ParseError& e) {
      throw Error(e.code(), path + ": " + e.what(), path);
    }
  }
  Rule rule;
  const Json& premise = member(doc, "premise", path);
  if (!premise.is_array()) fail(path + ".premise", "expected an array");
  for (std::size_t i = 0; i < premise.size(); ++i) {
    const std::string at = path + ".premise[" + std::to_string(i) + "]";
    try {
      merge_predicate(rule.premise, predicate_from_json(premise[i], at));
    } catch (const SchemaMismatch& e) {
      throw Error("kind-mismatch", at + ": " + e.what(), at);
    }
  }
  rule.consequence = string_at(doc, "consequence", path);
  return rule;
}

inline Json value_to_json(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

inline Json instance_to_json(const Instance& instance) {
  Json doc = Json::object();
  for (const auto& [name, value] : instance.values) doc[name] = value_to_json(value);
  return doc;
}

inline Instance instance_from_json(const Json& doc, const std::string& path = "instance") {
  using namespace document_detail;
  if (!doc.is_object()) fail(path, "expected an object");
  Instance instance;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it->is_number())
      instance.values.emplace(it.key(), it->get<double>());
    else if (it->is_string())
      instance.values.emplace(it.key(), it->get<std::string>());
    else
      fail(path + "." + it.key(), "expected a number or a string");
  }
  return instance;
}

inline Json bundle_to_json(const ExplanationBundle& b) {
  Json importance = Json::array();
  for (const auto& w : b.importance) importance.push_back(Json{{"feature", w.feature}, {"weight", w.weight}});
  return Json{{"id", b.id},
              {"schema_ref", b.schema_ref},
              {"instance", instance_to_json(b.instance)},
              {"prediction", b.prediction},
              {"rule", rule_to_json(b.rule)},
              {"importance", std::move(importance)}};
}

/// Reads the bundle fields without validating them.
inline ExplanationBundle bundle_from_json(const Json& doc, const DatasetSchema& schema) {
  using namespace document_detail;
  ExplanationBundle b;
  b.id = string_at(doc, "id", "");
  b.schema_ref = string_at(doc, "schema_ref", "");
  b.instance = instance_from_json(member(doc, "instance", ""));
  b.prediction = string_at(doc, "prediction", "");
  b.rule = rule_from_json(member(doc, "rule", ""), schema);
  const Json& importance = member(doc, "importance", "");
  if (!importance.is_array()) fail("importance", "expected an array");
  for (std::size_t i = 0; i < importance.size(); ++i) {
    const std::string path = "importance[" + std::to_string(i) + "]";
    b.importance.push_back({string_at(importance[i], "feature", path),
                            number_of(member(importance[i], "weight", path), path + ".weight")});
  }
  return b;
}

/// Parses a bundle document and rejects it unless it validates cleanly.
inline ExplanationBundle parse_bundle(std::string_view text, const DatasetSchema& schema,
                                      const std::string& source = {}) {
  ExplanationBundle b = [&] {
    try {
      return bundle_from_json(parse_json(text, source), schema);
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& e) {
      if (source.empty()) throw;
      throw Error(e.code(), source + ": " + e.what(), e.path());
    }
  }();
  if (auto report = validate_bundle(b, schema); !report.empty()) throw ValidationError(std::move(report), source);
  return b;
}

inline std::string emit_bundle(const ExplanationBundle& bundle) { return dump(bundle_to_json(bundle)) + "\n"; }

// ---------------------------------------------------------------------------
// Datasets

struct Dataset {
  DatasetSchema schema;
  std::vector<Instance> rows;
  std::vector<std::string> targets;

  /// Column of raw values for one feature, in row order.
  std::vector<Value> column(std::string_view feature) const {
    std::vector<Value> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(*r.find(feature));
    return out;
  }
};

/// Splits RFC 4180 style CSV into records. Quoted fields may contain commas,
/// doubled quotes, and newlines.
inline std::vector<std::vector<std::string>> read_csv_records(std::string_view text, const std::string& source = {}) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty())
          throw Error("parse-error", source + ":" + std::to_string(line) + ": stray quote in unquoted field", source);
        quoted = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !record.empty()) {
          record.push_back(std::move(field));
          records.push_back(std::move(record));
        }
        field.clear();
        record.clear();
        field_started = false;
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw Error("parse-error", source + ": unterminated quoted field", source);
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

/// Header-row CSV with one column per schema feature plus the target column.
inline Dataset parse_dataset_csv(std::string_view text, const DatasetSchema& schema, const std::string& source = {}) {
  const auto records = read_csv_records(text, source);
  if (records.empty()) throw Error("parse-error", source + ": dataset has no header row", source);
  const auto& header = records.front();

  ValidationReport report;
  std::vector<const FeatureSpec*> columns(header.size(), nullptr);
  std::optional<std::size_t> target_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name == schema.target_name) {
      target_col = c;
    } else if (const FeatureSpec* f = schema.find(name)) {
      for (std::size_t k = 0; k < c; ++k)
        if (columns[k] == f) report.push_back({"duplicate-column", "header", "column '" + name + "' repeats"});
      columns[c] = f;
    } else {
      report.push_back({"unknown-column", "header", "column '" + name + "' is not in the schema"});
    }
  }
  for (const auto& f : schema.features)
    if (std::find(columns.begin(), columns.end(), &f) == columns.end())
      report.push_back({"missing-column", "header", "no column for feature '" + f.name + "'"});
  if (!target_col) report.push_back({"missing-column", "header", "no column for target '" + schema.target_name + "'"});
  if (!report.empty()) throw ValidationError(std::move(report), source);

  Dataset data;
  data.schema = schema;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "row " + std::to_string(r);
    if (rec.size() != header.size()) {
      report.push_back({"field-count", where, "expected " + std::to_string(header.size()) + " fields, found " +
                                                  std::to_string(rec.size())});
      continue;
    }
    Instance row;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      const std::string cell = trim(rec[c]);
      if (c == *target_col) {
        if (!schema.has_class(cell)) report.push_back({"unknown-class", where + "." + schema.target_name, "class '" + cell + "' is not a target class"});
        data.targets.push_back(cell);
        continue;
      }
      const FeatureSpec& f = *columns[c];
      const std::string path = where + "." + f.name;
      if (f.is_numerical()) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
          report.push_back({"bad-number", path, "'" + cell + "' is not a finite number"});
          continue;
        }
        row.values.emplace(f.name, v);
      } else {
        if (!f.has_label(cell)) {
          report.push_back({"unknown-label", path, "label '" + cell + "' is not in the domain"});
          continue;
        }
        row.values.emplace(f.name, cell);
      }
    }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) report.push_back({"empty-dataset", "rows", "dataset has no rows"});
  if (!report.empty()) throw ValidationError(std::move(report), source);
  return data;
}

}  // namespace fiper
