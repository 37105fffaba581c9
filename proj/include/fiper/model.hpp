#pragma once

// Core explanation objects: schemas, instances, rules (conjunctions of
// per-feature predicates), feature-importance weights, and the bundle that
// ties one local explanation together.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fiper/error.hpp"

namespace fiper {

enum class FeatureKind { numerical, categorical };

inline std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::numerical ? "numerical" : "categorical";
}

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numerical;
  // numerical domain
  double lo = 0.0;
  double hi = 0.0;
  // categorical domain, in display order
  std::vector<std::string> labels;

  bool is_numerical() const noexcept { return kind == FeatureKind::numerical; }

  bool has_label(std::string_view label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }

  static FeatureSpec numerical(std::string name, double lo, double hi) {
    return {std::move(name), FeatureKind::numerical, lo, hi, {}};
  }
  static FeatureSpec categorical(std::string name, std::vector<std::string> labels) {
    return {std::move(name), FeatureKind::categorical, 0.0, 0.0, std::move(labels)};
  }

  bool operator==(const FeatureSpec&) const = default;
};

struct DatasetSchema {
  std::string id;
  std::vector<FeatureSpec> features;
  std::string target_name;
  std::vector<std::string> target_classes;

  const FeatureSpec* find(std::string_view name) const {
    for (const auto& f : features)
      if (f.name == name) return &f;
    return nullptr;
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
      if (features[i].name == name) return i;
    return std::nullopt;
  }

  bool has_class(std::string_view label) const {
    return std::find(target_classes.begin(), target_classes.end(), label) != target_classes.end();
  }

  bool operator==(const DatasetSchema&) const = default;
};

/// Number for numerical features, label for categorical ones.
using Value = std::variant<double, std::string>;

struct Instance {
  std::map<std::string, Value, std::less<>> values;

  const Value* find(std::string_view feature) const {
    auto it = values.find(feature);
    return it == values.end() ? nullptr : &it->second;
  }

  bool operator==(const Instance&) const = default;
};

/// Closed interval by default; a missing bound is unbounded on that side.
/// The open flags keep strict comparisons from rule sources without loss.
struct NumericInterval {
  std::optional<double> lower;
  std::optional<double> upper;
  bool lower_open = false;
  bool upper_open = false;

  bool contains(double v) const {
    if (lower && (lower_open ? !(v > *lower) : !(v >= *lower))) return false;
    if (upper && (upper_open ? !(v < *upper) : !(v <= *upper))) return false;
    return true;
  }

  bool empty() const {
    if (!lower || !upper) return false;
    if (*lower > *upper) return true;
    return *lower == *upper && (lower_open || upper_open);
  }

  bool operator==(const NumericInterval&) const = default;
};

struct CategorySet {
  std::vector<std::string> labels;

  bool contains(std::string_view label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }

  bool operator==(const CategorySet&) const = default;
};

struct Predicate {
  std::string feature;
  std::variant<NumericInterval, CategorySet> body;

  bool is_interval() const noexcept { return std::holds_alternative<NumericInterval>(body); }
  const NumericInterval& interval() const { return std::get<NumericInterval>(body); }
  const CategorySet& set() const { return std::get<CategorySet>(body); }

  bool empty() const {
    return is_interval() ? interval().empty() : set().labels.empty();
  }

  bool operator==(const Predicate&) const = default;
};

struct Rule {
  std::vector<Predicate> premise;
  std::string consequence;

  const Predicate* find(std::string_view feature) const {
    for (const auto& p : premise)
      if (p.feature == feature) return &p;
    return nullptr;
  }

  bool operator==(const Rule&) const = default;
};

struct FeatureWeight {
  std::string feature;
  double weight = 0.0;

  bool operator==(const FeatureWeight&) const = default;
};

struct ExplanationBundle {
  std::string id;
  std::string schema_ref;
  Instance instance;
  std::string prediction;
  Rule rule;
  std::vector<FeatureWeight> importance;

  bool operator==(const ExplanationBundle&) const = default;
};

// ---------------------------------------------------------------------------
// Coverage and ranking

/// True iff the instance's value satisfies the predicate.
inline bool satisfies(const Value& value, const Predicate& predicate) {
  if (predicate.is_interval()) {
    const double* v = std::get_if<double>(&value);
    if (!v) throw SchemaMismatch("categorical value for interval predicate on '" + predicate.feature + "'");
    return predicate.interval().contains(*v);
  }
  const std::string* label = std::get_if<std::string>(&value);
  if (!label) throw SchemaMismatch("numeric value for set predicate on '" + predicate.feature + "'");
  return predicate.set().contains(*label);
}

/// An instance is covered when every premise predicate holds for it.
/// Throws SchemaMismatch when a predicate names a feature the instance lacks.
inline bool covers(const Instance& instance, const Rule& rule) {
  // Resolve every predicate before deciding, so a mismatch is never masked
  // by an earlier failing predicate.
  for (const auto& p : rule.premise)
    if (!instance.find(p.feature))
      throw SchemaMismatch("unknown feature '" + p.feature + "' in rule premise", p.feature);
  for (const auto& p : rule.premise)
    if (!satisfies(*instance.find(p.feature), p)) return false;
  return true;
}

/// Stable sort by descending |weight|.
inline std::vector<FeatureWeight> rank_by_importance(std::vector<FeatureWeight> importance) {
  std::stable_sort(importance.begin(), importance.end(),
                   [](const FeatureWeight& a, const FeatureWeight& b) {
                     return std::fabs(a.weight) > std::fabs(b.weight);
                   });
  return importance;
}

// ---------------------------------------------------------------------------
// Predicate intersection

inline NumericInterval intersect(const NumericInterval& a, const NumericInterval& b) {
  NumericInterval out;
  if (a.lower && b.lower) {
    if (*a.lower > *b.lower) {
      out.lower = a.lower, out.lower_open = a.lower_open;
    } else if (*b.lower > *a.lower) {
      out.lower = b.lower, out.lower_open = b.lower_open;
    } else {
      out.lower = a.lower, out.lower_open = a.lower_open || b.lower_open;
    }
  } else if (a.lower) {
    out.lower = a.lower, out.lower_open = a.lower_open;
  } else if (b.lower) {
    out.lower = b.lower, out.lower_open = b.lower_open;
  }
  if (a.upper && b.upper) {
    if (*a.upper < *b.upper) {
      out.upper = a.upper, out.upper_open = a.upper_open;
    } else if (*b.upper < *a.upper) {
      out.upper = b.upper, out.upper_open = b.upper_open;
    } else {
      out.upper = a.upper, out.upper_open = a.upper_open || b.upper_open;
    }
  } else if (a.upper) {
    out.upper = a.upper, out.upper_open = a.upper_open;
  } else if (b.upper) {
    out.upper = b.upper, out.upper_open = b.upper_open;
  }
  return out;
}

inline CategorySet intersect(const CategorySet& a, const CategorySet& b) {
  CategorySet out;
  for (const auto& l : a.labels)
    if (b.contains(l)) out.labels.push_back(l);
  return out;
}

/// Adds `predicate` to `premise`, intersecting with an existing predicate on
/// the same feature. The result may be empty; validation reports that.
inline void merge_predicate(std::vector<Predicate>& premise, Predicate predicate) {
  for (auto& existing : premise) {
    if (existing.feature != predicate.feature) continue;
    if (existing.is_interval() != predicate.is_interval())
      throw SchemaMismatch("conflicting predicate kinds on '" + predicate.feature + "'", predicate.feature);
    if (existing.is_interval())
      existing.body = intersect(existing.interval(), predicate.interval());
    else
      existing.body = intersect(existing.set(), predicate.set());
    return;
  }
  premise.push_back(std::move(predicate));
}

// ---------------------------------------------------------------------------
// Validation

inline ValidationReport validate_schema(const DatasetSchema& schema) {
  ValidationReport out;
  auto add = [&](std::string code, std::string path, std::string msg) {
    out.push_back({std::move(code), std::move(path), std::move(msg)});
  };
  if (schema.features.empty()) add("no-features", "features", "schema declares no features");
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < schema.features.size(); ++i) {
    const auto& f = schema.features[i];
    const std::string path = "features[" + std::to_string(i) + "]";
    if (f.name.empty()) add("empty-name", path + ".name", "feature name is empty");
    if (!seen.insert(f.name).second) add("duplicate-feature", path + ".name", "duplicate feature '" + f.name + "'");
    if (f.is_numerical()) {
      if (!std::isfinite(f.lo) || !std::isfinite(f.hi))
        add("non-finite-domain", path + ".domain", "domain bounds must be finite");
      else if (f.lo > f.hi)
        add("invalid-domain", path + ".domain", "domain lower bound exceeds upper bound");
    } else {
      if (f.labels.empty()) add("empty-domain", path + ".domain", "categorical domain is empty");
      std::set<std::string, std::less<>> labels;
      for (const auto& l : f.labels)
        if (!labels.insert(l).second) add("duplicate-label", path + ".domain", "duplicate label '" + l + "'");
    }
  }
  if (schema.target_name.empty()) add("empty-name", "target_name", "target name is empty");
  if (seen.count(schema.target_name))
    add("target-is-feature", "target_name", "target '" + schema.target_name + "' is also a feature");
  if (schema.target_classes.empty()) add("empty-domain", "target_classes", "no target classes");
  std::set<std::string, std::less<>> classes;
  for (const auto& c : schema.target_classes)
    if (!classes.insert(c).second) add("duplicate-label", "target_classes", "duplicate class '" + c + "'");
  return out;
}

inline ValidationReport validate_instance(const Instance& instance, const DatasetSchema& schema,
                                          const std::string& prefix = "instance") {
  ValidationReport out;
  for (const auto& f : schema.features) {
    const std::string path = prefix + "." + f.name;
    const Value* v = instance.find(f.name);
    if (!v) {
      out.push_back({"missing-value", path, "no value for feature '" + f.name + "'"});
      continue;
    }
    if (f.is_numerical()) {
      const double* d = std::get_if<double>(v);
      if (!d)
        out.push_back({"kind-mismatch", path, "expected a number"});
      else if (!std::isfinite(*d))
        out.push_back({"non-finite-value", path, "value is not finite"});
    } else {
      const std::string* s = std::get_if<std::string>(v);
      if (!s)
        out.push_back({"kind-mismatch", path, "expected a category label"});
      else if (!f.has_label(*s))
        out.push_back({"unknown-label", path, "label '" + *s + "' is not in the domain"});
    }
  }
  for (const auto& [name, value] : instance.values)
    if (!schema.find(name)) out.push_back({"unknown-feature", prefix + "." + name, "feature '" + name + "' is not in the schema"});
  return out;
}

inline ValidationReport validate_rule(const Rule& rule, const DatasetSchema& schema,
                                      const std::string& prefix = "rule") {
  ValidationReport out;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < rule.premise.size(); ++i) {
    const auto& p = rule.premise[i];
    const std::string path = prefix + ".premise[" + std::to_string(i) + "]";
    if (!seen.insert(p.feature).second)
      out.push_back({"duplicate-predicate", path, "second predicate on '" + p.feature + "'"});
    const FeatureSpec* f = schema.find(p.feature);
    if (!f) {
      out.push_back({"unknown-feature", path + ".feature", "feature '" + p.feature + "' is not in the schema"});
      continue;
    }
    if (p.is_interval() != f->is_numerical()) {
      out.push_back({"kind-mismatch", path, std::string(p.is_interval() ? "interval" : "set") +
                                                " predicate on " + std::string(to_string(f->kind)) +
                                                " feature '" + f->name + "'"});
      continue;
    }
    if (p.is_interval()) {
      const auto& iv = p.interval();
      if (!iv.lower && !iv.upper)
        out.push_back({"unbounded-interval", path, "interval has no bounds"});
      if ((iv.lower && !std::isfinite(*iv.lower)) || (iv.upper && !std::isfinite(*iv.upper)))
        out.push_back({"non-finite-bound", path, "interval bound is not finite"});
      else if (iv.empty())
        out.push_back({"empty-predicate", path, "interval on '" + p.feature + "' is empty"});
    } else {
      const auto& labels = p.set().labels;
      if (labels.empty()) out.push_back({"empty-predicate", path, "label set on '" + p.feature + "' is empty"});
      std::set<std::string, std::less<>> uniq;
      for (const auto& l : labels) {
        if (!uniq.insert(l).second) out.push_back({"duplicate-label", path + ".labels", "duplicate label '" + l + "'"});
        if (!f->has_label(l)) out.push_back({"unknown-label", path + ".labels", "label '" + l + "' is not in the domain"});
      }
    }
  }
  if (!schema.has_class(rule.consequence))
    out.push_back({"unknown-class", prefix + ".consequence", "class '" + rule.consequence + "' is not a target class"});
  return out;
}

/// Reports every broken invariant of the bundle against the schema, plus
/// the requirement that the bundle's rule covers its own instance.
inline ValidationReport validate_bundle(const ExplanationBundle& bundle, const DatasetSchema& schema) {
  ValidationReport out;
  auto append = [&](ValidationReport more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  if (bundle.id.empty()) out.push_back({"empty-id", "id", "bundle id is empty"});
  if (!schema.id.empty() && bundle.schema_ref != schema.id)
    out.push_back({"schema-ref-mismatch", "schema_ref",
                   "bundle refers to '" + bundle.schema_ref + "' but schema is '" + schema.id + "'"});

  ValidationReport instance_report = validate_instance(bundle.instance, schema);
  ValidationReport rule_report = validate_rule(bundle.rule, schema);
  const bool structurally_sound = instance_report.empty() && rule_report.empty();
  append(std::move(instance_report));
  append(std::move(rule_report));

  if (!schema.has_class(bundle.prediction))
    out.push_back({"unknown-class", "prediction", "class '" + bundle.prediction + "' is not a target class"});
  if (bundle.prediction != bundle.rule.consequence)
    out.push_back({"prediction-mismatch", "prediction",
                   "prediction '" + bundle.prediction + "' differs from rule consequence '" +
                       bundle.rule.consequence + "'"});

  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < bundle.importance.size(); ++i) {
    const auto& w = bundle.importance[i];
    const std::string path = "importance[" + std::to_string(i) + "]";
    if (!schema.find(w.feature))
      out.push_back({"unknown-feature", path + ".feature", "feature '" + w.feature + "' is not in the schema"});
    if (!seen.insert(w.feature).second)
      out.push_back({"duplicate-importance", path + ".feature", "second weight for '" + w.feature + "'"});
    if (!std::isfinite(w.weight)) out.push_back({"non-finite-weight", path + ".weight", "weight is not finite"});
  }

  if (structurally_sound && !covers(bundle.instance, bundle.rule))
    out.push_back({"not-covered", "rule", "the rule does not cover the bundle's own instance"});
  return out;
}

}  // namespace fiper
