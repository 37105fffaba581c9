#pragma once

// Per-feature distribution summaries and the normalized geometry shared by
// the box plots / stacked bars: observation markers and predicate highlights.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fiper/document.hpp"
#include "fiper/error.hpp"
#include "fiper/model.hpp"

namespace fiper {

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  bool operator==(const FiveNumber&) const = default;
};

struct CategoryCount {
  std::string label;
  std::size_t count = 0;

  bool operator==(const CategoryCount&) const = default;
};

struct CategoricalSummary {
  std::vector<CategoryCount> entries;  // schema domain order

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.count;
    return n;
  }

  bool operator==(const CategoricalSummary&) const = default;
};

struct FeatureSummary {
  std::string feature;
  std::variant<FiveNumber, CategoricalSummary> body;

  bool is_numerical() const noexcept { return std::holds_alternative<FiveNumber>(body); }
  const FiveNumber& five() const { return std::get<FiveNumber>(body); }
  const CategoricalSummary& categories() const { return std::get<CategoricalSummary>(body); }

  bool operator==(const FeatureSummary&) const = default;
};

enum class QuartileBucket { below_q1, q1_to_median, median_to_q3, above_q3 };

inline std::string_view to_string(QuartileBucket b) {
  switch (b) {
    case QuartileBucket::below_q1: return "below_q1";
    case QuartileBucket::q1_to_median: return "q1_to_median";
    case QuartileBucket::median_to_q3: return "median_to_q3";
    case QuartileBucket::above_q3: return "above_q3";
  }
  return "below_q1";
}

struct MarkerPosition {
  double normalized = 0.0;  // [0, 1] along the chart axis
  bool clamped = false;     // numerical value fell outside [min, max]
  std::optional<QuartileBucket> bucket;       // numerical
  std::optional<std::size_t> segment_index;   // categorical

  bool operator==(const MarkerPosition&) const = default;
};

struct HighlightSpan {
  FeatureKind kind = FeatureKind::numerical;
  double start = 0.0;  // numerical: normalized closed span
  double end = 0.0;
  bool degenerate = false;  // predicate lies wholly outside the observed range
  std::vector<bool> flags;  // categorical: one per summary entry

  bool contains(const MarkerPosition& m) const {
    if (kind == FeatureKind::numerical) return start <= m.normalized && m.normalized <= end;
    return m.segment_index && *m.segment_index < flags.size() && flags[*m.segment_index];
  }

  bool operator==(const HighlightSpan&) const = default;
};

// ---------------------------------------------------------------------------
// Quantiles

/// Linear interpolation between closest ranks: the value at 0-based rank
/// p * (n - 1) of the sorted sample. `sorted` must be nonempty and ascending.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline std::vector<double> sorted_finite(std::span<const double> values) {
  if (values.empty()) throw Error("empty-sample", "cannot summarize an empty sample");
  for (double v : values)
    if (!std::isfinite(v)) throw Error("non-finite-value", "sample contains a non-finite value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

inline double median(std::span<const double> values) {
  const auto sorted = sorted_finite(values);
  return quantile_sorted(sorted, 0.5);
}

inline FiveNumber five_number_summary(std::span<const double> values) {
  const auto sorted = sorted_finite(values);
  return {sorted.front(), quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.5),
          quantile_sorted(sorted, 0.75), sorted.back()};
}

inline CategoricalSummary categorical_distribution(std::span<const std::string> values, const FeatureSpec& spec) {
  if (values.empty()) throw Error("empty-sample", "cannot summarize an empty sample for '" + spec.name + "'");
  CategoricalSummary out;
  out.entries.reserve(spec.labels.size());
  for (const auto& l : spec.labels) out.entries.push_back({l, 0});
  for (const auto& v : values) {
    auto it = std::find_if(out.entries.begin(), out.entries.end(), [&](const auto& e) { return e.label == v; });
    if (it == out.entries.end())
      throw Error("unknown-label", "label '" + v + "' is not in the domain of '" + spec.name + "'", spec.name);
    ++it->count;
  }
  return out;
}

inline FeatureSummary summarize_feature(const Dataset& data, const FeatureSpec& spec) {
  if (spec.is_numerical()) {
    std::vector<double> column;
    column.reserve(data.rows.size());
    for (const auto& r : data.rows) column.push_back(std::get<double>(*r.find(spec.name)));
    return {spec.name, five_number_summary(column)};
  }
  std::vector<std::string> column;
  column.reserve(data.rows.size());
  for (const auto& r : data.rows) column.push_back(std::get<std::string>(*r.find(spec.name)));
  return {spec.name, categorical_distribution(column, spec)};
}

/// One summary per schema feature, in schema order.
inline std::vector<FeatureSummary> summarize_dataset(const Dataset& data) {
  std::vector<FeatureSummary> out;
  out.reserve(data.schema.features.size());
  for (const auto& f : data.schema.features) out.push_back(summarize_feature(data, f));
  return out;
}

inline const FeatureSummary* find_summary(std::span<const FeatureSummary> summaries, std::string_view feature) {
  for (const auto& s : summaries)
    if (s.feature == feature) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Geometry

/// Position of `v` on the [min, max] axis. A constant feature maps to 0.5.
inline double axis_position(const FiveNumber& f, double v) {
  if (f.max == f.min) return 0.5;
  const double c = std::clamp(v, f.min, f.max);
  return std::clamp((c - f.min) / (f.max - f.min), 0.0, 1.0);
}

inline QuartileBucket quartile_bucket(const FiveNumber& f, double v) {
  if (v < f.q1) return QuartileBucket::below_q1;
  if (v < f.median) return QuartileBucket::q1_to_median;
  if (v < f.q3) return QuartileBucket::median_to_q3;
  return QuartileBucket::above_q3;
}

inline MarkerPosition locate_observation(const FeatureSummary& summary, const Value& value) {
  MarkerPosition m;
  if (summary.is_numerical()) {
    const double* v = std::get_if<double>(&value);
    if (!v) throw SchemaMismatch("expected a number for '" + summary.feature + "'", summary.feature);
    if (!std::isfinite(*v)) throw Error("non-finite-value", "observed value is not finite", summary.feature);
    const auto& f = summary.five();
    m.normalized = axis_position(f, *v);
    m.clamped = *v < f.min || *v > f.max;
    m.bucket = quartile_bucket(f, *v);
    return m;
  }
  const std::string* label = std::get_if<std::string>(&value);
  if (!label) throw SchemaMismatch("expected a label for '" + summary.feature + "'", summary.feature);
  const auto& entries = summary.categories().entries;
  const double total = static_cast<double>(summary.categories().total());
  double before = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].label == *label) {
      m.segment_index = i;
      m.normalized = total > 0 ? std::clamp((before + entries[i].count / 2.0) / total, 0.0, 1.0) : 0.5;
      return m;
    }
    before += static_cast<double>(entries[i].count);
  }
  throw Error("unknown-label", "label '" + *label + "' is not in the summary of '" + summary.feature + "'",
              summary.feature);
}

inline HighlightSpan predicate_highlight(const Predicate& predicate, const FeatureSummary& summary) {
  if (predicate.feature != summary.feature)
    throw SchemaMismatch("predicate on '" + predicate.feature + "' against summary of '" + summary.feature + "'",
                         predicate.feature);
  if (predicate.is_interval() != summary.is_numerical())
    throw SchemaMismatch("predicate kind does not match feature '" + summary.feature + "'", summary.feature);

  HighlightSpan span;
  if (!summary.is_numerical()) {
    span.kind = FeatureKind::categorical;
    for (const auto& e : summary.categories().entries) span.flags.push_back(predicate.set().contains(e.label));
    return span;
  }

  const auto& f = summary.five();
  const auto& iv = predicate.interval();
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double lo = iv.lower.value_or(-inf);
  const double hi = iv.upper.value_or(inf);
  auto zero_width = [&](double at) {
    span.start = span.end = at;
    span.degenerate = true;
    return span;
  };
  if (iv.empty()) return zero_width(axis_position(f, lo));
  if (hi < f.min || (hi == f.min && iv.upper_open)) return zero_width(axis_position(f, f.min));
  if (lo > f.max || (lo == f.max && iv.lower_open)) return zero_width(axis_position(f, f.max));
  if (f.max == f.min) {
    span.start = 0.0;
    span.end = 1.0;
    return span;
  }
  span.start = axis_position(f, std::max(lo, f.min));
  span.end = axis_position(f, std::min(hi, f.max));
  return span;
}

}  // namespace fiper
