#pragma once

// Render-ready view of one explanation: importance-ranked rows, each pairing
// a signed FI bar with the feature's distribution chart, the rule's highlight
// (when the feature is in the premise), and the instance marker. Also the two
// baseline modalities: raw rule text and predicate blocks.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fiper/error.hpp"
#include "fiper/model.hpp"
#include "fiper/rule_text.hpp"
#include "fiper/stats.hpp"

namespace fiper {

enum class RowFilter { all_features, rule_only };
enum class RowSort { abs_importance, schema_order };

inline std::string_view to_string(RowFilter f) { return f == RowFilter::all_features ? "all_features" : "rule_only"; }
inline std::string_view to_string(RowSort s) { return s == RowSort::abs_importance ? "abs_importance" : "schema_order"; }

/// Accepts the long names and the short query forms ("all", "rule").
inline RowFilter parse_filter(std::string_view s) {
  if (s == "all" || s == "all_features") return RowFilter::all_features;
  if (s == "rule" || s == "rule_only") return RowFilter::rule_only;
  throw Error("bad-option", "unknown filter '" + std::string(s) + "' (expected all or rule)", "filter");
}

inline RowSort parse_sort(std::string_view s) {
  if (s == "abs" || s == "abs_importance") return RowSort::abs_importance;
  if (s == "schema" || s == "schema_order") return RowSort::schema_order;
  throw Error("bad-option", "unknown sort '" + std::string(s) + "' (expected abs or schema)", "sort");
}

/// Color-blind-safe defaults (Okabe-Ito blue / reddish purple / yellow).
struct Palette {
  std::string positive_color = "#0072B2";
  std::string negative_color = "#CC79A7";
  std::string highlight_color = "#F0E442";
  std::string marker_color = "#000000";

  bool operator==(const Palette&) const = default;
};

struct ViewOptions {
  RowFilter filter = RowFilter::all_features;
  RowSort sort = RowSort::abs_importance;
  Palette palette;

  bool operator==(const ViewOptions&) const = default;
};

enum class WeightSign { positive, negative, zero };

inline std::string_view to_string(WeightSign s) {
  switch (s) {
    case WeightSign::positive: return "positive";
    case WeightSign::negative: return "negative";
    case WeightSign::zero: return "zero";
  }
  return "zero";
}

inline WeightSign sign_of(double w) {
  if (w > 0) return WeightSign::positive;
  if (w < 0) return WeightSign::negative;
  return WeightSign::zero;
}

struct FiperRow {
  std::string feature;
  double weight = 0.0;
  WeightSign weight_sign = WeightSign::zero;
  FeatureSummary summary;
  std::optional<HighlightSpan> highlight;  // present iff in_rule
  MarkerPosition marker;
  Value observed;  // the instance's value, for tooltips
  bool in_rule = false;

  bool operator==(const FiperRow&) const = default;
};

struct FiperView {
  std::vector<FiperRow> rows;
  ViewOptions options;
  std::string prediction;
  std::string bundle_id;

  bool operator==(const FiperView&) const = default;
};

/// `summaries` must be in schema order (as produced by summarize_dataset) and
/// cover every rendered feature. Unlisted features get weight 0.
inline FiperView build_fiper_view(const ExplanationBundle& bundle, std::span<const FeatureSummary> summaries,
                                  const ViewOptions& options = {}) {
  if (options.palette.positive_color == options.palette.negative_color)
    throw Error("invalid-palette", "positive and negative colors must differ", "palette");

  std::vector<FeatureWeight> weights;
  for (const auto& w : bundle.importance) weights.push_back(w);
  for (const auto& p : bundle.rule.premise) {
    const bool listed = std::any_of(weights.begin(), weights.end(), [&](const auto& w) { return w.feature == p.feature; });
    if (!listed) weights.push_back({p.feature, 0.0});
  }
  if (options.filter == RowFilter::all_features) {
    for (const auto& s : summaries) {
      const bool listed = std::any_of(weights.begin(), weights.end(), [&](const auto& w) { return w.feature == s.feature; });
      if (!listed) weights.push_back({s.feature, 0.0});
    }
  }

  if (options.sort == RowSort::abs_importance) {
    weights = rank_by_importance(std::move(weights));
  } else {
    auto position = [&](const std::string& feature) {
      for (std::size_t i = 0; i < summaries.size(); ++i)
        if (summaries[i].feature == feature) return i;
      return summaries.size();
    };
    std::stable_sort(weights.begin(), weights.end(),
                     [&](const auto& a, const auto& b) { return position(a.feature) < position(b.feature); });
  }

  FiperView view;
  view.options = options;
  view.prediction = bundle.prediction;
  view.bundle_id = bundle.id;
  for (const auto& w : weights) {
    const Predicate* predicate = bundle.rule.find(w.feature);
    if (options.filter == RowFilter::rule_only && !predicate) continue;
    const FeatureSummary* summary = find_summary(summaries, w.feature);
    if (!summary) throw Error("missing-summary", "no summary for feature '" + w.feature + "'", w.feature);
    const Value* observed = bundle.instance.find(w.feature);
    if (!observed) throw SchemaMismatch("instance has no value for '" + w.feature + "'", w.feature);

    FiperRow row;
    row.feature = w.feature;
    row.weight = w.weight;
    row.weight_sign = sign_of(w.weight);
    row.summary = *summary;
    row.marker = locate_observation(*summary, *observed);
    row.observed = *observed;
    row.in_rule = predicate != nullptr;
    if (predicate) row.highlight = predicate_highlight(*predicate, *summary);
    view.rows.push_back(std::move(row));
  }
  return view;
}

// ---------------------------------------------------------------------------
// Baseline modalities

/// Raw rule text: a header line, the rule, and the prediction.
inline std::string render_text_modality(const ExplanationBundle& bundle, std::string_view target_name) {
  std::string out = "# explanation " + bundle.id + "\n";
  out += emit_rule_text(bundle.rule, target_name) + "\n";
  out += "prediction: " + bundle.prediction + "\n";
  return out;
}

enum class BlockRole { feature, op, value };

inline std::string_view to_string(BlockRole r) {
  switch (r) {
    case BlockRole::feature: return "feature";
    case BlockRole::op: return "operator";
    case BlockRole::value: return "value";
  }
  return "value";
}

struct Block {
  BlockRole role = BlockRole::value;
  std::string text;

  bool operator==(const Block&) const = default;
};

struct BlockGroup {
  std::string feature;
  std::vector<Block> blocks;

  bool operator==(const BlockGroup&) const = default;
};

struct BlockSpec {
  std::vector<BlockGroup> predicates;  // premise order
  BlockGroup consequence;

  bool operator==(const BlockSpec&) const = default;
};

inline BlockGroup predicate_blocks(const Predicate& p) {
  BlockGroup g{p.feature, {}};
  auto add = [&](BlockRole role, std::string text) { g.blocks.push_back({role, std::move(text)}); };
  if (!p.is_interval()) {
    add(BlockRole::feature, p.feature);
    add(BlockRole::op, "∈");
    for (const auto& l : p.set().labels) add(BlockRole::value, l);
    return g;
  }
  const auto& iv = p.interval();
  if (iv.lower && iv.upper) {
    add(BlockRole::value, format_number(*iv.lower));
    add(BlockRole::op, iv.lower_open ? "<" : "≤");
    add(BlockRole::feature, p.feature);
    add(BlockRole::op, iv.upper_open ? "<" : "≤");
    add(BlockRole::value, format_number(*iv.upper));
  } else if (iv.upper) {
    add(BlockRole::feature, p.feature);
    add(BlockRole::op, iv.upper_open ? "<" : "≤");
    add(BlockRole::value, format_number(*iv.upper));
  } else if (iv.lower) {
    add(BlockRole::feature, p.feature);
    add(BlockRole::op, iv.lower_open ? ">" : "≥");
    add(BlockRole::value, format_number(*iv.lower));
  } else {
    add(BlockRole::feature, p.feature);
  }
  return g;
}

inline BlockSpec render_block_modality(const ExplanationBundle& bundle, std::string_view target_name) {
  BlockSpec spec;
  for (const auto& p : bundle.rule.premise) spec.predicates.push_back(predicate_blocks(p));
  spec.consequence.feature = std::string(target_name);
  spec.consequence.blocks = {{BlockRole::feature, std::string(target_name)},
                             {BlockRole::op, "="},
                             {BlockRole::value, bundle.rule.consequence}};
  return spec;
}

}  // namespace fiper
