#pragma once

// Wire documents for summaries, views, block specs and study reports, plus
// the study input readers. All documents are JSON with a fixed key order.

#include <string>
#include <string_view>
#include <vector>

#include "fiper/document.hpp"
#include "fiper/stats.hpp"
#include "fiper/study.hpp"
#include "fiper/view.hpp"

namespace fiper {

inline Json summary_to_json(const FeatureSummary& s) {
  if (s.is_numerical()) {
    const auto& f = s.five();
    return Json{{"feature", s.feature}, {"kind", "numerical"}, {"min", f.min},       {"q1", f.q1},
                {"median", f.median},   {"q3", f.q3},          {"max", f.max}};
  }
  Json entries = Json::array();
  for (const auto& e : s.categories().entries) entries.push_back(Json{{"label", e.label}, {"count", e.count}});
  return Json{{"feature", s.feature},
              {"kind", "categorical"},
              {"total", s.categories().total()},
              {"entries", std::move(entries)}};
}

inline Json summaries_to_json(std::string_view dataset_id, std::span<const FeatureSummary> summaries) {
  Json features = Json::array();
  for (const auto& s : summaries) features.push_back(summary_to_json(s));
  return Json{{"dataset", dataset_id}, {"features", std::move(features)}};
}

inline Json marker_to_json(const MarkerPosition& m) {
  Json doc{{"normalized", m.normalized}, {"clamped", m.clamped}};
  doc["quartile_bucket"] = m.bucket ? Json(std::string(to_string(*m.bucket))) : Json(nullptr);
  doc["segment_index"] = m.segment_index ? Json(*m.segment_index) : Json(nullptr);
  return doc;
}

inline Json highlight_to_json(const HighlightSpan& h) {
  if (h.kind == FeatureKind::numerical)
    return Json{{"kind", "numerical"}, {"start", h.start}, {"end", h.end}, {"degenerate", h.degenerate}};
  Json flags = Json::array();
  for (bool f : h.flags) flags.push_back(f);
  return Json{{"kind", "categorical"}, {"flags", std::move(flags)}};
}

inline Json view_to_json(const FiperView& view) {
  const auto& pal = view.options.palette;
  Json rows = Json::array();
  for (const auto& r : view.rows) {
    rows.push_back(Json{{"feature", r.feature},
                        {"weight", r.weight},
                        {"weight_sign", std::string(to_string(r.weight_sign))},
                        {"summary", summary_to_json(r.summary)},
                        {"highlight", r.highlight ? highlight_to_json(*r.highlight) : Json(nullptr)},
                        {"marker", marker_to_json(r.marker)},
                        {"observed", value_to_json(r.observed)},
                        {"in_rule", r.in_rule}});
  }
  return Json{{"bundle_id", view.bundle_id},
              {"prediction", view.prediction},
              {"options",
               {{"filter", std::string(to_string(view.options.filter))},
                {"sort", std::string(to_string(view.options.sort))},
                {"palette",
                 {{"positive_color", pal.positive_color},
                  {"negative_color", pal.negative_color},
                  {"highlight_color", pal.highlight_color},
                  {"marker_color", pal.marker_color}}}}},
              {"rows", std::move(rows)}};
}

inline Json block_group_to_json(const BlockGroup& g) {
  Json blocks = Json::array();
  for (const auto& b : g.blocks) blocks.push_back(Json{{"role", std::string(to_string(b.role))}, {"text", b.text}});
  return Json{{"feature", g.feature}, {"blocks", std::move(blocks)}};
}

inline Json blocks_to_json(const BlockSpec& spec) {
  Json predicates = Json::array();
  for (const auto& g : spec.predicates) predicates.push_back(block_group_to_json(g));
  return Json{{"predicates", std::move(predicates)}, {"consequence", block_group_to_json(spec.consequence)}};
}

// ---------------------------------------------------------------------------
// Study documents

namespace study_json {

using namespace study;

inline AnswerVector answer_from_json(const Json& v, const std::string& path) {
  if (!v.is_array()) throw Error("parse-error", path + ": expected an array of 0/1", path);
  AnswerVector a;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Json& b = v[i];
    if (b.is_boolean()) {
      a.bits.push_back(b.get<bool>() ? 1 : 0);
    } else if (b.is_number_integer() && (b.get<long long>() == 0 || b.get<long long>() == 1)) {
      a.bits.push_back(static_cast<std::uint8_t>(b.get<long long>()));
    } else {
      throw Error("parse-error", path + "[" + std::to_string(i) + "]: expected 0 or 1", path);
    }
  }
  return a;
}

inline int int_at(const Json& obj, const char* key, const std::string& path) {
  const Json& v = document_detail::member(obj, key, path);
  if (!v.is_number_integer()) throw Error("parse-error", path + "." + key + ": expected an integer", path + "." + key);
  return v.get<int>();
}

template <std::size_t N>
std::array<int, N> ints_of(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N)
    throw Error("parse-error", path + ": expected " + std::to_string(N) + " integers", path);
  std::array<int, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number_integer()) throw Error("parse-error", path + ": expected integers", path);
    out[i] = v[i].get<int>();
  }
  return out;
}

inline const Json& list_of(const Json& doc, const char* key) {
  if (doc.is_array()) return doc;
  const Json& v = document_detail::member(doc, key, "");
  if (!v.is_array()) throw Error("parse-error", std::string(key) + ": expected an array", key);
  return v;
}

}  // namespace study_json

/// Truth vectors keyed by (instance, question):
/// {"truths": [{"instance": 1, "question": 1, "answer": [0, 1, ...]}, ...]}
inline study::TruthTable truths_from_json(const Json& doc) {
  using namespace study_json;
  TruthTable table;
  const Json& list = list_of(doc, "truths");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "truths[" + std::to_string(i) + "]";
    const TaskKey key{int_at(list[i], "instance", path), int_at(list[i], "question", path)};
    if (!table.emplace(key, answer_from_json(document_detail::member(list[i], "answer", path), path + ".answer")).second)
      throw Error("duplicate-task", path + ": second truth vector for the same task", path);
  }
  return table;
}

/// Reads responses and the optional questionnaire sections into `input`.
inline void responses_from_json(const Json& doc, study::StudyInput& input) {
  using namespace study_json;
  const Json& list = list_of(doc, "responses");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "responses[" + std::to_string(i) + "]";
    const Json& r = list[i];
    StudyResponse out;
    out.participant_id = document_detail::string_at(r, "participant_id", path);
    out.condition = parse_modality(document_detail::string_at(r, "condition", path));
    out.instance_index = int_at(r, "instance_index", path);
    out.question_index = int_at(r, "question_index", path);
    out.answer = answer_from_json(document_detail::member(r, "answer", path), path + ".answer");
    out.completion_time = document_detail::number_of(document_detail::member(r, "completion_time", path),
                                                     path + ".completion_time");
    if (out.instance_index < 1 || out.question_index < 1)
      throw Error("parse-error", path + ": indices are 1-based", path);
    if (!(out.completion_time >= 0)) throw Error("invalid-time", path + ": negative completion time", path);
    input.responses.push_back(std::move(out));
  }
  if (!doc.is_object()) return;
  if (auto it = doc.find("tlx"); it != doc.end()) {
    if (!it->is_array()) throw Error("parse-error", "tlx: expected an array", "tlx");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "tlx[" + std::to_string(i) + "]";
      const Json& t = (*it)[i];
      input.tlx.push_back({document_detail::string_at(t, "participant_id", path),
                           parse_modality(document_detail::string_at(t, "condition", path)),
                           ints_of<6>(document_detail::member(t, "ratings", path), path + ".ratings")});
    }
  }
  if (auto it = doc.find("ues"); it != doc.end()) {
    if (!it->is_array()) throw Error("parse-error", "ues: expected an array", "ues");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "ues[" + std::to_string(i) + "]";
      const Json& u = (*it)[i];
      input.ues.push_back({document_detail::string_at(u, "participant_id", path),
                           ints_of<12>(document_detail::member(u, "items", path), path + ".items")});
    }
  }
  if (auto it = doc.find("ues_reverse_items"); it != doc.end()) {
    if (!it->is_array()) throw Error("parse-error", "ues_reverse_items: expected an array", "ues_reverse_items");
    for (const auto& v : *it) {
      if (!v.is_number_integer()) throw Error("parse-error", "ues_reverse_items: expected integers", "ues_reverse_items");
      input.ues_reverse_items.push_back(v.get<int>());
    }
  }
}

inline Json cell_key_to_json(const study::CellKey& k) {
  return Json{{"condition", std::string(study::to_string(k.condition))},
              {"instance", k.instance},
              {"question", k.question},
              {"participant", k.participant}};
}

inline Json report_to_json(const study::StudyReport& report) {
  using namespace study;
  const auto& m = report.matrix;
  Json conditions = Json::array();
  for (Modality c : m.conditions) {
    const ErrorCounts t = m.total_for(c);
    conditions.push_back(Json{{"condition", std::string(to_string(c))}, {"e1", t.e1}, {"e2", t.e2}, {"total", t.total()}});
  }
  Json cells = Json::array();
  for (const auto& [k, c] : m.cells) {
    Json doc = cell_key_to_json(k);
    doc["e1"] = c.e1;
    doc["e2"] = c.e2;
    cells.push_back(std::move(doc));
  }
  Json missing = Json::array();
  for (const auto& k : m.missing) missing.push_back(cell_key_to_json(k));

  Json delta = nullptr;
  if (report.delta) {
    Json dcells = Json::array();
    for (const auto& [k, d] : report.delta->cells) {
      Json doc = cell_key_to_json(k);
      doc["e1"] = d.e1;
      doc["e2"] = d.e2;
      doc["total"] = d.total;
      dcells.push_back(std::move(doc));
    }
    delta = Json{{"baseline", std::string(to_string(report.delta->baseline))}, {"cells", std::move(dcells)}};
  }

  Json times = Json::array();
  for (const auto& t : report.times) {
    Json users = Json::array();
    for (const auto& [p, secs] : t.per_user) users.push_back(Json{{"participant", p}, {"seconds", secs}});
    times.push_back(Json{{"condition", std::string(to_string(t.group.condition))},
                         {"instance", t.group.instance},
                         {"median", t.median},
                         {"per_user", std::move(users)}});
  }

  Json tlx = Json::array();
  for (const auto& [entry, score] : report.tlx)
    tlx.push_back(Json{{"participant", entry.participant_id},
                       {"condition", std::string(to_string(entry.condition))},
                       {"raw_tlx", score}});
  Json ues = Json::array();
  for (const auto& [entry, s] : report.ues)
    ues.push_back(Json{{"participant", entry.participant_id},
                       {"FA", s.focused_attention},
                       {"PU", s.perceived_usability},
                       {"AE", s.aesthetic_appeal},
                       {"RW", s.reward},
                       {"overall", s.overall}});

  const ErrorCounts total = m.total();
  return Json{{"scored_cells", m.cells.size()},
              {"grid_cells", m.grid_size()},
              {"totals", {{"e1", total.e1}, {"e2", total.e2}, {"total", total.total()}}},
              {"conditions", std::move(conditions)},
              {"cells", std::move(cells)},
              {"missing", std::move(missing)},
              {"delta", std::move(delta)},
              {"times", std::move(times)},
              {"tlx", std::move(tlx)},
              {"ues", std::move(ues)}};
}

}  // namespace fiper
