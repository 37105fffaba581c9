#pragma once

// User-study scoring: answer-vector errors (E1 = selected but absent,
// E2 = present but not selected), per-cell error matrices and deltas against
// a baseline condition, cyclic Latin-square orderings, raw NASA-TLX, UES
// short form, and completion-time medians.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fiper/error.hpp"
#include "fiper/stats.hpp"

namespace fiper::study {

/// The three presentation conditions compared in the study.
enum class Modality { text, blocks, fiper };

inline constexpr std::array<Modality, 3> all_modalities{Modality::text, Modality::blocks, Modality::fiper};

inline std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::text: return "text";
    case Modality::blocks: return "blocks";
    case Modality::fiper: return "fiper";
  }
  return "text";
}

inline Modality parse_modality(std::string_view s) {
  for (Modality m : all_modalities)
    if (to_string(m) == s) return m;
  throw Error("bad-condition", "unknown condition '" + std::string(s) + "' (expected text, blocks or fiper)",
              "condition");
}

/// One bit per feature plus a trailing "I don't know" position.
struct AnswerVector {
  std::vector<std::uint8_t> bits;

  bool operator==(const AnswerVector&) const = default;
};

struct StudyResponse {
  std::string participant_id;
  Modality condition = Modality::text;
  int instance_index = 1;
  int question_index = 1;
  AnswerVector answer;
  double completion_time = 0.0;  // seconds
};

struct ErrorCounts {
  int e1 = 0;
  int e2 = 0;

  int total() const noexcept { return e1 + e2; }
  bool operator==(const ErrorCounts&) const = default;
};

inline ErrorCounts score_answer(const AnswerVector& answer, const AnswerVector& truth) {
  if (answer.bits.size() != truth.bits.size())
    throw Error("length-mismatch", "answer has " + std::to_string(answer.bits.size()) + " positions, truth has " +
                                       std::to_string(truth.bits.size()));
  ErrorCounts c;
  for (std::size_t i = 0; i < answer.bits.size(); ++i) {
    const bool a = answer.bits[i] != 0, t = truth.bits[i] != 0;
    if (a && !t) ++c.e1;
    if (t && !a) ++c.e2;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Error matrices

struct TaskKey {
  int instance = 1;
  int question = 1;

  auto operator<=>(const TaskKey&) const = default;
};

using TruthTable = std::map<TaskKey, AnswerVector>;

struct CellKey {
  Modality condition = Modality::text;
  int instance = 1;
  int question = 1;
  std::string participant;

  auto operator<=>(const CellKey&) const = default;
};

/// Scored cells over the grid conditions x tasks x participants. Grid cells
/// without a response are listed in `missing` rather than zero-filled.
struct ErrorMatrix {
  std::vector<Modality> conditions;
  std::vector<TaskKey> tasks;
  std::vector<std::string> participants;
  std::map<CellKey, ErrorCounts> cells;
  std::vector<CellKey> missing;

  std::size_t grid_size() const noexcept { return conditions.size() * tasks.size() * participants.size(); }

  ErrorCounts total() const {
    ErrorCounts t;
    for (const auto& [_, c] : cells) t.e1 += c.e1, t.e2 += c.e2;
    return t;
  }

  ErrorCounts total_for(Modality m) const {
    ErrorCounts t;
    for (const auto& [k, c] : cells)
      if (k.condition == m) t.e1 += c.e1, t.e2 += c.e2;
    return t;
  }
};

inline ErrorMatrix aggregate_errors(std::span<const StudyResponse> responses, const TruthTable& truths) {
  ErrorMatrix m;
  std::set<Modality> conditions;
  std::set<std::string> participants;
  for (const auto& r : responses) {
    const TaskKey task{r.instance_index, r.question_index};
    auto truth = truths.find(task);
    if (truth == truths.end())
      throw Error("unknown-task",
                  "no truth vector for instance " + std::to_string(task.instance) + ", question " +
                      std::to_string(task.question),
                  "responses");
    CellKey key{r.condition, task.instance, task.question, r.participant_id};
    if (m.cells.count(key))
      throw Error("duplicate-response", "participant '" + r.participant_id + "' answered " +
                                            std::string(to_string(r.condition)) + " instance " +
                                            std::to_string(task.instance) + " question " +
                                            std::to_string(task.question) + " twice",
                  "responses");
    m.cells.emplace(std::move(key), score_answer(r.answer, truth->second));
    conditions.insert(r.condition);
    participants.insert(r.participant_id);
  }
  m.conditions.assign(conditions.begin(), conditions.end());
  m.participants.assign(participants.begin(), participants.end());
  for (const auto& [task, _] : truths) m.tasks.push_back(task);
  for (Modality c : m.conditions)
    for (const auto& t : m.tasks)
      for (const auto& p : m.participants) {
        CellKey key{c, t.instance, t.question, p};
        if (!m.cells.count(key)) m.missing.push_back(std::move(key));
      }
  return m;
}

struct DeltaCounts {
  int e1 = 0;
  int e2 = 0;
  int total = 0;

  bool operator==(const DeltaCounts&) const = default;
};

/// Signed differences (condition - baseline) per (instance, question,
/// participant) for every non-baseline condition; negative means fewer errors.
struct DeltaMatrix {
  Modality baseline = Modality::text;
  std::map<CellKey, DeltaCounts> cells;
};

inline DeltaMatrix delta_error_matrix(const ErrorMatrix& matrix, Modality baseline) {
  if (std::find(matrix.conditions.begin(), matrix.conditions.end(), baseline) == matrix.conditions.end())
    throw Error("unknown-baseline", "baseline condition '" + std::string(to_string(baseline)) + "' has no responses",
                "baseline");
  DeltaMatrix d;
  d.baseline = baseline;
  for (const auto& [key, counts] : matrix.cells) {
    if (key.condition == baseline) continue;
    auto base = matrix.cells.find(CellKey{baseline, key.instance, key.question, key.participant});
    if (base == matrix.cells.end()) continue;
    d.cells.emplace(key, DeltaCounts{counts.e1 - base->second.e1, counts.e2 - base->second.e2,
                                     counts.total() - base->second.total()});
  }
  return d;
}

// ---------------------------------------------------------------------------
// Counterbalancing

/// Participant p gets row (p mod k) of the cyclic k x k Latin square:
/// position j holds condition (p + j) mod k.
inline std::vector<std::vector<int>> latin_square_order(int participants, int conditions) {
  if (participants < 1 || conditions < 1)
    throw Error("bad-design", "need at least one participant and one condition");
  std::vector<std::vector<int>> out(static_cast<std::size_t>(participants));
  for (int p = 0; p < participants; ++p) {
    auto& row = out[static_cast<std::size_t>(p)];
    row.reserve(static_cast<std::size_t>(conditions));
    for (int j = 0; j < conditions; ++j) row.push_back((p % conditions + j) % conditions);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Questionnaires

/// Mental, physical, temporal, performance, effort, frustration; 0..100 in
/// steps of 5.
using TlxRatings = std::array<int, 6>;

inline void check_tlx(const TlxRatings& ratings) {
  for (std::size_t i = 0; i < ratings.size(); ++i)
    if (ratings[i] < 0 || ratings[i] > 100 || ratings[i] % 5 != 0)
      throw Error("invalid-rating", "TLX rating " + std::to_string(ratings[i]) + " is not in {0, 5, ..., 100}",
                  "tlx[" + std::to_string(i) + "]");
}

/// Unweighted mean of the six dimensions.
inline double raw_tlx(const TlxRatings& ratings) {
  check_tlx(ratings);
  int sum = 0;
  for (int r : ratings) sum += r;
  return sum / 6.0;
}

/// Twelve 1..5 Likert items, three per subscale in the order FA, PU, AE, RW.
using UesItems = std::array<int, 12>;

struct UesScores {
  double focused_attention = 0.0;
  double perceived_usability = 0.0;
  double aesthetic_appeal = 0.0;
  double reward = 0.0;
  double overall = 0.0;

  bool operator==(const UesScores&) const = default;
};

/// `reverse_items` lists 1-based item numbers scored as 6 - x.
inline UesScores ues_short_form(const UesItems& items, std::span<const int> reverse_items = {}) {
  std::array<int, 12> keyed = items;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i] < 1 || items[i] > 5)
      throw Error("invalid-rating", "UES item " + std::to_string(items[i]) + " is not in 1..5",
                  "ues[" + std::to_string(i) + "]");
  for (int r : reverse_items) {
    if (r < 1 || r > 12) throw Error("invalid-rating", "reverse-keyed item " + std::to_string(r) + " is not in 1..12");
    keyed[static_cast<std::size_t>(r - 1)] = 6 - items[static_cast<std::size_t>(r - 1)];
  }
  auto mean3 = [&](std::size_t first) { return (keyed[first] + keyed[first + 1] + keyed[first + 2]) / 3.0; };
  int sum = 0;
  for (int v : keyed) sum += v;
  return {mean3(0), mean3(3), mean3(6), mean3(9), sum / 12.0};
}

// ---------------------------------------------------------------------------
// Completion times

struct TimeGroupKey {
  Modality condition = Modality::text;
  int instance = 1;

  auto operator<=>(const TimeGroupKey&) const = default;
};

struct TimeSummary {
  TimeGroupKey group;
  std::vector<std::pair<std::string, double>> per_user;  // participant, seconds
  double median = 0.0;
};

/// Per-user time for a (condition, instance) is the sum over that user's
/// questions; the median uses the same interpolation as the stats engine.
inline std::vector<TimeSummary> completion_time_summary(std::span<const StudyResponse> responses) {
  std::map<TimeGroupKey, std::map<std::string, double>> groups;
  for (const auto& r : responses) {
    if (!(r.completion_time >= 0) || !std::isfinite(r.completion_time))
      throw Error("invalid-time", "completion time must be a finite, nonnegative number of seconds",
                  "responses." + r.participant_id);
    groups[{r.condition, r.instance_index}][r.participant_id] += r.completion_time;
  }
  std::vector<TimeSummary> out;
  for (const auto& [key, users] : groups) {
    TimeSummary t{key, {users.begin(), users.end()}, 0.0};
    std::vector<double> values;
    for (const auto& [_, v] : users) values.push_back(v);
    t.median = median(values);
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report

struct TlxEntry {
  std::string participant_id;
  Modality condition = Modality::text;
  TlxRatings ratings{};
};

struct UesEntry {
  std::string participant_id;
  UesItems items{};
};

struct StudyInput {
  TruthTable truths;
  std::vector<StudyResponse> responses;
  std::vector<TlxEntry> tlx;
  std::vector<UesEntry> ues;
  std::vector<int> ues_reverse_items;
};

struct StudyReport {
  ErrorMatrix matrix;
  std::optional<DeltaMatrix> delta;
  std::vector<TimeSummary> times;
  std::vector<std::pair<TlxEntry, double>> tlx;
  std::vector<std::pair<UesEntry, UesScores>> ues;
};

inline StudyReport score_study(const StudyInput& input, Modality baseline = Modality::text) {
  StudyReport report;
  report.matrix = aggregate_errors(input.responses, input.truths);
  if (!report.matrix.conditions.empty()) report.delta = delta_error_matrix(report.matrix, baseline);
  report.times = completion_time_summary(input.responses);
  for (const auto& t : input.tlx) report.tlx.emplace_back(t, raw_tlx(t.ratings));
  for (const auto& u : input.ues) report.ues.emplace_back(u, ues_short_form(u.items, input.ues_reverse_items));
  return report;
}

}  // namespace fiper::study
