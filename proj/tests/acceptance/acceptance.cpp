// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <thread>

#include "fiper/fiper.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fiper;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome coverage_oracle() {
  gen::Rng rng(20240101);
  const auto s = gen::mixed_schema();
  const auto t0 = Clock::now();
  const int pairs = 20000;
  int agree = 0, covered = 0;
  for (int i = 0; i < pairs; ++i) {
    const auto x = gen::random_instance(rng, s);
    const Rule r = gen::coin(rng, 0.3) ? gen::covering_rule(rng, s, x) : gen::random_rule(rng, s);
    const bool got = covers(x, r);
    covered += got;
    agree += got == oracle::covers(x, r);
  }
  const double secs = seconds_since(t0);
  return {agree == pairs && secs < 5.0 && covered > 0 && covered < pairs,
          std::to_string(agree) + "/" + std::to_string(pairs) + " pairs agree (" + std::to_string(covered) +
              " covered), " + fmt(secs) + " s"};
}

Outcome quartile_oracle() {
  gen::Rng rng(500);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const int n = gen::uniform_int(rng, 1, 500);
    std::vector<double> v;
    const double scale = std::pow(10.0, gen::uniform_int(rng, -3, 6));
    for (int k = 0; k < n; ++k)
      v.push_back(gen::coin(rng, 0.2) ? std::round(gen::uniform(rng, -10, 10)) : gen::uniform(rng, -scale, scale));
    const auto got = five_number_summary(v);
    const auto want = oracle::five_numbers(v);
    for (auto [a, b] : {std::pair{got.min, want.min}, std::pair{got.q1, want.q1}, std::pair{got.median, want.median},
                        std::pair{got.q3, want.q3}, std::pair{got.max, want.max}})
      worst = std::max(worst, std::fabs(a - static_cast<double>(b)));
  }
  return {worst <= 1e-9, "500 samples, max abs deviation " + sci(worst) + " (tolerance 1e-9)"};
}

Outcome marker_in_highlight() {
  std::size_t checked = 0, bad = 0;
  auto check = [&](const FiperView& v) {
    for (const auto& row : v.rows) {
      if (!row.highlight) {
        ++bad;
        continue;
      }
      ++checked;
      if (!row.highlight->contains(row.marker)) ++bad;
    }
  };
  const auto e = fixture::german_credit();
  ViewOptions rule_only;
  rule_only.filter = RowFilter::rule_only;
  for (const char* name : {"credit_bad", "structured", "vacuous"})
    check(build_fiper_view(fixture::bundle(name), e.summaries, rule_only));

  gen::Rng rng(200);
  const auto s = gen::mixed_schema();
  for (int i = 0; i < 200; ++i) {
    const auto d = gen::random_dataset(rng, s, gen::uniform_int(rng, 1, 40));
    const auto b = gen::random_bundle(rng, s, i);
    const auto v = build_fiper_view(b, summarize_dataset(d), rule_only);
    if (v.rows.size() != b.rule.premise.size()) ++bad;
    check(v);
  }
  return {bad == 0 && checked > 0,
          std::to_string(checked) + " predicates over 3 fixture + 200 random bundles, " + std::to_string(bad) + " outside"};
}

Outcome worked_example_structure() {
  const auto e = fixture::german_credit();
  const auto b = fixture::bundle("credit_bad");
  ViewOptions o;
  o.filter = RowFilter::rule_only;
  const auto rule = build_fiper_view(b, e.summaries, o);
  std::set<std::string> names;
  for (const auto& r : rule.rows) names.insert(r.feature);
  const bool three = rule.rows.size() == 3 && names == std::set<std::string>{"present_employed_since", "purpose", "age"};

  o.filter = RowFilter::all_features;
  const auto all = build_fiper_view(b, e.summaries, o);
  bool sorted = all.rows.size() == e.schema().features.size();
  for (std::size_t i = 1; i < all.rows.size(); ++i)
    sorted = sorted && std::fabs(all.rows[i - 1].weight) >= std::fabs(all.rows[i].weight);
  return {three && sorted, "rule_only rows = " + std::to_string(rule.rows.size()) + ", all rows = " +
                               std::to_string(all.rows.size()) + (sorted ? " sorted by |weight|" : " NOT sorted")};
}

Outcome parser_round_trips() {
  gen::Rng rng(1000);
  const auto s = gen::mixed_schema();
  int rules_ok = 0, bundles_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const Rule r = gen::random_rule(rng, s);
    const std::string text = emit_rule_text(r, s.target_name);
    const Rule back = parse_rule_text(text, s);
    rules_ok += back == r && emit_rule_text(back, s.target_name) == text;
  }
  for (int i = 0; i < 200; ++i) {
    const auto b = gen::random_bundle(rng, s, i);
    const std::string text = emit_bundle(b);
    const auto back = parse_bundle(text, s);
    bundles_ok += back == b && emit_bundle(back) == text;
  }

  // Mutation fuzzing for a fixed wall-clock budget. A crash, or an exception
  // that is not a library Error, fails the criterion.
  const std::string alphabet = "IFTHENAD <=>{},\"\\-.0123456789eE+agepurpose_monthly income\n\t\r\x01\x7f\xc3\xa9\xff";
  const auto t0 = Clock::now();
  long iterations = 0, accepted = 0, unexpected = 0;
  while (seconds_since(t0) < 60.0) {
    for (int batch = 0; batch < 256; ++batch, ++iterations) {
      std::string text;
      if (gen::coin(rng, 0.05)) {
        for (int k = gen::uniform_int(rng, 0, 80); k > 0; --k)
          text += alphabet[static_cast<std::size_t>(gen::uniform_int(rng, 0, int(alphabet.size()) - 1))];
      } else {
        text = emit_rule_text(gen::random_rule(rng, s), s.target_name);
        for (int e = gen::uniform_int(rng, 1, 6); e > 0 && !text.empty(); --e) {
          const auto at = static_cast<std::size_t>(gen::uniform_int(rng, 0, int(text.size()) - 1));
          const char c = alphabet[static_cast<std::size_t>(gen::uniform_int(rng, 0, int(alphabet.size()) - 1))];
          switch (gen::uniform_int(rng, 0, 3)) {
            case 0: text[at] = c; break;
            case 1: text.insert(text.begin() + static_cast<long>(at), c); break;
            case 2: text.erase(at, 1); break;
            default: text.insert(at, text.substr(0, std::min<std::size_t>(text.size(), 12)));
          }
        }
      }
      try {
        const Rule r = parse_rule_text(text, s);
        // Whatever parses must survive its own round trip.
        if (parse_rule_text(emit_rule_text(r, s.target_name), s) != r) ++unexpected;
        ++accepted;
      } catch (const ParseError&) {
      } catch (const Error&) {
      } catch (...) {
        ++unexpected;
      }
    }
  }
  return {rules_ok == 1000 && bundles_ok == 200 && unexpected == 0,
          std::to_string(rules_ok) + "/1000 rules, " + std::to_string(bundles_ok) + "/200 bundles; fuzz " +
              std::to_string(iterations) + " inputs in " + fmt(seconds_since(t0), 1) + " s (" + std::to_string(accepted) +
              " accepted), " + std::to_string(unexpected) + " unexpected"};
}

study::StudyInput fixture_study() {
  study::StudyInput in;
  in.truths = truths_from_json(parse_json(fixture::text("study/truths.json")));
  responses_from_json(parse_json(fixture::text("study/responses_perfect.json")), in);
  return in;
}

Outcome study_design() {
  const auto in = fixture_study();
  const auto report = study::score_study(in);
  const auto& m = report.matrix;
  bool zero = true;
  for (const auto& [k, c] : m.cells) zero = zero && c.total() == 0;
  if (report.delta)
    for (const auto& [k, d] : report.delta->cells) zero = zero && d.total == 0;

  const auto order = study::latin_square_order(15, 3);
  bool balanced = true;
  for (int c = 0; c < 3; ++c)
    for (std::size_t pos = 0; pos < 3; ++pos)
      balanced = balanced && std::count_if(order.begin(), order.end(), [&](const auto& row) { return row[pos] == c; }) == 5;

  const bool counts = m.cells.size() == 405 && m.grid_size() == 405 && m.missing.empty() && m.participants.size() == 15 &&
                      m.conditions.size() == 3 && m.tasks.size() == 9;
  return {counts && zero && balanced && report.delta.has_value(),
          std::to_string(m.cells.size()) + " scored answers, totals " + std::to_string(m.total().total()) +
              ", Latin square " + (balanced ? "5 per position" : "unbalanced")};
}

Outcome scoring_oracles() {
  gen::Rng rng(10000);
  auto random_bits = [&](std::size_t n) {
    std::vector<std::uint8_t> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(gen::coin(rng, 0.3) ? 1 : 0);
    return v;
  };
  long score_n = 0, score_bad = 0;
  for (int i = 0; i < 10000; ++i, ++score_n) {
    const auto n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 30));
    const auto a = random_bits(n), t = random_bits(n);
    score_bad += study::score_answer({a}, {t}) != oracle::score(a, t);
  }

  long delta_n = 0, delta_bad = 0;
  const auto truths = fixture_study().truths;
  while (delta_n < 10000) {
    auto in = fixture_study();
    for (auto& r : in.responses) r.answer.bits = random_bits(11);
    const auto base = study::all_modalities[static_cast<std::size_t>(gen::uniform_int(rng, 0, 2))];
    const auto d = study::delta_error_matrix(study::aggregate_errors(in.responses, truths), base);
    std::map<study::CellKey, study::ErrorCounts> brute;
    for (const auto& r : in.responses)
      brute[{r.condition, r.instance_index, r.question_index, r.participant_id}] =
          oracle::score(r.answer.bits, truths.at({r.instance_index, r.question_index}).bits);
    std::size_t expected = 0;
    for (const auto& [k, c] : brute) {
      if (k.condition == base) continue;
      ++expected;
      ++delta_n;
      const auto& b = brute.at({base, k.instance, k.question, k.participant});
      const auto it = d.cells.find(k);
      if (it == d.cells.end() || it->second != study::DeltaCounts{c.e1 - b.e1, c.e2 - b.e2, c.total() - b.total()})
        ++delta_bad;
    }
    if (expected != d.cells.size()) ++delta_bad;
  }

  long tlx_n = 0, tlx_bad = 0;
  for (int i = 0; i < 10000; ++i, ++tlx_n) {
    study::TlxRatings r;
    for (auto& x : r) x = 5 * gen::uniform_int(rng, 0, 20);
    tlx_bad += study::raw_tlx(r) != oracle::tlx(r);
  }
  const bool tlx_example = study::raw_tlx({20, 40, 60, 80, 100, 0}) == 50.0;

  long ues_n = 0, ues_bad = 0;
  for (int i = 0; i < 10000; ++i, ++ues_n) {
    study::UesItems items;
    for (auto& x : items) x = gen::uniform_int(rng, 1, 5);
    std::vector<int> rev;
    for (int k = 1; k <= 12; ++k)
      if (gen::coin(rng, 0.2)) rev.push_back(k);
    const auto got = study::ues_short_form(items, rev);
    const auto want = oracle::ues(items, rev);
    const double dev = std::max({std::fabs(got.focused_attention - want.fa), std::fabs(got.perceived_usability - want.pu),
                                 std::fabs(got.aesthetic_appeal - want.ae), std::fabs(got.reward - want.rw),
                                 std::fabs(got.overall - want.overall)});
    ues_bad += dev > 1e-12;
  }
  const bool ok = score_bad + delta_bad + tlx_bad + ues_bad == 0 && tlx_example;
  return {ok, "score_answer " + std::to_string(score_n - score_bad) + "/" + std::to_string(score_n) + ", delta " +
                  std::to_string(delta_n - delta_bad) + "/" + std::to_string(delta_n) + ", raw_tlx " +
                  std::to_string(tlx_n - tlx_bad) + "/" + std::to_string(tlx_n) + ", ues " +
                  std::to_string(ues_n - ues_bad) + "/" + std::to_string(ues_n) +
                  ", raw_tlx(20,40,60,80,100,0) = " + format_number(study::raw_tlx({20, 40, 60, 80, 100, 0}))};
}

Outcome determinism() {
  Api api(load_data_dir(FIPER_TEST_DATA));
  int cli_same = 0, cli_total = 0;
  for (const char* filter : {"all", "rule"})
    for (const char* id : {"credit_bad", "structured", "vacuous"}) {
      ++cli_total;
      const auto r = fixture::run(fixture::quoted(fixture::cli()) + " render " +
                                  fixture::quoted(fixture::path(std::string("bundles/") + id + ".json")) + " --dataset " +
                                  fixture::quoted(fixture::path("german_credit.csv")) + " --filter " + filter);
      const auto svc = api.get(std::string("/api/explanations/") + id + "/svg", {{"filter", filter}});
      cli_same += r.exit_code == 0 && svc.status == 200 && r.out == svc.body;
    }

  Server server(api);
  const int port = server.bind_any("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  int get_same = 0, get_total = 0;
  {
    httplib::Client client("127.0.0.1", port);
    for (const char* path : {"/api/explanations/credit_bad/svg", "/api/explanations/credit_bad/svg?filter=rule",
                             "/api/explanations/structured/view", "/api/features/german_credit/age",
                             "/api/datasets"}) {
      std::string first;
      for (int k = 0; k < 10; ++k, ++get_total) {
        const auto res = client.Get(path);
        if (!res || res->status != 200) continue;
        if (k == 0) first = res->body;
        get_same += res->body == first;
      }
    }
  }
  server.stop();
  th.join();
  return {cli_same == cli_total && get_same == get_total,
          std::to_string(cli_same) + "/" + std::to_string(cli_total) + " CLI renders equal service SVG, " +
              std::to_string(get_same) + "/" + std::to_string(get_total) + " repeated GETs identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"coverage-oracle", coverage_oracle},
      {"quartile-oracle", quartile_oracle},
      {"marker-in-highlight", marker_in_highlight},
      {"worked-example-structure", worked_example_structure},
      {"parser-round-trips", parser_round_trips},
      {"study-design-arithmetic", study_design},
      {"scoring-oracles", scoring_oracles},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
