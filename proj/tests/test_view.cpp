#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fiper/view.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace fiper;

namespace {

std::vector<std::string> features_of(const FiperView& v) {
  std::vector<std::string> out;
  for (const auto& r : v.rows) out.push_back(r.feature);
  return out;
}

ViewOptions with(RowFilter f, RowSort s = RowSort::abs_importance) {
  ViewOptions o;
  o.filter = f;
  o.sort = s;
  return o;
}

}  // namespace

TEST(BuildView, RuleOnlyShowsThePremiseFeatures) {
  const auto e = fixture::german_credit();
  const auto v = build_fiper_view(fixture::bundle("credit_bad"), e.summaries, with(RowFilter::rule_only));
  ASSERT_EQ(v.rows.size(), 3u);
  const auto names = features_of(v);
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()),
            (std::set<std::string>{"present_employed_since", "purpose", "age"}));
  // purpose 0.14, age 0.10, present_employed_since 0.04
  EXPECT_EQ(features_of(v), (std::vector<std::string>{"purpose", "age", "present_employed_since"}));
  for (const auto& r : v.rows) {
    EXPECT_TRUE(r.in_rule);
    EXPECT_TRUE(r.highlight.has_value());
  }
}

TEST(BuildView, AllFeaturesSortedByMagnitude) {
  const auto e = fixture::german_credit();
  const auto v = build_fiper_view(fixture::bundle("credit_bad"), e.summaries, with(RowFilter::all_features));
  ASSERT_EQ(v.rows.size(), 10u);
  EXPECT_EQ(v.rows[0].feature, "account_check_status");
  EXPECT_EQ(v.rows[0].weight_sign, WeightSign::negative);
  EXPECT_EQ(v.rows[1].feature, "housing");
  EXPECT_EQ(v.rows[1].weight_sign, WeightSign::positive);
  for (std::size_t i = 1; i < v.rows.size(); ++i)
    EXPECT_GE(std::fabs(v.rows[i - 1].weight), std::fabs(v.rows[i].weight));
  for (const auto& r : v.rows) EXPECT_EQ(r.highlight.has_value(), r.in_rule);
}

TEST(BuildView, AgeRowMatchesHandComputedGeometry) {
  const auto e = fixture::german_credit();
  const auto v = build_fiper_view(fixture::bundle("credit_bad"), e.summaries, with(RowFilter::rule_only));
  const auto& age = *std::find_if(v.rows.begin(), v.rows.end(), [](const auto& r) { return r.feature == "age"; });
  EXPECT_EQ(age.marker.bucket, QuartileBucket::below_q1);
  EXPECT_DOUBLE_EQ(age.marker.normalized, 4.0 / 56);
  EXPECT_DOUBLE_EQ(age.highlight->start, 0.0);
  EXPECT_DOUBLE_EQ(age.highlight->end, 12.0 / 56);
  EXPECT_EQ(std::get<double>(age.observed), 23);
}

TEST(BuildView, UnlistedFeaturesGetWeightZero) {
  const auto e = fixture::german_credit();
  const auto b = fixture::bundle("structured");  // four weights, rule on age unlisted
  const auto v = build_fiper_view(b, e.summaries, with(RowFilter::all_features));
  ASSERT_EQ(v.rows.size(), 10u);
  EXPECT_EQ(features_of(v)[0], "account_check_status");
  const auto age = std::find_if(v.rows.begin(), v.rows.end(), [](const auto& r) { return r.feature == "age"; });
  EXPECT_EQ(age->weight, 0.0);
  EXPECT_EQ(age->weight_sign, WeightSign::zero);
  EXPECT_TRUE(age->in_rule);
  // Listed rows first by magnitude, then the zero rows in candidate order
  // (unlisted rule features before the remaining schema features).
  EXPECT_EQ(features_of(v), (std::vector<std::string>{"account_check_status", "credit_amount", "duration_in_month",
                                                      "savings", "age", "credit_history", "purpose",
                                                      "present_employed_since", "housing", "job"}));
}

TEST(BuildView, SchemaOrderSort) {
  const auto e = fixture::german_credit();
  const auto v = build_fiper_view(fixture::bundle("credit_bad"), e.summaries,
                                  with(RowFilter::all_features, RowSort::schema_order));
  std::vector<std::string> schema_order;
  for (const auto& f : e.schema().features) schema_order.push_back(f.name);
  EXPECT_EQ(features_of(v), schema_order);
}

TEST(BuildView, EmptyPremiseRuleOnlyIsEmpty) {
  const auto e = fixture::german_credit();
  const auto v = build_fiper_view(fixture::bundle("vacuous"), e.summaries, with(RowFilter::rule_only));
  EXPECT_TRUE(v.rows.empty());
  EXPECT_EQ(v.prediction, "good");
}

TEST(BuildView, Errors) {
  const auto e = fixture::german_credit();
  ViewOptions o;
  o.palette.negative_color = o.palette.positive_color;
  EXPECT_THROW(build_fiper_view(fixture::bundle("credit_bad"), e.summaries, o), Error);
  auto partial = e.summaries;
  partial.erase(std::remove_if(partial.begin(), partial.end(), [](const auto& s) { return s.feature == "age"; }),
                partial.end());
  try {
    build_fiper_view(fixture::bundle("credit_bad"), partial, with(RowFilter::rule_only));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), "missing-summary");
    EXPECT_EQ(err.path(), "age");
  }
}

TEST(BuildView, FilterSoundnessAndScaleInvariance) {
  gen::Rng rng(2718);
  const auto s = gen::mixed_schema();
  for (int i = 0; i < 200; ++i) {
    const auto d = gen::random_dataset(rng, s, gen::uniform_int(rng, 1, 30));
    const auto summaries = summarize_dataset(d);
    auto b = gen::random_bundle(rng, s, i);
    const auto all = build_fiper_view(b, summaries, with(RowFilter::all_features));
    const auto rule = build_fiper_view(b, summaries, with(RowFilter::rule_only));
    EXPECT_EQ(all.rows.size(), s.features.size());
    std::set<std::string> premise, rule_rows;
    for (const auto& p : b.rule.premise) premise.insert(p.feature);
    for (const auto& r : rule.rows) {
      rule_rows.insert(r.feature);
      EXPECT_TRUE(r.in_rule);
      // Same row appears in the full view with identical content.
      EXPECT_NE(std::find(all.rows.begin(), all.rows.end(), r), all.rows.end());
    }
    EXPECT_EQ(rule_rows, premise);

    const double c = gen::uniform(rng, 0.01, 100);
    for (auto& w : b.importance) w.weight *= c;
    EXPECT_EQ(features_of(build_fiper_view(b, summaries, with(RowFilter::all_features))), features_of(all));
  }
}

TEST(TextModality, HeaderRuleAndPrediction) {
  const auto b = fixture::bundle("credit_bad");
  const std::string t = render_text_modality(b, "credit_risk");
  EXPECT_EQ(t,
            "# explanation credit_bad\n"
            "IF present_employed_since IN {unemployed, \"< 1 year\"} AND purpose IN {education, business} AND 19 <= "
            "age <= 31 THEN credit_risk = bad\n"
            "prediction: bad\n");
  const auto s = fixture::schema();
  const std::string rule_line = t.substr(t.find('\n') + 1, t.find("\nprediction") - t.find('\n') - 1);
  EXPECT_EQ(parse_rule_text(rule_line, s), b.rule);
  for (const auto& f : s.features) {
    const bool named = t.find(f.name) != std::string::npos;
    EXPECT_EQ(named, b.rule.find(f.name) != nullptr) << f.name;
  }
}

TEST(TextModality, EmptyPremise) {
  EXPECT_EQ(render_text_modality(fixture::bundle("vacuous"), "credit_risk"),
            "# explanation vacuous\nIF THEN credit_risk = good\nprediction: good\n");
}

TEST(BlockModality, GroupsPerPredicate) {
  const auto spec = render_block_modality(fixture::bundle("credit_bad"), "credit_risk");
  ASSERT_EQ(spec.predicates.size(), 3u);
  const auto& age = spec.predicates[2];
  EXPECT_EQ(age.feature, "age");
  ASSERT_EQ(age.blocks.size(), 5u);
  EXPECT_EQ(age.blocks[0].text, "19");
  EXPECT_EQ(age.blocks[1].text, "≤");
  EXPECT_EQ(age.blocks[2].text, "age");
  EXPECT_EQ(age.blocks[2].role, BlockRole::feature);
  EXPECT_EQ(age.blocks[4].text, "31");
  const auto& purpose = spec.predicates[1];
  EXPECT_EQ(purpose.blocks[0].text, "purpose");
  EXPECT_EQ(purpose.blocks[1].text, "∈");
  EXPECT_EQ(purpose.blocks[2].text, "education");
  EXPECT_EQ(purpose.blocks[3].text, "business");
  EXPECT_EQ(spec.consequence.blocks.size(), 3u);
  EXPECT_EQ(spec.consequence.blocks[2].text, "bad");
}

TEST(BlockModality, UpperBoundOnly) {
  ExplanationBundle b;
  b.rule = Rule{{{"age", NumericInterval{std::nullopt, 31}}, {"x", NumericInterval{2, std::nullopt, true}}}, "bad"};
  const auto spec = render_block_modality(b, "credit_risk");
  ASSERT_EQ(spec.predicates.size(), 2u);
  std::vector<std::string> texts;
  for (const auto& blk : spec.predicates[0].blocks) texts.push_back(blk.text);
  EXPECT_EQ(texts, (std::vector<std::string>{"age", "≤", "31"}));
  texts.clear();
  for (const auto& blk : spec.predicates[1].blocks) texts.push_back(blk.text);
  EXPECT_EQ(texts, (std::vector<std::string>{"x", ">", "2"}));
}

TEST(BlockModality, GroupCountEqualsPremiseLength) {
  gen::Rng rng(100);
  const auto s = gen::mixed_schema();
  for (int i = 0; i < 100; ++i) {
    const auto b = gen::random_bundle(rng, s, i);
    const auto spec = render_block_modality(b, s.target_name);
    ASSERT_EQ(spec.predicates.size(), b.rule.premise.size());
    for (std::size_t k = 0; k < spec.predicates.size(); ++k) EXPECT_EQ(spec.predicates[k].feature, b.rule.premise[k].feature);
  }
}
