#include "qrew/rules.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace {

using namespace qrew;
using rules::rule_fuse;

TEST(RuleFuse, ReproducesDemoTraceStepByStep) {
    std::string base;
    for (const auto& [input, expected] : qtest::demo_trace()) {
        const std::string got = rule_fuse(base, input);
        EXPECT_EQ(got, expected) << "input: " << input;
        base = got;
    }
}

TEST(RuleFuse, DimensionSwapKeepsChart) {
    EXPECT_EQ(rule_fuse("compare yearly revenue by country as line chart",
                        "now change to marketing channel"),
              "compare yearly revenue by marketing channel as line chart");
}

TEST(RuleFuse, TopKReplacement) {
    EXPECT_EQ(rule_fuse("compare month over month pageviews by top-3 marketing channels as bar",
                        "what about top-5"),
              "compare month over month pageviews by top-5 marketing channels as bar");
}

TEST(RuleFuse, EmptyFollowupKeepsBase) {
    EXPECT_EQ(rule_fuse("compare revenue by country", ""), "compare revenue by country");
    EXPECT_EQ(rule_fuse("compare revenue by country", "   "), "compare revenue by country");
}

TEST(RuleFuse, FullQuestionStartsOver) {
    EXPECT_EQ(rule_fuse("compare revenue by country", "compare clicks by campaign as pie"),
              "compare clicks by campaign as pie");
}

TEST(RuleFuse, UnrecognizedFollowupEchoes) {
    EXPECT_EQ(rule_fuse("compare revenue by country", "tell me a joke"), "tell me a joke");
}

TEST(RuleFuse, UnparseableBaseEchoesFollowup) {
    EXPECT_EQ(rule_fuse("", "add revenue"), "add revenue");
    EXPECT_EQ(rule_fuse("what is streaming segmentation", "add revenue"), "add revenue");
}

TEST(RuleFuse, AddingExistingMetricIsIdempotent) {
    EXPECT_EQ(rule_fuse("compare revenue by country", "add revenue"),
              "compare revenue by country");
}

TEST(RuleFuse, TimeFilterReplacesGranularity) {
    EXPECT_EQ(rule_fuse("compare monthly revenue by country", "show only last week"),
              "compare last week revenue by country");
}

TEST(ParseQuestion, SlotsExtracted) {
    const auto form = rules::parse_question(
        "compare this month pageviews and revenue by top-5 marketing channels as bar");
    ASSERT_TRUE(form.has_value());
    EXPECT_EQ(form->verb, "compare");
    EXPECT_EQ(form->time_spec, "this month");
    EXPECT_EQ(form->metrics, (std::vector<std::string>{"pageviews", "revenue"}));
    ASSERT_TRUE(form->top_k.has_value());
    EXPECT_EQ(*form->top_k, 5);
    EXPECT_EQ(form->dimension, "marketing channel");
    EXPECT_EQ(form->chart, "bar");
}

TEST(ParseQuestion, RejectsNonQuestions) {
    EXPECT_FALSE(rules::parse_question("").has_value());
    EXPECT_FALSE(rules::parse_question("yearly").has_value());
    EXPECT_FALSE(rules::parse_question("what about top-5").has_value());
    EXPECT_FALSE(rules::parse_question("compare revenue country").has_value());  // no "by"
    EXPECT_FALSE(rules::parse_question("compare by country").has_value());       // no metric
}

TEST(ParseQuestion, RenderParseRoundTrip) {
    const rules::RuleLexicon lexicon;
    std::mt19937_64 rng(13);
    for (int run = 0; run < 300; ++run) {
        rules::QuestionForm form;
        form.verb = "compare";
        if (rng() % 2 == 0) {
            form.time_spec = lexicon.granularities[rng() % lexicon.granularities.size()];
        } else if (rng() % 2 == 0) {
            form.time_spec = lexicon.time_filters[rng() % lexicon.time_filters.size()];
        }
        form.metrics.push_back(lexicon.metrics[rng() % lexicon.metrics.size()]);
        if (rng() % 3 == 0) {
            const auto& extra = lexicon.metrics[rng() % lexicon.metrics.size()];
            if (extra != form.metrics.front()) form.metrics.push_back(extra);
        }
        if (rng() % 2 == 0) form.top_k = 2 + static_cast<int>(rng() % 9);
        form.dimension = lexicon.dimensions[rng() % lexicon.dimensions.size()];
        if (rng() % 2 == 0) form.chart = lexicon.chart_words[rng() % lexicon.chart_words.size()];

        const std::string rendered = rules::render_question(form);
        const auto reparsed = rules::parse_question(rendered, lexicon);
        ASSERT_TRUE(reparsed.has_value()) << rendered;
        EXPECT_EQ(*reparsed, form) << rendered;
    }
}

TEST(ParseFollowupEdits, RecognizesEachOperation) {
    using rules::EditOp;
    const auto single = [](std::string_view text) {
        const auto edits = rules::parse_followup_edits(text);
        EXPECT_EQ(edits.size(), 1u) << text;
        return edits.empty() ? rules::Edit{} : edits.front();
    };
    EXPECT_EQ(single("yearly").op, EditOp::ReplaceGranularity);
    EXPECT_EQ(single("show it as a line chart").op, EditOp::SetChartType);
    EXPECT_EQ(single("now change to marketing channel").op, EditOp::ReplaceDimension);
    EXPECT_EQ(single("switch to profit").op, EditOp::ReplaceMetric);
    EXPECT_EQ(single("replace with pageviews").op, EditOp::ReplaceMetric);
    EXPECT_EQ(single("also add conversions").op, EditOp::AddMetric);
    EXPECT_EQ(single("show top-3").op, EditOp::SetTopK);
    EXPECT_EQ(single("show only this month").op, EditOp::SetTimeFilter);
    EXPECT_EQ(single("make it a pie chart").op, EditOp::SetChartType);
}

TEST(ParseFollowupEdits, CompoundFollowupYieldsBothEdits) {
    const auto edits = rules::parse_followup_edits("what about month over month as bar");
    ASSERT_EQ(edits.size(), 2u);
    EXPECT_EQ(edits[0].op, rules::EditOp::ReplaceGranularity);
    EXPECT_EQ(edits[0].value, "month over month");
    EXPECT_EQ(edits[1].op, rules::EditOp::SetChartType);
    EXPECT_EQ(edits[1].value, "bar");
}

TEST(ParseFollowupEdits, AddSeveralMetrics) {
    const auto edits = rules::parse_followup_edits("add revenue and profit");
    ASSERT_EQ(edits.size(), 2u);
    EXPECT_EQ(edits[0].value, "revenue");
    EXPECT_EQ(edits[1].value, "profit");
}

}  // namespace
