#include "qrew/mocks.hpp"

#include <gtest/gtest.h>

#include <random>

#include "qrew/prompt.hpp"
#include "test_util.hpp"

namespace {

using namespace qrew;

std::string render_with_history(const std::vector<std::string>& history,
                                const std::string& query) {
    Context ctx;
    for (std::size_t i = 0; i < history.size(); ++i) {
        ctx.items.push_back({history[i], std::nullopt});
        ctx.source_indices.push_back(static_cast<int>(i) + 1);
    }
    return render_prompt(builtin_text_to_vis_template(), ctx, query);
}

TEST(EchoQueryMock, ReturnsCurrentQuery) {
    EchoQueryMock mock;
    const std::string prompt =
        render_with_history({"compare revenue by country"}, "show it as a line chart");
    EXPECT_EQ(mock.generate(prompt), "show it as a line chart");
    EXPECT_TRUE(mock.descriptor().deterministic);
}

TEST(EchoQueryMock, RejectsUnlabeledPrompt) {
    EchoQueryMock mock;
    EXPECT_THROW(mock.generate("free-form text with no labels"), ProviderError);
}

TEST(ScriptedMock, FirstMatchWins) {
    ScriptedMock mock({{{"alpha"}, "first"}, {{"alpha", "beta"}, "second"}});
    EXPECT_EQ(mock.generate(render_with_history({}, "alpha beta")), "first");
}

TEST(ScriptedMock, ConjunctionMatchersMustAllHit) {
    ScriptedMock mock({{{"alpha", "gamma"}, "both"}, {{"beta"}, "only beta"}});
    EXPECT_EQ(mock.generate(render_with_history({"gamma delta"}, "alpha")), "both");
    EXPECT_EQ(mock.generate(render_with_history({}, "beta")), "only beta");
}

TEST(ScriptedMock, StrictMissRaises) {
    ScriptedMock mock(std::vector<ScriptEntry>{{{"never-present"}, "x"}});
    try {
        mock.generate(render_with_history({}, "hello"));
        FAIL() << "expected ProviderError";
    } catch (const ProviderError& e) {
        EXPECT_EQ(e.kind(), ProviderErrorKind::ScriptMiss);
        EXPECT_NE(e.detail().find("hello"), std::string::npos);  // prompt preserved
    }
}

TEST(ScriptedMock, NonStrictFallsBackToEcho) {
    ScriptedMock mock({{{"never-present"}, "x"}}, /*strict=*/false);
    EXPECT_EQ(mock.generate(render_with_history({}, "hello there")), "hello there");
}

TEST(ScriptedMock, LoadsScriptFile) {
    auto mock = ScriptedMock::from_file(qtest::fixture_path("demo_script.json").string());
    const std::string prompt = render_with_history({"compare yearly revenue by country"},
                                                   "show it as a line chart");
    EXPECT_EQ(mock.generate(prompt), "compare yearly revenue by country as line chart");
}

TEST(RuleFusionMock, FusesAgainstMostRecentContextItem) {
    RuleFusionMock mock;
    const std::string prompt = render_with_history({"compare yearly revenue by country"},
                                                   "show it as a line chart");
    EXPECT_EQ(mock.generate(prompt), "compare yearly revenue by country as line chart");
}

TEST(RuleFusionMock, EmptyContextEchoesSelfContainedQuery) {
    RuleFusionMock mock;
    const std::string prompt = render_with_history({}, "compare monthly revenue by country");
    EXPECT_EQ(mock.generate(prompt), "compare monthly revenue by country");
}

TEST(MockProviders, AgreeOnDemoTrace) {
    // Two independent oracles (canned script vs grammar) must produce the
    // same rewrites for the whole demo conversation.
    RuleFusionMock rule;
    auto scripted = qtest::demo_scripted_mock();
    std::string previous;
    for (const auto& [input, expected] : qtest::demo_trace()) {
        const std::string prompt = previous.empty() ? render_with_history({}, input)
                                                    : render_with_history({previous}, input);
        const std::string from_rule = rule.generate(prompt);
        const std::string from_script = scripted.generate(prompt);
        EXPECT_EQ(from_rule, from_script);
        EXPECT_EQ(from_rule, expected);
        previous = expected;
    }
}

TEST(MockProviders, DeterministicUnderRepeatedCalls) {
    RuleFusionMock rule;
    EchoQueryMock echo;
    ScriptedMock scripted({{{"compare"}, "pinned"}}, /*strict=*/false);
    std::mt19937_64 rng(3);
    for (int run = 0; run < 200; ++run) {
        const std::string prompt = render_with_history(
            {qtest::random_sentence(rng)}, qtest::random_sentence(rng));
        for (GenerativeModelProvider* provider :
             {static_cast<GenerativeModelProvider*>(&rule),
              static_cast<GenerativeModelProvider*>(&echo),
              static_cast<GenerativeModelProvider*>(&scripted)}) {
            EXPECT_TRUE(provider->descriptor().deterministic);
            EXPECT_EQ(provider->generate(prompt), provider->generate(prompt));
        }
    }
}

}  // namespace
