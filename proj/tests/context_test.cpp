#include "qrew/context.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace qrew;

std::vector<HistoryItem> make_history(int t) {
    std::vector<HistoryItem> items;
    for (int i = 1; i <= t; ++i) {
        items.push_back({i, "q" + std::to_string(i), "r" + std::to_string(i)});
    }
    return items;
}

TEST(BuildContext, LastKTakesFinalKPairs) {
    const auto ctx = build_context(make_history(10), 5, true, WindowBound::LastK);
    ASSERT_EQ(ctx.size(), 5u);
    EXPECT_EQ(ctx.items.front().query, "q6");
    EXPECT_EQ(ctx.items.back().query, "q10");
    EXPECT_EQ(ctx.source_indices, (std::vector<int>{6, 7, 8, 9, 10}));
}

TEST(BuildContext, AlgorithmLiteralTakesOneMore) {
    const auto ctx = build_context(make_history(10), 5, true, WindowBound::AlgorithmLiteral);
    ASSERT_EQ(ctx.size(), 6u);
    EXPECT_EQ(ctx.items.front().query, "q5");
    EXPECT_EQ(ctx.items.back().query, "q10");
}

TEST(BuildContext, WindowExceedsHistory) {
    for (const auto bound : {WindowBound::LastK, WindowBound::AlgorithmLiteral}) {
        const auto ctx = build_context(make_history(2), 5, true, bound);
        EXPECT_EQ(ctx.size(), 2u);
        EXPECT_EQ(ctx.items.front().query, "q1");
    }
}

TEST(BuildContext, ZeroWindow) {
    EXPECT_TRUE(build_context(make_history(7), 0, true, WindowBound::LastK).empty());
    // The literal bound still spans one item at k=0.
    EXPECT_EQ(build_context(make_history(7), 0, true, WindowBound::AlgorithmLiteral).size(), 1u);
}

TEST(BuildContext, EmptyHistory) {
    for (const auto bound : {WindowBound::LastK, WindowBound::AlgorithmLiteral}) {
        EXPECT_TRUE(build_context({}, 5, true, bound).empty());
    }
}

TEST(BuildContext, ResponsesDroppedWhenExcluded) {
    const auto ctx = build_context(make_history(4), 2, false, WindowBound::LastK);
    ASSERT_EQ(ctx.size(), 2u);
    for (const auto& item : ctx.items) {
        EXPECT_FALSE(item.response.has_value());
    }
}

TEST(BuildContext, NegativeWindowRejected) {
    EXPECT_THROW(build_context(make_history(3), -1, true, WindowBound::LastK), ConfigError);
}

TEST(BuildContext, RandomizedSliceProperty) {
    std::mt19937_64 rng(7);
    for (int run = 0; run < 1000; ++run) {
        const int t = 1 + static_cast<int>(rng() % 50);
        const int k = static_cast<int>(rng() % 11);
        const bool literal = rng() % 2 == 0;
        const auto bound = literal ? WindowBound::AlgorithmLiteral : WindowBound::LastK;
        const auto history = make_history(t);
        const auto ctx = build_context(history, k, true, bound);

        const std::size_t expected_size =
            literal ? std::min<std::size_t>(static_cast<std::size_t>(k) + 1, history.size())
                    : std::min<std::size_t>(static_cast<std::size_t>(k), history.size());
        ASSERT_EQ(ctx.size(), expected_size);
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            const auto& expected = history[history.size() - expected_size + i];
            EXPECT_EQ(ctx.items[i].query, expected.query);
            EXPECT_EQ(ctx.source_indices[i], expected.turn_index);
            if (i > 0) {
                EXPECT_LT(ctx.source_indices[i - 1], ctx.source_indices[i]);
            }
        }
    }
}

}  // namespace
