#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qrew/config.hpp"
#include "qrew/session.hpp"

namespace qrew {

struct ContextItem {
    std::string query;
    std::optional<std::string> response;

    bool operator==(const ContextItem&) const = default;
};

/// The ordered history slice handed to the model, most recent item last.
struct Context {
    std::vector<ContextItem> items;
    std::vector<int> source_indices;  // turn indices the items were drawn from

    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }

    bool operator==(const Context&) const = default;
};

/// Slice the projected history down to the configured window.
///
/// LastK keeps the final min(k, t) items; AlgorithmLiteral keeps items
/// max(1, t-k)..t (one more than k when the history is long enough).
/// Dropping responses happens here so the context is exactly what the
/// prompt will show.
inline Context build_context(const std::vector<HistoryItem>& history, int k,
                             bool include_responses, WindowBound bound) {
    if (k < 0) {
        throw ConfigError("window length k must be >= 0, got " + std::to_string(k));
    }
    const std::size_t t = history.size();
    std::size_t take = 0;
    if (bound == WindowBound::LastK) {
        take = std::min<std::size_t>(static_cast<std::size_t>(k), t);
    } else if (t > 0) {
        take = std::min<std::size_t>(static_cast<std::size_t>(k) + 1, t);
    }

    Context ctx;
    ctx.items.reserve(take);
    ctx.source_indices.reserve(take);
    for (std::size_t i = t - take; i < t; ++i) {
        const HistoryItem& item = history[i];
        ContextItem ci;
        ci.query = item.query;
        if (include_responses) ci.response = item.response;
        ctx.items.push_back(std::move(ci));
        ctx.source_indices.push_back(item.turn_index);
    }
    return ctx;
}

}  // namespace qrew
