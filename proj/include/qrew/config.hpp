#pragma once

#include <string>

#include <json.hpp>

#include "qrew/errors.hpp"
#include "qrew/session.hpp"

namespace qrew {

/// How the context window is sliced from the projected history.
/// LastK takes the final min(k, t) items. AlgorithmLiteral takes items
/// max(1, t-k)..t inclusive, i.e. min(k+1, t) of them.
enum class WindowBound {
    LastK,
    AlgorithmLiteral,
};

/// Full parameterization of a rewrite run: window length, which history
/// projection feeds it, whether assistant responses ride along, the prompt
/// template, and the optional needs-rewrite gate.
struct RewriteConfig {
    int k = 5;
    HistorySource history_source = HistorySource::RawInputs;
    bool include_responses = true;
    std::string prompt_template_id = "text-qa";
    bool gate_enabled = false;
    WindowBound window_bound = WindowBound::LastK;

    bool operator==(const RewriteConfig&) const = default;

    void validate() const {
        if (k < 0) {
            throw ConfigError("window length k must be >= 0, got " + std::to_string(k));
        }
        if (history_source == HistorySource::RewrittenQueries && include_responses) {
            throw ConfigError("rewritten-query history carries no responses; "
                              "include_responses must be false");
        }
    }

    /// Window over the last 5 raw questions plus their responses.
    static RewriteConfig query_rewrite() {
        RewriteConfig c;
        c.k = 5;
        c.history_source = HistorySource::RawInputs;
        c.include_responses = true;
        c.prompt_template_id = "text-qa";
        return c;
    }

    /// Recursive fusion: only the previous rewritten query, no responses.
    static RewriteConfig query_fusion() {
        RewriteConfig c;
        c.k = 1;
        c.history_source = HistorySource::RewrittenQueries;
        c.include_responses = false;
        c.prompt_template_id = "text-to-vis";
        return c;
    }
};

inline const char* to_string(HistorySource s) {
    return s == HistorySource::RawInputs ? "raw_inputs" : "rewritten_queries";
}

inline const char* to_string(WindowBound b) {
    return b == WindowBound::LastK ? "last_k" : "algorithm_literal";
}

inline nlohmann::json to_json(const RewriteConfig& c) {
    return nlohmann::json{{"k", c.k},
                          {"history_source", to_string(c.history_source)},
                          {"include_responses", c.include_responses},
                          {"prompt_template_id", c.prompt_template_id},
                          {"gate_enabled", c.gate_enabled},
                          {"window_bound", to_string(c.window_bound)}};
}

}  // namespace qrew
