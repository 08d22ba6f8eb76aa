#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "qrew/config.hpp"
#include "qrew/context.hpp"
#include "qrew/gate.hpp"
#include "qrew/prompt.hpp"
#include "qrew/providers.hpp"
#include "qrew/session.hpp"
#include "qrew/text.hpp"

namespace qrew {

struct RewriteOutcome {
    std::string original_query;
    std::string rewritten_query;
    bool was_gated = false;  // true when the gate decided no rewrite was needed
    Context context_used;
    RewriteConfig config_used;
};

/// Runs one parameterized rewrite: project the history, slice the window,
/// consult the gate, render the prompt, call the model once.
///
/// The engine is stateless between calls; all conversation state lives in the
/// session value. Concurrent rewrites on different sessions are safe. Fusion
/// steps on one session depend on the previous step, so callers serialize
/// per session.
class RewriteEngine {
public:
    explicit RewriteEngine(TemplateRegistry templates = TemplateRegistry::builtin())
        : templates_(std::move(templates)) {}

    RewriteOutcome rewrite(const ConversationSession& session, std::string_view query,
                           const RewriteConfig& config, GenerativeModelProvider& model,
                           GateClassifier* gate = nullptr) const {
        if (text::is_blank(query)) {
            throw EmptyQueryError("cannot rewrite a blank query");
        }
        config.validate();
        if (config.history_source == HistorySource::RewrittenQueries) {
            for (const Turn& turn : session.turns) {
                if (!turn.rewritten_query.has_value()) {
                    throw MissingRewrittenHistoryError(
                        "turn " + std::to_string(turn.index) +
                        " has no rewritten query; fusion history is incomplete");
                }
            }
        }

        RewriteOutcome outcome;
        outcome.original_query = text::trim_copy(query);
        outcome.config_used = config;
        outcome.context_used =
            build_context(project_history(session, config.history_source), config.k,
                          config.include_responses, config.window_bound);

        if (config.gate_enabled) {
            GateClassifier* effective = gate ? gate : &default_gate();
            const GateDecision decision =
                classify_needs_rewrite(outcome.original_query, outcome.context_used, *effective);
            if (!decision.needs_rewrite) {
                outcome.was_gated = true;
                outcome.rewritten_query = outcome.original_query;
                return outcome;
            }
        }

        const PromptTemplate& tmpl = templates_.get(config.prompt_template_id);
        const std::string prompt =
            render_prompt(tmpl, outcome.context_used, outcome.original_query);
        outcome.rewritten_query = text::strip_surrounding_quotes(model.generate(prompt));
        return outcome;
    }

    /// One fusion step: rewrite, then append a turn carrying the rewrite so
    /// the next step can chain on it. A gated (unrewritten) turn stores the
    /// original query as its rewrite, keeping the recursion unbroken.
    std::pair<ConversationSession, RewriteOutcome> advance_fusion(
        const ConversationSession& session, std::string_view query,
        std::optional<std::string> response, const RewriteConfig& config,
        GenerativeModelProvider& model, GateClassifier* gate = nullptr) const {
        if (config.history_source != HistorySource::RewrittenQueries) {
            throw ConfigError("advance_fusion requires rewritten-query history");
        }
        RewriteOutcome outcome = rewrite(session, query, config, model, gate);

        Turn turn;
        turn.index = session.turns.empty() ? 1 : session.turns.back().index + 1;
        turn.user_query = outcome.original_query;
        turn.response = std::move(response);
        turn.rewritten_query = outcome.rewritten_query;
        return {session_append(session, std::move(turn)), std::move(outcome)};
    }

    const TemplateRegistry& templates() const { return templates_; }

private:
    static HeuristicGate& default_gate() {
        static HeuristicGate gate;
        return gate;
    }

    TemplateRegistry templates_;
};

}  // namespace qrew
