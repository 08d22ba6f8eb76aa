#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qrew/context.hpp"
#include "qrew/providers.hpp"
#include "qrew/text.hpp"

namespace qrew {

enum class GateTag {
    PronounReference,
    Elliptical,
    SelfContained,
    ModelJudged,
    EmptyHistory,
};

inline const char* to_string(GateTag tag) {
    switch (tag) {
        case GateTag::PronounReference: return "pronoun_reference";
        case GateTag::Elliptical: return "elliptical";
        case GateTag::SelfContained: return "self_contained";
        case GateTag::ModelJudged: return "model_judged";
        case GateTag::EmptyHistory: return "empty_history";
    }
    return "unknown";
}

struct GateDecision {
    bool needs_rewrite = false;
    double confidence = 0.0;  // in [0, 1]
    GateTag rationale_tag = GateTag::SelfContained;

    bool operator==(const GateDecision&) const = default;
};

/// Decides whether a query needs rewriting at all. Self-contained queries
/// pass through the engine unchanged.
class GateClassifier {
public:
    virtual ~GateClassifier() = default;
    virtual GateDecision classify(const std::string& query, const Context& context) = 0;
};

/// Cue lexicon for the offline heuristic classifier. Every list is
/// configurable; the defaults cover the usual anaphora/ellipsis signals.
struct GateCueLexicon {
    std::vector<std::string> pronouns = {"it", "that", "this", "them", "these", "those", "they"};
    std::vector<std::string> fragment_phrases = {"what about", "how about", "and now", "what if"};
    std::vector<std::string> edit_verbs = {"add",    "remove", "replace", "change",
                                           "switch", "set",    "make",    "now"};
    int short_query_token_threshold = 4;  // strictly fewer tokens counts as elliptical
};

/// Deterministic rule-based gate. With an empty context nothing can be
/// resolved, so the answer is always "no rewrite needed".
class HeuristicGate : public GateClassifier {
public:
    explicit HeuristicGate(GateCueLexicon lexicon = {}) : lexicon_(std::move(lexicon)) {}

    GateDecision classify(const std::string& query, const Context& context) override {
        if (context.empty()) {
            return {false, 1.0, GateTag::EmptyHistory};
        }
        const std::string lowered = text::to_lower(query);
        const std::vector<std::string> tokens = text::tokenize(lowered);

        for (const auto& p : lexicon_.pronouns) {
            for (const auto& tok : tokens) {
                if (tok == p) return {true, 0.9, GateTag::PronounReference};
            }
        }
        for (const auto& phrase : lexicon_.fragment_phrases) {
            if (lowered.find(phrase) != std::string::npos) {
                return {true, 0.85, GateTag::Elliptical};
            }
        }
        if (static_cast<int>(tokens.size()) < lexicon_.short_query_token_threshold) {
            return {true, 0.7, GateTag::Elliptical};
        }
        if (!tokens.empty()) {
            for (const auto& verb : lexicon_.edit_verbs) {
                if (tokens.front() == verb) return {true, 0.65, GateTag::Elliptical};
            }
        }
        return {false, 0.6, GateTag::SelfContained};
    }

private:
    GateCueLexicon lexicon_;
};

/// Delegates the decision to a generative model (yes/no answer).
class ModelGate : public GateClassifier {
public:
    explicit ModelGate(GenerativeModelProvider& provider) : provider_(&provider) {}

    GateDecision classify(const std::string& query, const Context& context) override {
        if (context.empty()) {
            return {false, 1.0, GateTag::EmptyHistory};
        }
        std::string prompt =
            "Decide whether the user's question depends on the conversation so far "
            "(pronouns, ellipsis, references). Answer with exactly one word: yes or no.\n\n"
            "Conversation so far:\n";
        for (const auto& item : context.items) {
            prompt += "user: " + item.query + "\n";
            if (item.response) prompt += "assistant: " + *item.response + "\n";
        }
        prompt += "\nQuestion: " + query + "\nAnswer:";

        const std::string raw = text::to_lower(text::trim_copy(provider_->generate(prompt)));
        if (raw.rfind("yes", 0) == 0) return {true, 1.0, GateTag::ModelJudged};
        if (raw.rfind("no", 0) == 0) return {false, 1.0, GateTag::ModelJudged};
        throw ProviderError(ProviderErrorKind::Malformed,
                            "gate model answered neither yes nor no", raw);
    }

private:
    GenerativeModelProvider* provider_;
};

/// Gate entry point. The empty-history rule is enforced here, centrally, so
/// it holds no matter how a classifier is implemented.
inline GateDecision classify_needs_rewrite(const std::string& query, const Context& context,
                                           GateClassifier& classifier) {
    if (context.empty()) {
        return {false, 1.0, GateTag::EmptyHistory};
    }
    return classifier.classify(query, context);
}

}  // namespace qrew
