#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qrew/dataset.hpp"
#include "qrew/rules.hpp"

namespace qrew {

/// Reproducible desk-scale corpus generation. Same seed, same bytes.
struct SyntheticProfile {
    TaskType task_type = TaskType::TextToVis;
    int n_conversations = 5;
    int min_turns = 2;
    int max_turns = 5;
    std::uint64_t seed = 0;
    rules::RuleLexicon lexicon;  // edit vocabulary for text-to-vis
};

namespace synth_detail {

// rng() % n is deterministic across standard libraries, unlike the
// distribution classes.
inline std::size_t pick_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& items) {
    return items[pick_index(rng, items.size())];
}

/// Pick an entry different from `current`; falls back to any entry when the
/// pool has only one.
inline const std::string& pick_other(std::mt19937_64& rng, const std::vector<std::string>& items,
                                     const std::string& current) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const std::string& candidate = pick(rng, items);
        if (candidate != current) return candidate;
    }
    return pick(rng, items);
}

inline std::string format_with(std::string tmpl, std::string_view placeholder,
                               std::string_view value) {
    if (auto pos = tmpl.find(placeholder); pos != std::string::npos) {
        tmpl.replace(pos, placeholder.size(), value);
    }
    return tmpl;
}

inline AnnotatedConversation generate_vis_conversation(std::mt19937_64& rng,
                                                       const std::string& conversation_id,
                                                       int turns,
                                                       const rules::RuleLexicon& lex) {
    rules::QuestionForm form;
    form.verb = "compare";
    if (rng() % 2 == 0) form.time_spec = pick(rng, lex.granularities);
    form.metrics = {pick(rng, lex.metrics)};
    form.dimension = pick(rng, lex.dimensions);
    if (rng() % 5 < 2) form.chart = pick(rng, lex.chart_words);

    AnnotatedConversation conv;
    conv.conversation_id = conversation_id;

    std::string gold = rules::render_question(form);
    AnnotatedQuestion first;
    first.turn_index = 1;
    first.user_query = gold;
    first.gold_rewrite = gold;
    first.intent = "new_question";
    first.question_id = conversation_id + "#1";
    conv.questions.push_back(first);

    for (int t = 2; t <= turns; ++t) {
        const auto current = rules::parse_question(gold, lex);
        const rules::QuestionForm& state = current ? *current : form;

        std::string utterance;
        std::string intent;
        const int op = static_cast<int>(rng() % 7);
        switch (op) {
            case 0: {  // replace granularity
                const std::string& g = pick_other(rng, lex.granularities, state.time_spec);
                const char* variants[] = {"{v}", "what about {v}", "now {v}"};
                utterance = format_with(variants[rng() % 3], "{v}", g);
                intent = "replace_granularity";
                break;
            }
            case 1: {  // set chart type
                const std::string& c = pick_other(rng, lex.chart_words, state.chart);
                const char* variants[] = {"show it as a {v} chart", "as {v}", "what about {v}"};
                utterance = format_with(variants[rng() % 3], "{v}", c);
                intent = "set_chart_type";
                break;
            }
            case 2: {  // replace dimension
                const std::string& d = pick_other(rng, lex.dimensions, state.dimension);
                const char* variants[] = {"now change to {v}", "change to {v}", "switch to {v}"};
                utterance = format_with(variants[rng() % 3], "{v}", d);
                intent = "replace_dimension";
                break;
            }
            case 3: {  // replace metric
                const std::string& m = pick_other(rng, lex.metrics, state.metrics.front());
                const char* variants[] = {"replace with {v}", "switch to {v}"};
                utterance = format_with(variants[rng() % 2], "{v}", m);
                intent = "replace_metric";
                break;
            }
            case 4: {  // add metric
                std::string m = pick_other(rng, lex.metrics, state.metrics.front());
                for (int attempt = 0; attempt < 8; ++attempt) {
                    bool used = false;
                    for (const auto& existing : state.metrics) {
                        if (existing == m) used = true;
                    }
                    if (!used) break;
                    m = pick(rng, lex.metrics);
                }
                const char* variants[] = {"add {v}", "also add {v}", "include {v}"};
                utterance = format_with(variants[rng() % 3], "{v}", m);
                intent = "add_metric";
                break;
            }
            case 5: {  // set top-k
                const int k = 2 + static_cast<int>(rng() % 9);
                const char* variants[] = {"show top-{v}", "what about top-{v}", "top-{v}"};
                utterance = format_with(variants[rng() % 3], "{v}", std::to_string(k));
                intent = "set_topk";
                break;
            }
            default: {  // set time filter
                const std::string& tf = pick_other(rng, lex.time_filters, state.time_spec);
                const char* variants[] = {"show only {v}", "only {v}", "{v}"};
                utterance = format_with(variants[rng() % 3], "{v}", tf);
                intent = "set_time_filter";
                break;
            }
        }

        gold = rules::rule_fuse(gold, utterance, lex);

        AnnotatedQuestion q;
        q.turn_index = t;
        q.user_query = utterance;
        q.gold_rewrite = gold;
        q.intent = intent;
        q.question_id = conversation_id + "#" + std::to_string(t);
        conv.questions.push_back(std::move(q));
    }
    return conv;
}

inline AnnotatedConversation generate_qa_conversation(std::mt19937_64& rng,
                                                      const std::string& conversation_id,
                                                      int turns) {
    static const std::vector<std::string> topics = {
        "streaming segmentation", "batch segmentation",   "audience activation",
        "identity resolution",    "journey orchestration", "data ingestion",
        "schema mapping",         "consent management",
    };
    static const std::vector<std::string> features = {
        "real-time updates",      "incremental exports", "multi-region deployments",
        "csv uploads",            "nested attributes",   "custom retention windows",
    };

    const std::string& topic = pick(rng, topics);
    const std::string& other = pick_other(rng, topics, topic);

    AnnotatedConversation conv;
    conv.conversation_id = conversation_id;

    AnnotatedQuestion first;
    first.turn_index = 1;
    first.user_query = "what is " + topic;
    first.response = "an overview of " + topic + " and when to use it";
    first.intent = "definition";  // first question needs no rewrite
    first.question_id = conversation_id + "#1";
    conv.questions.push_back(first);

    for (int t = 2; t <= turns; ++t) {
        AnnotatedQuestion q;
        q.turn_index = t;
        switch (rng() % 4) {
            case 0:
                q.user_query = "how does it differ from " + other;
                q.gold_rewrite = "how does " + topic + " differ from " + other;
                q.response = "the main differences between " + topic + " and " + other;
                q.intent = "comparison";
                break;
            case 1: {
                const std::string& f = pick(rng, features);
                q.user_query = "does it support " + f;
                q.gold_rewrite = "does " + topic + " support " + f;
                q.response = "support details for " + f;
                q.intent = "capability";
                break;
            }
            case 2:
                q.user_query = "what are its main limitations";
                q.gold_rewrite = "what are the main limitations of " + topic;
                q.response = "known limitations of " + topic;
                q.intent = "limitations";
                break;
            default:
                q.user_query = "how do i configure it";
                q.gold_rewrite = "how do i configure " + topic;
                q.response = "configuration steps for " + topic;
                q.intent = "configuration";
                break;
        }
        q.question_id = conversation_id + "#" + std::to_string(t);
        conv.questions.push_back(std::move(q));
    }
    return conv;
}

}  // namespace synth_detail

/// Build a corpus from the profile. Text-to-vis gold rewrites come from the
/// rule grammar applied to the conversation prefix, so a fusion replay with
/// the rule mock reproduces them exactly.
inline Dataset generate_synthetic(const SyntheticProfile& profile) {
    if (profile.n_conversations < 0 || profile.min_turns < 1 ||
        profile.max_turns < profile.min_turns) {
        throw ConfigError("invalid synthetic profile: need n_conversations >= 0 and "
                          "1 <= min_turns <= max_turns");
    }
    std::mt19937_64 rng(profile.seed);
    Dataset dataset;
    dataset.task_type = profile.task_type;
    dataset.dataset_id = std::string("synthetic-") + to_string(profile.task_type) + "-" +
                         std::to_string(profile.seed);
    for (int c = 1; c <= profile.n_conversations; ++c) {
        const int turns = profile.min_turns +
                          static_cast<int>(rng() % static_cast<std::uint64_t>(
                                               profile.max_turns - profile.min_turns + 1));
        const std::string id = "conv-" + std::to_string(c);
        if (profile.task_type == TaskType::TextToVis) {
            dataset.conversations.push_back(
                synth_detail::generate_vis_conversation(rng, id, turns, profile.lexicon));
        } else {
            dataset.conversations.push_back(synth_detail::generate_qa_conversation(rng, id, turns));
        }
    }
    return dataset;
}

}  // namespace qrew
