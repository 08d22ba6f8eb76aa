#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qrew/dataset.hpp"
#include "qrew/engine.hpp"
#include "qrew/metrics.hpp"

namespace qrew {

/// A named rewrite configuration under evaluation, e.g. "query_fusion".
struct Approach {
    std::string approach_id;
    RewriteConfig config;
};

struct ApproachAggregate {
    std::string approach_id;
    int n = 0;
    double mean_cosine = 0.0;
    double mean_bert_f1 = 0.0;
    // Subset of questions at turn index > 1, i.e. those with chat history.
    int n_with_history = 0;
    double mean_cosine_with_history = 0.0;
    double mean_bert_f1_with_history = 0.0;
};

struct GainEntry {
    std::string metric;  // "cosine" or "bert_f1"
    std::string approach_a;
    std::string approach_b;  // baseline
    // Gain of the aggregate means. The published numbers could also be read
    // as the mean of per-question gains, so both are reported.
    double gain_pct = 0.0;
    std::optional<double> mean_per_question_gain_pct;
};

struct EvalFailure {
    std::string conversation_id;
    std::string approach_id;
    std::string message;
};

struct EvalReport {
    std::string dataset_id;
    std::vector<ApproachAggregate> aggregates;
    std::vector<GainEntry> gains;
    std::vector<QuestionScore> scores;
    std::vector<EvalFailure> failures;
    nlohmann::json metadata;  // config snapshot, provider descriptors, timestamp
};

namespace eval_detail {

inline std::vector<ApproachAggregate> aggregate(const std::vector<QuestionScore>& scores,
                                                std::vector<std::string> order = {}) {
    std::map<std::string, std::vector<const QuestionScore*>> by_approach;
    for (const auto& id : order) by_approach[id];  // approaches report n=0 even unscored
    for (const auto& s : scores) {
        if (by_approach.find(s.approach_id) == by_approach.end()) order.push_back(s.approach_id);
        by_approach[s.approach_id].push_back(&s);
    }
    std::vector<ApproachAggregate> out;
    for (const auto& id : order) {
        ApproachAggregate agg;
        agg.approach_id = id;
        double cos = 0.0, f1 = 0.0, cos_h = 0.0, f1_h = 0.0;
        for (const QuestionScore* s : by_approach[id]) {
            ++agg.n;
            cos += s->cosine;
            f1 += s->bert_f1;
            if (s->turn_index > 1) {
                ++agg.n_with_history;
                cos_h += s->cosine;
                f1_h += s->bert_f1;
            }
        }
        if (agg.n > 0) {
            agg.mean_cosine = cos / agg.n;
            agg.mean_bert_f1 = f1 / agg.n;
        }
        if (agg.n_with_history > 0) {
            agg.mean_cosine_with_history = cos_h / agg.n_with_history;
            agg.mean_bert_f1_with_history = f1_h / agg.n_with_history;
        }
        out.push_back(agg);
    }
    return out;
}

/// Mean of per-question gains over questions both approaches scored (with a
/// positive baseline); nullopt when no question qualifies.
inline std::optional<double> mean_per_question_gain(const std::vector<QuestionScore>& scores,
                                                    const std::string& metric,
                                                    const std::string& approach_a,
                                                    const std::string& approach_b) {
    std::map<std::string, double> baseline;
    auto value_of = [&](const QuestionScore& s) {
        return metric == "cosine" ? s.cosine : s.bert_f1;
    };
    for (const auto& s : scores) {
        if (s.approach_id == approach_b) baseline[s.question_id] = value_of(s);
    }
    double total = 0.0;
    int n = 0;
    for (const auto& s : scores) {
        if (s.approach_id != approach_a) continue;
        auto it = baseline.find(s.question_id);
        if (it == baseline.end() || it->second <= 0.0) continue;
        total += relative_gain(value_of(s), it->second);
        ++n;
    }
    if (n == 0) return std::nullopt;
    return total / n;
}

inline std::vector<GainEntry> pairwise_gains(const std::vector<ApproachAggregate>& aggregates,
                                             const std::vector<QuestionScore>& scores) {
    std::vector<GainEntry> gains;
    for (const auto& a : aggregates) {
        for (const auto& b : aggregates) {
            if (a.approach_id == b.approach_id || a.n == 0 || b.n == 0) continue;
            for (const char* metric : {"cosine", "bert_f1"}) {
                const double mean_a =
                    std::string(metric) == "cosine" ? a.mean_cosine : a.mean_bert_f1;
                const double mean_b =
                    std::string(metric) == "cosine" ? b.mean_cosine : b.mean_bert_f1;
                if (mean_b <= 0.0) continue;
                GainEntry entry;
                entry.metric = metric;
                entry.approach_a = a.approach_id;
                entry.approach_b = b.approach_id;
                entry.gain_pct = relative_gain(mean_a, mean_b);
                entry.mean_per_question_gain_pct =
                    mean_per_question_gain(scores, metric, a.approach_id, b.approach_id);
                gains.push_back(std::move(entry));
            }
        }
    }
    return gains;
}

struct ConversationResult {
    std::vector<QuestionScore> scores;
    std::vector<EvalFailure> failures;
};

inline ConversationResult replay_conversation(const AnnotatedConversation& conv,
                                              const std::vector<Approach>& approaches,
                                              const RewriteEngine& engine,
                                              GenerativeModelProvider& model,
                                              EmbeddingProvider& embedder,
                                              GateClassifier* gate) {
    ConversationResult result;
    for (const Approach& approach : approaches) {
        const bool fusion =
            approach.config.history_source == HistorySource::RewrittenQueries;
        ConversationSession session;
        session.session_id = conv.conversation_id + ":" + approach.approach_id;
        for (const AnnotatedQuestion& q : conv.questions) {
            RewriteOutcome outcome;
            try {
                if (fusion) {
                    auto [next, out] = engine.advance_fusion(session, q.user_query, q.response,
                                                             approach.config, model, gate);
                    session = std::move(next);
                    outcome = std::move(out);
                } else {
                    outcome = engine.rewrite(session, q.user_query, approach.config, model, gate);
                    Turn turn;
                    turn.index = static_cast<int>(session.turns.size()) + 1;
                    turn.user_query = q.user_query;
                    turn.response = q.response;  // dataset responses stand in for O_i
                    turn.rewritten_query = outcome.rewritten_query;
                    session = session_append(session, std::move(turn));
                }
            } catch (const ProviderError& e) {
                result.failures.push_back({conv.conversation_id, approach.approach_id, e.what()});
                break;  // abort this conversation for this approach
            }
            if (q.gold_rewrite) {
                QuestionScore score = score_question(*q.gold_rewrite, outcome.rewritten_query,
                                                     embedder);
                score.question_id = q.question_id;
                score.approach_id = approach.approach_id;
                score.turn_index = q.turn_index;
                result.scores.push_back(std::move(score));
            }
        }
    }
    return result;
}

}  // namespace eval_detail

struct EvalOptions {
    int jobs = 1;  // conversations scored in parallel; assembly stays deterministic
};

/// Replay every conversation under every approach and score each question
/// that carries a gold rewrite. Fusion approaches chain on their own
/// rewrites; window approaches see raw questions plus dataset responses.
/// A provider failure aborts that conversation for that approach and is
/// recorded in the report.
inline EvalReport run_eval(const Dataset& dataset, const std::vector<Approach>& approaches,
                           GenerativeModelProvider& model, EmbeddingProvider& embedder,
                           GateClassifier* gate = nullptr, const EvalOptions& options = {},
                           const RewriteEngine& engine = RewriteEngine()) {
    validate_dataset(dataset);
    for (const Approach& a : approaches) a.config.validate();

    const std::size_t n = dataset.conversations.size();
    std::vector<eval_detail::ConversationResult> results(n);

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            results[i] = eval_detail::replay_conversation(dataset.conversations[i], approaches,
                                                          engine, model, embedder, gate);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                results[i] = eval_detail::replay_conversation(dataset.conversations[i], approaches,
                                                              engine, model, embedder, gate);
            }
        };
        std::vector<std::thread> pool;
        const int workers = std::min<int>(jobs, static_cast<int>(n));
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EvalReport report;
    report.dataset_id = dataset.dataset_id;
    for (auto& r : results) {
        for (auto& s : r.scores) report.scores.push_back(std::move(s));
        for (auto& f : r.failures) report.failures.push_back(std::move(f));
    }
    std::vector<std::string> approach_order;
    for (const Approach& a : approaches) approach_order.push_back(a.approach_id);
    report.aggregates = eval_detail::aggregate(report.scores, std::move(approach_order));
    report.gains = eval_detail::pairwise_gains(report.aggregates, report.scores);

    nlohmann::json approach_configs = nlohmann::json::object();
    for (const Approach& a : approaches) approach_configs[a.approach_id] = to_json(a.config);
    report.metadata = {
        {"generated_at",
         std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
             .count()},
        {"task_type", to_string(dataset.task_type)},
        {"approaches", std::move(approach_configs)},
        {"model",
         {{"provider_id", model.descriptor().provider_id},
          {"model_name", model.descriptor().model_name},
          {"deterministic", model.descriptor().deterministic}}},
        {"embedder",
         {{"provider_id", embedder.descriptor().provider_id},
          {"dimension", embedder.descriptor().dimension}}},
    };
    return report;
}

/// Aggregation-only entry point over precomputed per-question scores
/// (question_id, approach_id, cosine, bert_f1).
inline EvalReport aggregate_fixture(const std::string& dataset_id,
                                    std::vector<QuestionScore> scores) {
    EvalReport report;
    report.dataset_id = dataset_id;
    report.scores = std::move(scores);
    report.aggregates = eval_detail::aggregate(report.scores);
    report.gains = eval_detail::pairwise_gains(report.aggregates, report.scores);
    report.metadata = {{"mode", "score_fixture"}};
    return report;
}

/// Score-fixture file: a JSON array of {question_id, approach_id, cosine,
/// bert_f1} records.
inline std::vector<QuestionScore> load_score_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open score fixture: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
        throw ParseError("score fixture must be a JSON array: " + path.string());
    }
    std::vector<QuestionScore> scores;
    for (const auto& e : j) {
        QuestionScore s;
        s.question_id = e.at("question_id").get<std::string>();
        s.approach_id = e.at("approach_id").get<std::string>();
        s.cosine = e.at("cosine").get<double>();
        s.bert_f1 = e.at("bert_f1").get<double>();
        scores.push_back(std::move(s));
    }
    return scores;
}

}  // namespace qrew
