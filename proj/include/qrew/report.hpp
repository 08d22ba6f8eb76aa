#pragma once

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qrew/eval.hpp"

namespace qrew {

namespace report_detail {

inline std::string fixed3(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << v;
    return ss.str();
}

inline std::string fixed1(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1) << v;
    return ss.str();
}

}  // namespace report_detail

/// Human-readable comparison table, one block per (task, report) pair:
/// Task | Approach | Cosine Similarity | BERT F1, values rounded to three
/// decimals at presentation only.
inline std::string render_comparison_table(
    const std::vector<std::pair<std::string, const EvalReport*>>& reports) {
    std::size_t task_width = std::string("Task").size();
    std::size_t approach_width = std::string("Approach").size();
    for (const auto& [task, report] : reports) {
        task_width = std::max(task_width, task.size());
        for (const auto& agg : report->aggregates) {
            approach_width = std::max(approach_width, agg.approach_id.size());
        }
    }

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(task_width) + 2) << "Task"
        << std::setw(static_cast<int>(approach_width) + 2) << "Approach"
        << std::setw(19) << "Cosine Similarity"
        << "BERT F1" << '\n';
    out << std::string(task_width + approach_width + 4 + 19 + 7, '-') << '\n';
    for (const auto& [task, report] : reports) {
        bool first = true;
        for (const auto& agg : report->aggregates) {
            out << std::left << std::setw(static_cast<int>(task_width) + 2)
                << (first ? task : std::string())
                << std::setw(static_cast<int>(approach_width) + 2) << agg.approach_id
                << std::setw(19) << report_detail::fixed3(agg.mean_cosine)
                << report_detail::fixed3(agg.mean_bert_f1) << '\n';
            first = false;
        }
    }

    bool any_gains = false;
    for (const auto& [task, report] : reports) {
        if (!report->gains.empty()) any_gains = true;
    }
    if (any_gains) {
        out << '\n' << "Relative gains:" << '\n';
        for (const auto& [task, report] : reports) {
            for (const auto& g : report->gains) {
                if (g.gain_pct <= 0.0) continue;  // one direction per pair is enough to read
                out << "  " << task << ": " << g.approach_a << " over " << g.approach_b << " ("
                    << g.metric << "): +" << report_detail::fixed1(g.gain_pct) << "%" << '\n';
            }
        }
    }
    return out.str();
}

inline nlohmann::json to_json(const QuestionScore& s) {
    return nlohmann::json{{"question_id", s.question_id},
                          {"approach_id", s.approach_id},
                          {"predicted_rewrite", s.predicted_rewrite},
                          {"gold_rewrite", s.gold_rewrite},
                          {"turn_index", s.turn_index},
                          {"cosine", s.cosine},
                          {"bert_precision", s.bert_precision},
                          {"bert_recall", s.bert_recall},
                          {"bert_f1", s.bert_f1},
                          {"degenerate", s.degenerate}};
}

/// Machine-readable report: aggregates, pairwise gains, every per-question
/// score, recorded failures, and run metadata.
inline nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json aggregates = nlohmann::json::array();
    for (const auto& a : report.aggregates) {
        aggregates.push_back({{"approach_id", a.approach_id},
                              {"n", a.n},
                              {"mean_cosine", a.mean_cosine},
                              {"mean_bert_f1", a.mean_bert_f1},
                              {"n_with_history", a.n_with_history},
                              {"mean_cosine_with_history", a.mean_cosine_with_history},
                              {"mean_bert_f1_with_history", a.mean_bert_f1_with_history}});
    }
    nlohmann::json gains = nlohmann::json::array();
    for (const auto& g : report.gains) {
        nlohmann::json entry{{"metric", g.metric},
                             {"approach", g.approach_a},
                             {"baseline", g.approach_b},
                             {"gain_pct", g.gain_pct}};
        if (g.mean_per_question_gain_pct) {
            entry["mean_per_question_gain_pct"] = *g.mean_per_question_gain_pct;
        }
        gains.push_back(std::move(entry));
    }
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& s : report.scores) scores.push_back(to_json(s));
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"conversation_id", f.conversation_id},
                            {"approach_id", f.approach_id},
                            {"message", f.message}});
    }
    return nlohmann::json{{"dataset_id", report.dataset_id},
                          {"aggregates", std::move(aggregates)},
                          {"relative_gains", std::move(gains)},
                          {"scores", std::move(scores)},
                          {"failures", std::move(failures)},
                          {"metadata", report.metadata}};
}

}  // namespace qrew
