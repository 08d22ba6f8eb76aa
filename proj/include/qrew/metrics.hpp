#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qrew/errors.hpp"
#include "qrew/providers.hpp"
#include "qrew/text.hpp"

namespace qrew {

/// Cosine similarity of two same-dimension vectors, clamped to [-1, 1].
/// A zero vector on either side yields 0 (degenerate, by convention).
inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatchError("cosine over dimensions " + std::to_string(a.size()) +
                                     " and " + std::to_string(b.size()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

struct BertScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // empty candidate or reference
};

/// Greedy soft-token-matching F1 over token embeddings: precision is the
/// mean, over candidate tokens, of the best cosine against any reference
/// token; recall swaps the roles; f1 is their harmonic mean. No idf
/// weighting, no baseline rescaling.
inline BertScore bert_f1(const std::string& candidate, const std::string& reference,
                         EmbeddingProvider& embedder) {
    const TokenEmbeddings cand = embedder.embed_tokens(candidate);
    const TokenEmbeddings ref = embedder.embed_tokens(reference);
    if (cand.tokens.empty() || ref.tokens.empty()) {
        return {0.0, 0.0, 0.0, true};
    }

    auto mean_best = [](const std::vector<std::vector<double>>& from,
                        const std::vector<std::vector<double>>& against) {
        double total = 0.0;
        for (const auto& v : from) {
            double best = -1.0;
            for (const auto& w : against) {
                best = std::max(best, cosine_similarity(v, w));
            }
            total += best;
        }
        return total / static_cast<double>(from.size());
    };

    BertScore score;
    score.precision = mean_best(cand.vectors, ref.vectors);
    score.recall = mean_best(ref.vectors, cand.vectors);
    const double denom = score.precision + score.recall;
    score.f1 = denom > 0.0 ? 2.0 * score.precision * score.recall / denom : 0.0;
    return score;
}

/// Everything one scored question carries into the report.
struct QuestionScore {
    std::string question_id;
    std::string approach_id;
    std::string predicted_rewrite;
    std::string gold_rewrite;
    int turn_index = 0;  // 1-based; > 1 means the question had chat history
    double cosine = 0.0;
    double bert_precision = 0.0;
    double bert_recall = 0.0;
    double bert_f1 = 0.0;
    bool degenerate = false;
};

/// Sentence cosine plus token-level BERT scores, both from one embedder so
/// the numbers are comparable across approaches.
inline QuestionScore score_question(const std::string& gold, const std::string& predicted,
                                    EmbeddingProvider& embedder) {
    if (text::is_blank(gold)) {
        throw EmptyQueryError("gold rewrite must be non-empty");
    }
    QuestionScore s;
    s.gold_rewrite = gold;
    s.predicted_rewrite = predicted;
    if (text::is_blank(predicted)) {
        s.degenerate = true;
        return s;
    }
    const auto gold_vec = embedder.embed(gold);
    const auto pred_vec = embedder.embed(predicted);
    const bool zero_gold = std::all_of(gold_vec.begin(), gold_vec.end(),
                                       [](double x) { return x == 0.0; });
    const bool zero_pred = std::all_of(pred_vec.begin(), pred_vec.end(),
                                       [](double x) { return x == 0.0; });
    s.cosine = cosine_similarity(gold_vec, pred_vec);

    const BertScore bert = bert_f1(predicted, gold, embedder);
    s.bert_precision = bert.precision;
    s.bert_recall = bert.recall;
    s.bert_f1 = bert.f1;
    s.degenerate = bert.degenerate || zero_gold || zero_pred;
    return s;
}

/// 100 * (a - b) / b, the percentage by which `a` beats baseline `b`.
inline double relative_gain(double a, double b) {
    if (b <= 0.0) {
        throw NonPositiveBaselineError("relative gain needs a positive baseline, got " +
                                       std::to_string(b));
    }
    return 100.0 * (a - b) / b;
}

}  // namespace qrew
