#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrew/text.hpp"

namespace qrew::rules {

/// Vocabulary for the analytics-question grammar. The defaults cover the
/// usual follow-up edits a data-analysis assistant sees: swapping a
/// granularity, chart type, dimension or metric, adding a metric, picking a
/// top-k, or narrowing the time range.
struct RuleLexicon {
    std::vector<std::string> question_verbs = {"compare", "show", "plot", "display", "list"};
    std::vector<std::string> granularities = {
        "month over month", "year over year", "week over week", "hourly",
        "daily",            "weekly",         "monthly",         "quarterly",
        "yearly",           "annually",
    };
    std::vector<std::string> time_filters = {
        "this month", "last month",   "this year",    "last year", "this week",
        "last week",  "this quarter", "last quarter", "today",     "yesterday",
    };
    std::vector<std::string> metrics = {
        "revenue", "pageviews",   "orders",   "sessions", "clicks",
        "profit",  "conversions", "visitors", "signups",
    };
    std::vector<std::string> chart_words = {"line", "bar", "pie", "area", "scatter", "table"};
    // Used by the synthetic generator when sampling base questions.
    std::vector<std::string> dimensions = {
        "country", "marketing channel", "product category", "region",
        "device type", "browser", "campaign",
    };
};

/// Canonical slots of a well-formed analytics question:
///   <verb> [time] <metric(s)> by [top-k] <dimension> [as <chart>]
struct QuestionForm {
    std::string verb;
    std::string time_spec;  // granularity or time filter; empty if none
    std::vector<std::string> metrics;
    std::optional<int> top_k;
    std::string dimension;  // stored singular; pluralized when top-k renders
    std::string chart;      // empty if none

    bool operator==(const QuestionForm&) const = default;
};

enum class EditOp {
    ReplaceGranularity,
    SetChartType,
    ReplaceDimension,
    ReplaceMetric,
    AddMetric,
    SetTopK,
    SetTimeFilter,
};

inline const char* to_string(EditOp op) {
    switch (op) {
        case EditOp::ReplaceGranularity: return "replace_granularity";
        case EditOp::SetChartType: return "set_chart_type";
        case EditOp::ReplaceDimension: return "replace_dimension";
        case EditOp::ReplaceMetric: return "replace_metric";
        case EditOp::AddMetric: return "add_metric";
        case EditOp::SetTopK: return "set_topk";
        case EditOp::SetTimeFilter: return "set_time_filter";
    }
    return "unknown";
}

struct Edit {
    EditOp op;
    std::string value;  // phrase for text edits
    int number = 0;     // for SetTopK
};

namespace detail {

inline bool contains(const std::vector<std::string>& list, std::string_view word) {
    for (const auto& w : list) {
        if (w == word) return true;
    }
    return false;
}

/// Longest phrase from `phrases` matching tokens starting at `pos`.
/// Returns the number of tokens consumed (0 = no match) and the phrase.
inline std::size_t match_phrase(const std::vector<std::string>& tokens, std::size_t pos,
                                const std::vector<std::string>& phrases, std::string* matched) {
    std::size_t best = 0;
    for (const auto& phrase : phrases) {
        const auto words = text::split_words(phrase);
        if (words.empty() || pos + words.size() > tokens.size()) continue;
        bool ok = true;
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (tokens[pos + i] != words[i]) {
                ok = false;
                break;
            }
        }
        if (ok && words.size() > best) {
            best = words.size();
            if (matched) *matched = phrase;
        }
    }
    return best;
}

/// "top-5" / "top5" / "top 5" starting at pos. Returns tokens consumed.
inline std::size_t match_topk(const std::vector<std::string>& tokens, std::size_t pos, int* k) {
    if (pos >= tokens.size()) return 0;
    const std::string& tok = tokens[pos];
    auto all_digits = [](std::string_view s) {
        if (s.empty()) return false;
        for (char c : s) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        }
        return true;
    };
    if (tok.rfind("top", 0) == 0 && tok.size() > 3) {
        std::string_view rest = std::string_view(tok).substr(3);
        if (!rest.empty() && rest.front() == '-') rest.remove_prefix(1);
        if (all_digits(rest)) {
            if (k) *k = std::stoi(std::string(rest));
            return 1;
        }
    }
    if (tok == "top" && pos + 1 < tokens.size() && all_digits(tokens[pos + 1])) {
        if (k) *k = std::stoi(tokens[pos + 1]);
        return 2;
    }
    return 0;
}

inline bool is_article(std::string_view tok) {
    return tok == "a" || tok == "an" || tok == "the";
}

inline std::vector<std::string> strip_articles(std::vector<std::string> tokens) {
    std::vector<std::string> out;
    for (auto& t : tokens) {
        if (!is_article(t)) out.push_back(std::move(t));
    }
    return out;
}

inline std::string pluralize(const std::string& phrase) {
    auto words = text::split_words(phrase);
    if (words.empty()) return phrase;
    std::string& last = words.back();
    auto is_vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    };
    if (last.size() >= 2 && last.back() == 'y' && !is_vowel(last[last.size() - 2])) {
        last.replace(last.size() - 1, 1, "ies");
    } else if (last.size() >= 2 &&
               (last.back() == 's' || last.back() == 'x' || last.back() == 'z' ||
                last.ends_with("ch") || last.ends_with("sh"))) {
        last += "es";
    } else {
        last += "s";
    }
    return text::join(words, " ");
}

inline std::string singularize(const std::string& phrase) {
    auto words = text::split_words(phrase);
    if (words.empty()) return phrase;
    std::string& last = words.back();
    if (last.size() > 3 && last.ends_with("ies")) {
        last.replace(last.size() - 3, 3, "y");
    } else if (last.size() > 2 &&
               (last.ends_with("ches") || last.ends_with("shes") || last.ends_with("xes") ||
                last.ends_with("zes"))) {
        last.erase(last.size() - 2);
    } else if (last.size() > 1 && last.back() == 's' && !last.ends_with("ss")) {
        last.pop_back();
    }
    return text::join(words, " ");
}

}  // namespace detail

/// Parse a complete analytics question into its slots. Returns nullopt for
/// anything that is not of the form <verb> [time] <metrics> by [top-k]
/// <dimension> [as <chart>].
inline std::optional<QuestionForm> parse_question(std::string_view question,
                                                  const RuleLexicon& lexicon = {}) {
    const auto tokens = text::split_words(text::to_lower(question));
    if (tokens.empty()) return std::nullopt;
    if (!detail::contains(lexicon.question_verbs, tokens[0])) return std::nullopt;

    QuestionForm form;
    form.verb = tokens[0];
    std::size_t pos = 1;

    std::string time_spec;
    std::size_t consumed = detail::match_phrase(tokens, pos, lexicon.granularities, &time_spec);
    if (consumed == 0) {
        consumed = detail::match_phrase(tokens, pos, lexicon.time_filters, &time_spec);
    }
    if (consumed > 0) {
        form.time_spec = time_spec;
        pos += consumed;
    }

    // Metric list runs up to "by"; phrases are separated by "and".
    std::vector<std::string> current;
    bool saw_by = false;
    while (pos < tokens.size()) {
        if (tokens[pos] == "by") {
            saw_by = true;
            ++pos;
            break;
        }
        if (tokens[pos] == "and") {
            if (current.empty()) return std::nullopt;
            form.metrics.push_back(text::join(current, " "));
            current.clear();
        } else {
            current.push_back(tokens[pos]);
        }
        ++pos;
    }
    if (!saw_by || current.empty()) return std::nullopt;
    form.metrics.push_back(text::join(current, " "));

    int k = 0;
    if (std::size_t n = detail::match_topk(tokens, pos, &k); n > 0) {
        form.top_k = k;
        pos += n;
    }

    std::vector<std::string> dim;
    while (pos < tokens.size() && tokens[pos] != "as") {
        dim.push_back(tokens[pos]);
        ++pos;
    }
    if (dim.empty()) return std::nullopt;
    std::string dimension = text::join(dim, " ");
    form.dimension = form.top_k ? detail::singularize(dimension) : dimension;

    if (pos < tokens.size() && tokens[pos] == "as") {
        auto chart = detail::strip_articles(
            std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                                     tokens.end()));
        if (chart.empty()) return std::nullopt;
        form.chart = text::join(chart, " ");
    }
    return form;
}

/// Inverse of parse_question for well-formed forms.
inline std::string render_question(const QuestionForm& form) {
    std::string out = form.verb;
    if (!form.time_spec.empty()) out += " " + form.time_spec;
    out += " " + text::join(form.metrics, " and ");
    out += " by ";
    if (form.top_k) {
        out += "top-" + std::to_string(*form.top_k) + " " + detail::pluralize(form.dimension);
    } else {
        out += form.dimension;
    }
    if (!form.chart.empty()) out += " as " + form.chart;
    return out;
}

/// Extract the edits a follow-up asks for. An empty result means the
/// follow-up did not match the edit grammar.
inline std::vector<Edit> parse_followup_edits(std::string_view followup,
                                              const RuleLexicon& lexicon = {}) {
    auto tokens = text::split_words(text::to_lower(followup));

    // Leading conversational cues carry no content.
    static const std::vector<std::string> lead_phrases = {"what about", "how about"};
    static const std::vector<std::string> lead_words = {"now",  "then", "ok",   "okay",
                                                        "please", "and",  "also", "just"};
    std::size_t pos = 0;
    for (;;) {
        if (std::size_t n = detail::match_phrase(tokens, pos, lead_phrases, nullptr); n > 0) {
            pos += n;
            continue;
        }
        if (pos < tokens.size() && detail::contains(lead_words, tokens[pos])) {
            ++pos;
            continue;
        }
        break;
    }

    static const std::vector<std::string> fillers = {"show", "display", "make", "it",
                                                     "me",   "only",    "a",    "an",
                                                     "the",  "now",     "please"};

    auto phrase_until_boundary = [&](std::size_t& i) {
        std::vector<std::string> words;
        while (i < tokens.size() && tokens[i] != "as" &&
               detail::match_topk(tokens, i, nullptr) == 0) {
            words.push_back(tokens[i]);
            ++i;
        }
        return text::join(words, " ");
    };

    std::vector<Edit> edits;
    std::size_t i = pos;
    while (i < tokens.size()) {
        int k = 0;
        std::string phrase;
        if (std::size_t n = detail::match_topk(tokens, i, &k); n > 0) {
            edits.push_back({EditOp::SetTopK, "", k});
            i += n;
        } else if (std::size_t n2 = detail::match_phrase(tokens, i, lexicon.granularities, &phrase);
                   n2 > 0) {
            edits.push_back({EditOp::ReplaceGranularity, phrase});
            i += n2;
        } else if (std::size_t n3 = detail::match_phrase(tokens, i, lexicon.time_filters, &phrase);
                   n3 > 0) {
            edits.push_back({EditOp::SetTimeFilter, phrase});
            i += n3;
        } else if (tokens[i] == "as") {
            auto chart = detail::strip_articles(std::vector<std::string>(
                tokens.begin() + static_cast<std::ptrdiff_t>(i) + 1, tokens.end()));
            if (!chart.empty()) {
                edits.push_back({EditOp::SetChartType, text::join(chart, " ")});
            }
            i = tokens.size();
        } else if (tokens[i] == "change" || tokens[i] == "switch") {
            ++i;
            if (i < tokens.size() && tokens[i] == "to") ++i;
            std::string value = phrase_until_boundary(i);
            if (!value.empty()) {
                const EditOp op = detail::contains(lexicon.metrics, value)
                                      ? EditOp::ReplaceMetric
                                      : EditOp::ReplaceDimension;
                edits.push_back({op, value});
            }
        } else if (tokens[i] == "replace" || tokens[i] == "swap") {
            ++i;
            if (i < tokens.size() && tokens[i] == "with") ++i;
            std::string value = phrase_until_boundary(i);
            if (!value.empty()) {
                const EditOp op = detail::contains(lexicon.granularities, value)
                                      ? EditOp::ReplaceGranularity
                                      : EditOp::ReplaceMetric;
                edits.push_back({op, value});
            }
        } else if (tokens[i] == "add" || tokens[i] == "include") {
            ++i;
            std::string value = phrase_until_boundary(i);
            // "add revenue and cost" adds each metric separately
            auto words = text::split_words(value);
            std::vector<std::string> current;
            for (std::size_t w = 0; w <= words.size(); ++w) {
                if (w == words.size() || words[w] == "and") {
                    if (!current.empty()) {
                        edits.push_back({EditOp::AddMetric, text::join(current, " ")});
                        current.clear();
                    }
                } else {
                    current.push_back(words[w]);
                }
            }
        } else if (detail::contains(lexicon.chart_words, tokens[i])) {
            std::string chart = tokens[i];
            ++i;
            if (i < tokens.size() && (tokens[i] == "chart" || tokens[i] == "graph")) {
                chart += " " + tokens[i];
                ++i;
            }
            edits.push_back({EditOp::SetChartType, chart});
        } else if (detail::contains(fillers, tokens[i])) {
            ++i;
        } else {
            ++i;  // unrecognized token, no edit
        }
    }
    return edits;
}

inline QuestionForm apply_edit(QuestionForm form, const Edit& edit) {
    switch (edit.op) {
        case EditOp::ReplaceGranularity:
        case EditOp::SetTimeFilter:
            form.time_spec = edit.value;
            break;
        case EditOp::SetChartType:
            form.chart = edit.value;
            break;
        case EditOp::ReplaceDimension:
            form.dimension = detail::singularize(edit.value);
            break;
        case EditOp::ReplaceMetric:
            form.metrics = {edit.value};
            break;
        case EditOp::AddMetric:
            if (!detail::contains(form.metrics, edit.value)) {
                form.metrics.push_back(edit.value);
            }
            break;
        case EditOp::SetTopK:
            form.top_k = edit.number;
            break;
    }
    return form;
}

/// Fuse a follow-up into the previous question.
///
/// A follow-up that is itself a complete question starts over (topic switch).
/// An empty follow-up leaves the base untouched. A follow-up the grammar
/// does not recognize, or a base that is not a well-formed question, echoes
/// the follow-up unchanged.
inline std::string rule_fuse(std::string_view base_question, std::string_view followup,
                             const RuleLexicon& lexicon = {}) {
    const std::string f = text::trim_copy(followup);
    if (f.empty()) return std::string(text::trim(base_question));
    if (parse_question(f, lexicon)) return text::to_lower(f);

    auto base = parse_question(base_question, lexicon);
    if (!base) return f;

    auto edits = parse_followup_edits(f, lexicon);
    if (edits.empty()) return f;

    QuestionForm form = *base;
    for (const Edit& e : edits) form = apply_edit(form, e);
    return render_question(form);
}

}  // namespace qrew::rules
