#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrew/errors.hpp"
#include "qrew/text.hpp"

namespace qrew {

enum class TaskType { TextQA, TextToVis };

inline const char* to_string(TaskType t) {
    return t == TaskType::TextQA ? "text_qa" : "text_to_vis";
}

inline TaskType task_type_from_string(std::string_view s) {
    if (s == "text_qa") return TaskType::TextQA;
    if (s == "text_to_vis") return TaskType::TextToVis;
    throw ParseError("unknown task_type: " + std::string(s));
}

/// One gold-labeled question. An absent gold_rewrite encodes the annotators'
/// "no rewrite needed" marking.
struct AnnotatedQuestion {
    std::string question_id;  // derived: <conversation_id>#<turn_index>
    int turn_index = 0;
    std::string user_query;
    std::optional<std::string> response;
    std::optional<std::string> gold_rewrite;
    std::optional<std::string> intent;
    std::optional<std::string> topic_id;

    bool operator==(const AnnotatedQuestion&) const = default;
};

struct AnnotatedConversation {
    std::string conversation_id;
    std::vector<AnnotatedQuestion> questions;

    bool operator==(const AnnotatedConversation&) const = default;
};

/// Stats a corpus manifest may declare; present fields are enforced by the
/// validator. Chat length is checked as a range that must contain the
/// observed lengths, the counts are checked exactly.
struct DeclaredStats {
    std::optional<int> n_questions;
    std::optional<int> n_with_history;
    std::optional<int> chat_length_min;
    std::optional<int> chat_length_max;
    std::optional<int> n_question_types;

    bool operator==(const DeclaredStats&) const = default;
};

struct Dataset {
    std::string dataset_id;
    TaskType task_type = TaskType::TextQA;
    std::vector<AnnotatedConversation> conversations;
    std::optional<DeclaredStats> declared_stats;

    bool operator==(const Dataset&) const = default;
};

struct DatasetStats {
    int n_questions = 0;
    int n_with_history = 0;  // questions at turn index > 1
    int chat_length_min = 0;
    int chat_length_max = 0;
    int n_distinct_intents = 0;

    bool operator==(const DatasetStats&) const = default;
};

inline DatasetStats compute_stats(const Dataset& dataset) {
    DatasetStats stats;
    bool first = true;
    std::set<std::string> intents;
    for (const auto& conv : dataset.conversations) {
        const int len = static_cast<int>(conv.questions.size());
        if (first) {
            stats.chat_length_min = stats.chat_length_max = len;
            first = false;
        } else {
            stats.chat_length_min = std::min(stats.chat_length_min, len);
            stats.chat_length_max = std::max(stats.chat_length_max, len);
        }
        for (const auto& q : conv.questions) {
            ++stats.n_questions;
            if (q.turn_index > 1) ++stats.n_with_history;
            if (q.intent) intents.insert(*q.intent);
        }
    }
    stats.n_distinct_intents = static_cast<int>(intents.size());
    return stats;
}

/// Every schema invariant violation with its location, empty when valid.
inline std::vector<std::string> collect_validation_issues(const Dataset& dataset) {
    std::vector<std::string> issues;
    std::set<std::string> seen_ids;
    for (const auto& conv : dataset.conversations) {
        const std::string where = "conversation '" + conv.conversation_id + "'";
        if (!seen_ids.insert(conv.conversation_id).second) {
            issues.push_back(where + ": duplicate conversation_id");
        }
        if (conv.questions.empty()) {
            issues.push_back(where + ": has no questions");
        }
        int expected = 1;
        for (const auto& q : conv.questions) {
            const std::string loc = where + " turn " + std::to_string(q.turn_index);
            if (q.turn_index != expected) {
                issues.push_back(where + ": turn index " + std::to_string(q.turn_index) +
                                 " breaks the consecutive sequence (expected " +
                                 std::to_string(expected) + ")");
                expected = q.turn_index;  // resync so one gap reports once
            }
            ++expected;
            if (text::is_blank(q.user_query)) {
                issues.push_back(loc + ": user_query is blank");
            }
            if (q.gold_rewrite && text::is_blank(*q.gold_rewrite)) {
                issues.push_back(loc + ": gold_rewrite present but blank");
            }
        }
    }
    if (dataset.declared_stats) {
        const DeclaredStats& d = *dataset.declared_stats;
        const DatasetStats s = compute_stats(dataset);
        auto check_exact = [&](const std::optional<int>& declared, int actual, const char* name) {
            if (declared && *declared != actual) {
                issues.push_back(std::string("declared ") + name + " is " +
                                 std::to_string(*declared) + " but dataset has " +
                                 std::to_string(actual));
            }
        };
        check_exact(d.n_questions, s.n_questions, "n_questions");
        check_exact(d.n_with_history, s.n_with_history, "n_with_history");
        check_exact(d.n_question_types, s.n_distinct_intents, "n_question_types");
        if (!dataset.conversations.empty()) {
            if (d.chat_length_min && s.chat_length_min < *d.chat_length_min) {
                issues.push_back("observed chat length " + std::to_string(s.chat_length_min) +
                                 " below declared minimum " + std::to_string(*d.chat_length_min));
            }
            if (d.chat_length_max && s.chat_length_max > *d.chat_length_max) {
                issues.push_back("observed chat length " + std::to_string(s.chat_length_max) +
                                 " above declared maximum " + std::to_string(*d.chat_length_max));
            }
        }
    }
    return issues;
}

/// Throws one SchemaError listing every violation.
inline void validate_dataset(const Dataset& dataset) {
    auto issues = collect_validation_issues(dataset);
    if (!issues.empty()) {
        throw SchemaError(std::move(issues));
    }
}

// --- on-disk format ---------------------------------------------------------
// Line-delimited records, one conversation per line, UTF-8. Absent optionals
// omitted. A sibling manifest may declare Table-style stats for validation.

inline nlohmann::json to_json(const AnnotatedQuestion& q) {
    nlohmann::json j{{"turn_index", q.turn_index}, {"user_query", q.user_query}};
    if (q.response) j["response"] = *q.response;
    if (q.gold_rewrite) j["gold_rewrite"] = *q.gold_rewrite;
    if (q.intent) j["intent"] = *q.intent;
    if (q.topic_id) j["topic_id"] = *q.topic_id;
    return j;
}

inline nlohmann::json conversation_line(const AnnotatedConversation& conv, TaskType task) {
    nlohmann::json questions = nlohmann::json::array();
    for (const auto& q : conv.questions) questions.push_back(to_json(q));
    return nlohmann::json{{"conversation_id", conv.conversation_id},
                          {"task_type", to_string(task)},
                          {"questions", std::move(questions)}};
}

inline void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset file: " + path.string());
    for (const auto& conv : dataset.conversations) {
        out << conversation_line(conv, dataset.task_type).dump() << '\n';
    }
}

struct DatasetManifest {
    std::string dataset_id;
    TaskType task_type = TaskType::TextQA;
    DeclaredStats declared_stats;
};

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("manifest is not valid JSON: " + path.string());
    DatasetManifest m;
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.task_type = task_type_from_string(j.at("task_type").get<std::string>());
    if (j.contains("declared_stats")) {
        const auto& d = j.at("declared_stats");
        auto opt_int = [&](const char* key) -> std::optional<int> {
            if (d.contains(key)) return d.at(key).get<int>();
            return std::nullopt;
        };
        m.declared_stats.n_questions = opt_int("n_questions");
        m.declared_stats.n_with_history = opt_int("n_with_history");
        m.declared_stats.chat_length_min = opt_int("chat_length_min");
        m.declared_stats.chat_length_max = opt_int("chat_length_max");
        m.declared_stats.n_question_types = opt_int("n_question_types");
    }
    return m;
}

inline nlohmann::json to_json(const DatasetManifest& m) {
    nlohmann::json d = nlohmann::json::object();
    const DeclaredStats& s = m.declared_stats;
    if (s.n_questions) d["n_questions"] = *s.n_questions;
    if (s.n_with_history) d["n_with_history"] = *s.n_with_history;
    if (s.chat_length_min) d["chat_length_min"] = *s.chat_length_min;
    if (s.chat_length_max) d["chat_length_max"] = *s.chat_length_max;
    if (s.n_question_types) d["n_question_types"] = *s.n_question_types;
    return nlohmann::json{{"dataset_id", m.dataset_id},
                          {"task_type", to_string(m.task_type)},
                          {"declared_stats", std::move(d)}};
}

/// Load and fully validate a line-delimited dataset. Parse and schema
/// problems across all lines are collected and reported together.
inline Dataset load_dataset(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& manifest_path =
                                std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file: " + path.string());

    Dataset dataset;
    dataset.dataset_id = path.stem().string();

    if (manifest_path) {
        const DatasetManifest m = load_manifest(*manifest_path);
        dataset.dataset_id = m.dataset_id;
        dataset.task_type = m.task_type;
        dataset.declared_stats = m.declared_stats;
    }

    std::vector<std::string> issues;
    std::optional<TaskType> seen_task;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        const std::string where = "line " + std::to_string(line_no);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            issues.push_back(where + ": not valid JSON");
            continue;
        }
        try {
            AnnotatedConversation conv;
            conv.conversation_id = j.at("conversation_id").get<std::string>();
            const TaskType task = task_type_from_string(j.at("task_type").get<std::string>());
            if (!seen_task) {
                seen_task = task;
            } else if (*seen_task != task) {
                issues.push_back(where + ": mixed task_type within one dataset");
            }
            for (const auto& qj : j.at("questions")) {
                AnnotatedQuestion q;
                q.turn_index = qj.at("turn_index").get<int>();
                q.user_query = qj.at("user_query").get<std::string>();
                if (qj.contains("response")) q.response = qj.at("response").get<std::string>();
                if (qj.contains("gold_rewrite"))
                    q.gold_rewrite = qj.at("gold_rewrite").get<std::string>();
                if (qj.contains("intent")) q.intent = qj.at("intent").get<std::string>();
                if (qj.contains("topic_id")) q.topic_id = qj.at("topic_id").get<std::string>();
                q.question_id = conv.conversation_id + "#" + std::to_string(q.turn_index);
                conv.questions.push_back(std::move(q));
            }
            dataset.conversations.push_back(std::move(conv));
        } catch (const nlohmann::json::exception& e) {
            issues.push_back(where + ": " + e.what());
        } catch (const ParseError& e) {
            issues.push_back(where + ": " + e.what());
        }
    }
    if (seen_task) {
        if (!manifest_path) {
            dataset.task_type = *seen_task;
        } else if (dataset.task_type != *seen_task) {
            issues.push_back(std::string("manifest declares task_type ") +
                             to_string(dataset.task_type) + " but records carry " +
                             to_string(*seen_task));
        }
    }
    // Parse problems and schema violations are reported together.
    for (auto& issue : collect_validation_issues(dataset)) {
        issues.push_back(std::move(issue));
    }
    if (!issues.empty()) {
        throw SchemaError(std::move(issues));
    }
    return dataset;
}

}  // namespace qrew
