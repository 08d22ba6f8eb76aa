#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrew/errors.hpp"
#include "qrew/text.hpp"

namespace qrew {

/// One user interaction: the question as typed, the assistant's answer (if
/// any), and the rewritten query once the engine has produced one.
struct Turn {
    int index = 0;  // 1-based position within the session
    std::string user_query;
    std::optional<std::string> response;
    std::optional<std::string> rewritten_query;

    bool operator==(const Turn&) const = default;
};

/// Which projection of the history feeds the context window.
enum class HistorySource {
    RawInputs,         // (user_query, response) pairs as typed
    RewrittenQueries,  // prior rewritten queries, responses dropped
};

/// Ordered turn history for one conversation. Immutable value: appending
/// produces a new session.
struct ConversationSession {
    std::string session_id;
    std::int64_t created_at_ms = 0;  // informational only, never used in windowing
    std::vector<Turn> turns;

    bool operator==(const ConversationSession&) const = default;

    static ConversationSession create(std::string id) {
        ConversationSession s;
        s.session_id = std::move(id);
        s.created_at_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
        return s;
    }
};

/// One projected history entry; `turn_index` records where it came from.
struct HistoryItem {
    int turn_index = 0;
    std::string query;
    std::optional<std::string> response;

    bool operator==(const HistoryItem&) const = default;
};

/// Append a turn, enforcing consecutive 1-based indices and a non-blank query.
inline ConversationSession session_append(const ConversationSession& session, Turn turn) {
    if (text::is_blank(turn.user_query)) {
        throw EmptyQueryError("turn " + std::to_string(turn.index) + ": user_query is blank");
    }
    const int expected = session.turns.empty() ? 1 : session.turns.back().index + 1;
    if (turn.index != expected) {
        throw IndexGapError("expected turn index " + std::to_string(expected) + ", got " +
                            std::to_string(turn.index));
    }
    ConversationSession out = session;
    out.turns.push_back(std::move(turn));
    return out;
}

/// Project the session onto the history the rewrite context draws from.
/// RawInputs keeps every turn; RewrittenQueries skips turns that have no
/// rewrite yet and never carries responses.
inline std::vector<HistoryItem> project_history(const ConversationSession& session,
                                                HistorySource source) {
    std::vector<HistoryItem> items;
    items.reserve(session.turns.size());
    for (const Turn& turn : session.turns) {
        if (source == HistorySource::RawInputs) {
            items.push_back({turn.index, turn.user_query, turn.response});
        } else if (turn.rewritten_query.has_value()) {
            items.push_back({turn.index, *turn.rewritten_query, std::nullopt});
        }
    }
    return items;
}

// --- serialization ---------------------------------------------------------
// One JSON document per session. Absent optionals are omitted, not null.

inline nlohmann::json to_json(const Turn& turn) {
    nlohmann::json j{{"index", turn.index}, {"user_query", turn.user_query}};
    if (turn.response) j["response"] = *turn.response;
    if (turn.rewritten_query) j["rewritten_query"] = *turn.rewritten_query;
    return j;
}

inline nlohmann::json to_json(const ConversationSession& session) {
    nlohmann::json turns = nlohmann::json::array();
    for (const Turn& t : session.turns) turns.push_back(to_json(t));
    return nlohmann::json{{"session_id", session.session_id},
                          {"created_at", session.created_at_ms},
                          {"turns", std::move(turns)}};
}

inline std::string serialize_session(const ConversationSession& session) {
    return to_json(session).dump(2);
}

inline Turn turn_from_json(const nlohmann::json& j) {
    Turn t;
    t.index = j.at("index").get<int>();
    t.user_query = j.at("user_query").get<std::string>();
    if (j.contains("response")) t.response = j.at("response").get<std::string>();
    if (j.contains("rewritten_query")) t.rewritten_query = j.at("rewritten_query").get<std::string>();
    return t;
}

inline ConversationSession session_from_json(const nlohmann::json& j) {
    ConversationSession base;
    base.session_id = j.at("session_id").get<std::string>();
    base.created_at_ms = j.value("created_at", static_cast<std::int64_t>(0));
    ConversationSession out = base;
    for (const auto& tj : j.at("turns")) {
        out = session_append(out, turn_from_json(tj));
    }
    return out;
}

inline ConversationSession deserialize_session(const std::string& payload) {
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("session document is not valid JSON");
    }
    try {
        return session_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed session document: ") + e.what());
    }
}

}  // namespace qrew
