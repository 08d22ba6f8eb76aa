#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qrew/prompt.hpp"
#include "qrew/providers.hpp"
#include "qrew/rules.hpp"
#include "qrew/text.hpp"

namespace qrew {

namespace mock_detail {

/// The query sits on the last line carrying the renderer's query label.
inline std::string extract_current_query(const std::string& prompt) {
    const std::string label(prompt_format::kQueryLabel);
    std::size_t pos = prompt.rfind(label);
    if (pos == std::string::npos) {
        throw ProviderError(ProviderErrorKind::Malformed,
                            "prompt has no current-question line", prompt);
    }
    std::size_t start = pos + label.size();
    std::size_t end = prompt.find('\n', start);
    if (end == std::string::npos) end = prompt.size();
    return text::trim_copy(prompt.substr(start, end - start));
}

/// All context "user:" lines, oldest first, up to the query label.
inline std::vector<std::string> extract_context_queries(const std::string& prompt) {
    const std::string label(prompt_format::kQueryLabel);
    const std::string user(prompt_format::kUserLinePrefix);
    const std::size_t stop = prompt.rfind(label);
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = prompt.find(user, pos);
        if (hit == std::string::npos || (stop != std::string::npos && hit >= stop)) break;
        std::size_t start = hit + user.size();
        std::size_t end = prompt.find('\n', start);
        if (end == std::string::npos) end = prompt.size();
        out.push_back(text::trim_copy(prompt.substr(start, end - start)));
        pos = end;
    }
    return out;
}

}  // namespace mock_detail

/// Answers every prompt with the current question, verbatim.
class EchoQueryMock : public GenerativeModelProvider {
public:
    EchoQueryMock() : descriptor_{"mock", "echo-query", true} {}

    std::string generate(const std::string& prompt) override {
        return mock_detail::extract_current_query(prompt);
    }

    const ProviderDescriptor& descriptor() const override { return descriptor_; }

private:
    ProviderDescriptor descriptor_;
};

struct ScriptEntry {
    std::vector<std::string> contains;  // all substrings must appear in the prompt
    std::string response;
};

/// Canned responses selected by substring matchers, first match wins.
/// Strict scripts refuse to answer an unmatched prompt; non-strict ones fall
/// back to echoing the current question.
class ScriptedMock : public GenerativeModelProvider {
public:
    explicit ScriptedMock(std::vector<ScriptEntry> script, bool strict = true)
        : script_(std::move(script)), strict_(strict), descriptor_{"mock", "scripted", true} {}

    static ScriptedMock from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open script file: " + path);
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw ConfigError("script file is not valid JSON: " + path);
        std::vector<ScriptEntry> entries;
        const nlohmann::json& list = j.is_array() ? j : j.at("entries");
        for (const auto& e : list) {
            ScriptEntry entry;
            if (e.at("contains").is_string()) {
                entry.contains.push_back(e.at("contains").get<std::string>());
            } else {
                for (const auto& c : e.at("contains")) entry.contains.push_back(c.get<std::string>());
            }
            entry.response = e.at("response").get<std::string>();
            entries.push_back(std::move(entry));
        }
        const bool strict = j.is_array() ? true : j.value("strict", true);
        return ScriptedMock(std::move(entries), strict);
    }

    std::string generate(const std::string& prompt) override {
        for (const ScriptEntry& entry : script_) {
            bool all = true;
            for (const std::string& needle : entry.contains) {
                if (prompt.find(needle) == std::string::npos) {
                    all = false;
                    break;
                }
            }
            if (all) return entry.response;
        }
        if (strict_) {
            throw ProviderError(ProviderErrorKind::ScriptMiss,
                                "no script entry matches the prompt", prompt);
        }
        return mock_detail::extract_current_query(prompt);
    }

    const ProviderDescriptor& descriptor() const override { return descriptor_; }

private:
    std::vector<ScriptEntry> script_;
    bool strict_;
    ProviderDescriptor descriptor_;
};

/// Deterministic fusion model: applies the follow-up's edit to the most
/// recent context question via the rule grammar. Makes every engine and
/// evaluation test runnable offline.
class RuleFusionMock : public GenerativeModelProvider {
public:
    explicit RuleFusionMock(rules::RuleLexicon lexicon = {})
        : lexicon_(std::move(lexicon)), descriptor_{"mock", "rule-fusion", true} {}

    std::string generate(const std::string& prompt) override {
        const std::string query = mock_detail::extract_current_query(prompt);
        const auto history = mock_detail::extract_context_queries(prompt);
        const std::string base = history.empty() ? std::string() : history.back();
        return rules::rule_fuse(base, query, lexicon_);
    }

    const ProviderDescriptor& descriptor() const override { return descriptor_; }

    const rules::RuleLexicon& lexicon() const { return lexicon_; }

private:
    rules::RuleLexicon lexicon_;
    ProviderDescriptor descriptor_;
};

}  // namespace qrew
