#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qrew/context.hpp"
#include "qrew/errors.hpp"
#include "qrew/text.hpp"

namespace qrew {

/// Text with {{context}} / {{query}} / {{instructions}} placeholders.
/// Templates are data: the built-ins below are starting points and real
/// deployments load their own from a manifest file.
struct PromptTemplate {
    std::string template_id;
    std::string body;
    std::map<std::string, std::string> metadata;  // e.g. "instructions", "task"

    bool operator==(const PromptTemplate&) const = default;
};

namespace prompt_format {

// The line the current query is rendered on. Mocks and tests key on this.
inline constexpr std::string_view kQueryLabel = "Current question: ";
inline constexpr std::string_view kUserLinePrefix = "user: ";
inline constexpr std::string_view kAssistantLinePrefix = "assistant: ";
inline constexpr std::string_view kEmptyContextMarker = "(no prior conversation)";

}  // namespace prompt_format

/// Context items rendered one per line, labeled by recency, oldest first.
inline std::string format_context(const Context& context) {
    if (context.empty()) return std::string(prompt_format::kEmptyContextMarker);
    std::ostringstream out;
    const std::size_t n = context.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ago = n - i;
        const char* plural = ago == 1 ? "" : "s";
        if (i > 0) out << '\n';
        out << "(" << ago << " turn" << plural << " ago) " << prompt_format::kUserLinePrefix
            << context.items[i].query;
        if (context.items[i].response) {
            out << '\n'
                << "(" << ago << " turn" << plural << " ago) "
                << prompt_format::kAssistantLinePrefix << *context.items[i].response;
        }
    }
    return out.str();
}

/// Expand the template's placeholders. Pure function of its arguments;
/// a placeholder the renderer does not define is an error.
inline std::string render_prompt(const PromptTemplate& tmpl, const Context& context,
                                 std::string_view query) {
    if (text::is_blank(query)) {
        throw EmptyQueryError("cannot render a prompt for a blank query");
    }
    std::string instructions;
    if (auto it = tmpl.metadata.find("instructions"); it != tmpl.metadata.end()) {
        instructions = it->second;
    }

    std::string out;
    out.reserve(tmpl.body.size() + query.size() + 128);
    std::size_t pos = 0;
    while (pos < tmpl.body.size()) {
        std::size_t open = tmpl.body.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl.body, pos, std::string::npos);
            break;
        }
        out.append(tmpl.body, pos, open - pos);
        std::size_t close = tmpl.body.find("}}", open + 2);
        if (close == std::string::npos) {
            throw UnknownPlaceholderError("template '" + tmpl.template_id +
                                          "': unterminated placeholder");
        }
        std::string name = tmpl.body.substr(open + 2, close - open - 2);
        if (name == "context") {
            out += format_context(context);
        } else if (name == "query") {
            out += query;
        } else if (name == "instructions") {
            out += instructions;
        } else {
            throw UnknownPlaceholderError("template '" + tmpl.template_id +
                                          "': unknown placeholder {{" + name + "}}");
        }
        pos = close + 2;
    }
    return out;
}

inline PromptTemplate builtin_text_qa_template() {
    PromptTemplate t;
    t.template_id = "text-qa";
    t.metadata["task"] = "conversational question answering";
    t.metadata["instructions"] =
        "Rewrite the user's current question so that it is fully self-contained. "
        "Resolve pronouns and incomplete references using the conversation so far. "
        "Reply with the rewritten question only.";
    t.body =
        "{{instructions}}\n"
        "\n"
        "Conversation so far:\n"
        "{{context}}\n"
        "\n"
        "Current question: {{query}}\n"
        "Rewritten question:";
    return t;
}

inline PromptTemplate builtin_text_to_vis_template() {
    PromptTemplate t;
    t.template_id = "text-to-vis";
    t.metadata["task"] = "conversational data analysis";
    t.metadata["instructions"] =
        "Fuse the user's follow-up request into the previous analytics question. "
        "Keep the result a single complete analytics question that fully describes "
        "the visualization to generate. Reply with the fused question only.";
    t.body =
        "{{instructions}}\n"
        "\n"
        "Conversation so far:\n"
        "{{context}}\n"
        "\n"
        "Current question: {{query}}\n"
        "Rewritten question:";
    return t;
}

/// Resolves template ids for the engine. Starts from the two built-ins;
/// a manifest file can add or override entries.
class TemplateRegistry {
public:
    static TemplateRegistry builtin() {
        TemplateRegistry r;
        r.add(builtin_text_qa_template());
        r.add(builtin_text_to_vis_template());
        return r;
    }

    /// Manifest format: {"templates": [{"template_id": ..., "path": ...,
    /// "metadata": {...}}]}. Paths are relative to the manifest file.
    static TemplateRegistry from_manifest(const std::filesystem::path& manifest_path) {
        std::ifstream in(manifest_path);
        if (!in) {
            throw ConfigError("cannot open template manifest: " + manifest_path.string());
        }
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) {
            throw ConfigError("template manifest is not valid JSON: " + manifest_path.string());
        }
        TemplateRegistry r = builtin();
        const auto base = manifest_path.parent_path();
        for (const auto& entry : j.at("templates")) {
            PromptTemplate t;
            t.template_id = entry.at("template_id").get<std::string>();
            const auto path = base / entry.at("path").get<std::string>();
            std::ifstream body(path);
            if (!body) {
                throw ConfigError("template file missing: " + path.string());
            }
            std::ostringstream ss;
            ss << body.rdbuf();
            t.body = ss.str();
            if (entry.contains("metadata")) {
                for (const auto& [k, v] : entry.at("metadata").items()) {
                    t.metadata[k] = v.get<std::string>();
                }
            }
            r.add(std::move(t));
        }
        return r;
    }

    void add(PromptTemplate t) { templates_[t.template_id] = std::move(t); }

    bool contains(const std::string& id) const { return templates_.count(id) > 0; }

    const PromptTemplate& get(const std::string& id) const {
        auto it = templates_.find(id);
        if (it == templates_.end()) {
            throw ConfigError("unknown prompt template id: " + id);
        }
        return it->second;
    }

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace qrew
