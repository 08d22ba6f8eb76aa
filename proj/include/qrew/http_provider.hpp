#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qrew/errors.hpp"
#include "qrew/providers.hpp"

namespace qrew {

namespace json_path {

/// Dot paths over JSON documents; numeric segments index arrays.
/// "choices.0.message.content" walks obj -> array -> obj -> obj.
inline bool is_number(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

inline std::vector<std::string> split(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        std::size_t dot = path.find('.', start);
        if (dot == std::string_view::npos) {
            parts.emplace_back(path.substr(start));
            break;
        }
        parts.emplace_back(path.substr(start, dot - start));
        start = dot + 1;
    }
    return parts;
}

inline const nlohmann::json* get(const nlohmann::json& root, std::string_view path) {
    const nlohmann::json* node = &root;
    for (const auto& part : split(path)) {
        if (is_number(part)) {
            const std::size_t idx = std::stoul(part);
            if (!node->is_array() || idx >= node->size()) return nullptr;
            node = &(*node)[idx];
        } else {
            if (!node->is_object() || !node->contains(part)) return nullptr;
            node = &node->at(part);
        }
    }
    return node;
}

inline void set(nlohmann::json& root, std::string_view path, nlohmann::json value) {
    nlohmann::json* node = &root;
    const auto parts = split(path);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const bool last = i + 1 == parts.size();
        if (is_number(parts[i])) {
            const std::size_t idx = std::stoul(parts[i]);
            if (!node->is_array()) *node = nlohmann::json::array();
            while (node->size() <= idx) node->push_back(nlohmann::json::object());
            if (last) {
                (*node)[idx] = std::move(value);
            } else {
                node = &(*node)[idx];
            }
        } else {
            if (!node->is_object()) *node = nlohmann::json::object();
            if (last) {
                (*node)[parts[i]] = std::move(value);
            } else {
                node = &(*node)[parts[i]];
            }
        }
    }
}

}  // namespace json_path

/// Wire configuration for a generic chat-completion endpoint. The field maps
/// keep the provider vendor-neutral; decoding parameters pass through in
/// `extra_body` untouched. The auth token is read from the named environment
/// variable only, never from the config file.
struct HttpProviderConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8080"
    std::string path = "/v1/chat/completions";
    std::string model_name;
    std::string auth_env_var;  // empty means no auth header
    int timeout_ms = 30000;
    int max_retries = 3;  // total attempts for retryable failures
    int backoff_initial_ms = 500;
    int max_inflight = 4;
    std::string model_field = "model";
    std::string prompt_field = "messages.0.content";
    std::string role_field = "messages.0.role";
    std::string role = "user";
    std::string completion_field = "choices.0.message.content";
    nlohmann::json extra_body = nlohmann::json::object();

    static HttpProviderConfig from_file(const std::string& config_path) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open provider config: " + config_path);
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) {
            throw ConfigError("provider config is not valid JSON: " + config_path);
        }
        HttpProviderConfig c;
        c.base_url = j.at("base_url").get<std::string>();
        c.path = j.value("path", c.path);
        c.model_name = j.value("model_name", std::string());
        c.auth_env_var = j.value("auth_env_var", std::string());
        c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
        c.max_retries = j.value("max_retries", c.max_retries);
        c.backoff_initial_ms = j.value("backoff_initial_ms", c.backoff_initial_ms);
        c.max_inflight = j.value("max_inflight", c.max_inflight);
        if (j.contains("request")) {
            const auto& r = j.at("request");
            c.model_field = r.value("model_field", c.model_field);
            c.prompt_field = r.value("prompt_field", c.prompt_field);
            c.role_field = r.value("role_field", c.role_field);
            c.role = r.value("role", c.role);
            if (r.contains("extra")) c.extra_body = r.at("extra");
        }
        if (j.contains("response")) {
            c.completion_field = j.at("response").value("completion_field", c.completion_field);
        }
        return c;
    }
};

/// Remote chat-completion provider. Retries transport failures and 429/5xx
/// with exponential backoff; auth and malformed-body failures are final.
/// Safe to call from multiple threads; in-flight requests are capped.
class HttpModelProvider : public GenerativeModelProvider {
public:
    explicit HttpModelProvider(HttpProviderConfig config)
        : config_(std::move(config)),
          inflight_(std::max(1, config_.max_inflight)),
          descriptor_{"http", config_.model_name, false} {
        if (config_.base_url.empty()) {
            throw ConfigError("provider base_url must not be empty");
        }
        if (!config_.auth_env_var.empty()) {
            const char* token = std::getenv(config_.auth_env_var.c_str());
            if (token == nullptr || *token == '\0') {
                throw ConfigError("auth environment variable '" + config_.auth_env_var +
                                  "' is not set");
            }
            auth_token_ = token;
        }
    }

    std::string generate(const std::string& prompt) override {
        inflight_.acquire();
        struct Release {
            std::counting_semaphore<>& sem;
            ~Release() { sem.release(); }
        } release{inflight_};

        nlohmann::json body = config_.extra_body.is_object() ? config_.extra_body
                                                             : nlohmann::json::object();
        if (!config_.model_field.empty() && !config_.model_name.empty()) {
            json_path::set(body, config_.model_field, config_.model_name);
        }
        if (!config_.role_field.empty()) {
            json_path::set(body, config_.role_field, config_.role);
        }
        json_path::set(body, config_.prompt_field, prompt);
        const std::string payload = body.dump();

        const int attempts = std::max(1, config_.max_retries);
        int backoff_ms = config_.backoff_initial_ms;
        std::string last_failure;
        ProviderErrorKind last_kind = ProviderErrorKind::Transport;

        for (int attempt = 1; attempt <= attempts; ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
                backoff_ms *= 2;
            }
            httplib::Client client(config_.base_url);
            client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
            client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));
            client.set_write_timeout(std::chrono::milliseconds(config_.timeout_ms));
            httplib::Headers headers;
            if (!auth_token_.empty()) {
                headers.emplace("Authorization", "Bearer " + auth_token_);
            }

            auto res = client.Post(config_.path, headers, payload, "application/json");
            if (!res) {
                const auto err = res.error();
                if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                    err == httplib::Error::Write) {
                    last_kind = ProviderErrorKind::Timeout;
                    last_failure = "request timed out";
                } else {
                    last_kind = ProviderErrorKind::Transport;
                    last_failure = "transport failure: " + httplib::to_string(err);
                }
                continue;  // retryable
            }
            if (res->status == 401 || res->status == 403) {
                throw ProviderError(ProviderErrorKind::Auth,
                                    "authentication rejected (HTTP " +
                                        std::to_string(res->status) + ")",
                                    res->body);
            }
            if (res->status == 429) {
                last_kind = ProviderErrorKind::RateLimited;
                last_failure = "rate limited (HTTP 429)";
                continue;  // retryable
            }
            if (res->status >= 500) {
                last_kind = ProviderErrorKind::Transport;
                last_failure = "server error (HTTP " + std::to_string(res->status) + ")";
                continue;  // retryable
            }
            if (res->status != 200) {
                throw ProviderError(ProviderErrorKind::Malformed,
                                    "unexpected HTTP " + std::to_string(res->status), res->body);
            }
            nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
            if (parsed.is_discarded()) {
                throw ProviderError(ProviderErrorKind::Malformed,
                                    "response body is not valid JSON", res->body);
            }
            const nlohmann::json* completion =
                json_path::get(parsed, config_.completion_field);
            if (completion == nullptr || !completion->is_string()) {
                throw ProviderError(ProviderErrorKind::Malformed,
                                    "response has no completion at '" +
                                        config_.completion_field + "'",
                                    res->body);
            }
            return completion->get<std::string>();
        }
        throw ProviderError(last_kind, last_failure + " after " + std::to_string(attempts) +
                                           " attempt(s)");
    }

    const ProviderDescriptor& descriptor() const override { return descriptor_; }

private:
    HttpProviderConfig config_;
    std::string auth_token_;
    std::counting_semaphore<> inflight_;
    ProviderDescriptor descriptor_;
};

}  // namespace qrew
