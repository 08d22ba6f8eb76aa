#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qrew {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Appending a turn whose index is not the successor of the last one.
class IndexGapError : public Error {
public:
    using Error::Error;
};

/// A query (or gold label) that is empty after whitespace trimming.
class EmptyQueryError : public Error {
public:
    using Error::Error;
};

/// A prompt template references a placeholder the renderer does not define.
class UnknownPlaceholderError : public Error {
public:
    using Error::Error;
};

/// Fusion-mode rewrite requested but a prior turn has no rewritten query.
class MissingRewrittenHistoryError : public Error {
public:
    using Error::Error;
};

/// Vectors of different dimensions handed to a similarity metric.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// Relative gain against a baseline that is zero or negative.
class NonPositiveBaselineError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value (rewrite config, CLI config, provider config).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file that could not be parsed at all.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Schema/invariant violations found while validating a dataset.
/// Collects every violation with its location instead of stopping at the first.
class SchemaError : public Error {
public:
    explicit SchemaError(std::vector<std::string> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "dataset validation failed (" + std::to_string(issues.size()) + " issue(s))";
        for (const auto& i : issues) {
            out += "\n  - " + i;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

enum class ProviderErrorKind {
    Timeout,
    Auth,
    RateLimited,
    Malformed,
    Transport,
    ScriptMiss,
};

inline const char* to_string(ProviderErrorKind kind) {
    switch (kind) {
        case ProviderErrorKind::Timeout: return "timeout";
        case ProviderErrorKind::Auth: return "auth";
        case ProviderErrorKind::RateLimited: return "rate_limited";
        case ProviderErrorKind::Malformed: return "malformed";
        case ProviderErrorKind::Transport: return "transport";
        case ProviderErrorKind::ScriptMiss: return "script_miss";
    }
    return "unknown";
}

/// A model or embedding provider call failed. `detail` keeps provider-level
/// context (raw body, HTTP status, unmatched prompt) for diagnostics.
class ProviderError : public Error {
public:
    ProviderError(ProviderErrorKind kind, const std::string& message, std::string detail = {})
        : Error(std::string("provider error (") + to_string(kind) + "): " + message),
          kind_(kind),
          detail_(std::move(detail)) {}

    ProviderErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }

private:
    ProviderErrorKind kind_;
    std::string detail_;
};

}  // namespace qrew
