#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qrew/errors.hpp"

namespace qrew {

struct ProviderDescriptor {
    std::string provider_id;
    std::string model_name;
    bool deterministic = false;
};

/// The base generative model the rewrite is conditioned on. Implementations
/// must be safely callable from multiple threads.
class GenerativeModelProvider {
public:
    virtual ~GenerativeModelProvider() = default;

    /// Complete the rendered prompt. Throws ProviderError on failure.
    virtual std::string generate(const std::string& prompt) = 0;

    virtual const ProviderDescriptor& descriptor() const = 0;
};

struct EmbeddingDescriptor {
    std::string provider_id;
    std::size_t dimension = 0;
};

struct TokenEmbeddings {
    std::vector<std::string> tokens;
    std::vector<std::vector<double>> vectors;  // one per token, same order
};

/// Sentence- and token-level embeddings from one model, so every metric in a
/// run is computed against the same space. embed("") is the zero vector,
/// never an error; callers treat a zero norm as degenerate.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual TokenEmbeddings embed_tokens(const std::string& text) = 0;
    virtual const EmbeddingDescriptor& descriptor() const = 0;
};

}  // namespace qrew
