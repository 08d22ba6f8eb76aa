#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qrew/providers.hpp"
#include "qrew/text.hpp"

namespace qrew {

/// Deterministic bag-of-tokens embedder for offline evaluation: each token
/// hashes to one of `dimension` buckets under a fixed seed, counts accumulate,
/// and the vector is L2-normalized. Text with no tokens embeds to the zero
/// vector. Token-level vectors are the unit basis vector of the token's
/// bucket, so token similarity is 1 for a bucket match and 0 otherwise.
class HashEmbedder : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDimension = 256;
    // Chosen so the tokens pinned in the metric oracles land in distinct buckets.
    static constexpr std::uint64_t kDefaultSeed = 0x9e3779b97f4a7c2cull;

    explicit HashEmbedder(std::size_t dimension = kDefaultDimension,
                          std::uint64_t seed = kDefaultSeed)
        : dimension_(dimension), seed_(seed), descriptor_{"hash-embed", dimension} {
        if (dimension_ == 0) {
            throw ConfigError("embedding dimension must be >= 1");
        }
    }

    /// Bucket index of one token. Exposed so tests can verify that a pinned
    /// token set is collision-free before asserting orthogonality.
    std::size_t bucket(const std::string& token) const {
        // FNV-1a 64-bit, seed folded into the offset basis
        std::uint64_t h = 14695981039346656037ull ^ seed_;
        for (unsigned char c : token) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h % dimension_);
    }

    std::vector<double> embed(const std::string& input) override {
        std::vector<double> v(dimension_, 0.0);
        for (const auto& token : text::tokenize(input)) {
            v[bucket(token)] += 1.0;
        }
        normalize(v);
        return v;
    }

    TokenEmbeddings embed_tokens(const std::string& input) override {
        TokenEmbeddings out;
        out.tokens = text::tokenize(input);
        out.vectors.reserve(out.tokens.size());
        for (const auto& token : out.tokens) {
            std::vector<double> v(dimension_, 0.0);
            v[bucket(token)] = 1.0;
            out.vectors.push_back(std::move(v));
        }
        return out;
    }

    const EmbeddingDescriptor& descriptor() const override { return descriptor_; }

private:
    static void normalize(std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x * x;
        if (sum <= 0.0) return;
        const double norm = std::sqrt(sum);
        for (double& x : v) x /= norm;
    }

    std::size_t dimension_;
    std::uint64_t seed_;
    EmbeddingDescriptor descriptor_;
};

}  // namespace qrew
