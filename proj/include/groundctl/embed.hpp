#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace groundctl::embed {

inline constexpr std::size_t kDefaultDim = 384;

class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values);
    static EmbeddingVector zeros(std::size_t dim);

    std::size_t dim() const { return values_.size(); }
    double norm() const { return norm_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) {
        return a.values_ == b.values_;
    }

private:
    std::vector<double> values_;
    double norm_ = 0.0;
};

// dot(a,b) / (|a||b|); 0 when either norm is 0. Throws DimensionMismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);
double dot(const EmbeddingVector& a, const EmbeddingVector& b);

std::uint64_t stable_hash(std::string_view s);  // FNV-1a, 64-bit

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dim() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;
};

// Signed feature hashing over lowercase alphanumeric tokens, L2-normalized.
// Word order is ignored: only the token multiset matters.
class LocalEmbedder final : public Embedder {
public:
    explicit LocalEmbedder(std::size_t dim = kDefaultDim);
    std::size_t dim() const override { return dim_; }
    EmbeddingVector embed(std::string_view text) const override;

private:
    std::size_t dim_;
};

struct RemoteEmbedderConfig {
    std::string url;  // full endpoint, e.g. http://host:8000/embed
    std::string api_key;
    std::size_t dim = kDefaultDim;
    int requests_per_minute = 30;
    std::chrono::seconds timeout{30};

    // EMBED_API_URL / EMBED_API_KEY. Throws ConfigError when the URL is unset.
    static RemoteEmbedderConfig from_env();
};

// POST {"input": [...]} -> {"vectors": [[...], ...]}. Throws ProviderError.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(RemoteEmbedderConfig cfg);
    std::size_t dim() const override { return cfg_.dim; }
    EmbeddingVector embed(std::string_view text) const override;
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

private:
    void throttle() const;

    RemoteEmbedderConfig cfg_;
    mutable std::mutex rate_mu_;
    mutable std::chrono::steady_clock::time_point next_slot_{};
};

enum class EmbedderKind { local_deterministic, remote_api };

struct EmbedderConfig {
    std::size_t dim = kDefaultDim;
    EmbedderKind provider = EmbedderKind::local_deterministic;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

}  // namespace groundctl::embed
