#include "groundctl/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "groundctl/error.hpp"
#include "groundctl/text.hpp"
#include "net/http_post.hpp"

namespace groundctl::embed {

namespace {

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)), norm_(l2(values_)) {}

EmbeddingVector EmbeddingVector::zeros(std::size_t dim) { return EmbeddingVector(std::vector<double>(dim, 0.0)); }

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    const double d = dot(a, b);
    if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
    const double c = d / (a.norm() * b.norm());
    return std::clamp(c, -1.0, 1.0);
}

std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<EmbeddingVector> Embedder::embed_batch(const std::vector<std::string>& texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

LocalEmbedder::LocalEmbedder(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ConfigError("embedding dim must be positive");
}

EmbeddingVector LocalEmbedder::embed(std::string_view text) const {
    std::vector<double> v(dim_, 0.0);
    for (const auto& tok : text::tokenize(text)) {
        const std::uint64_t h = stable_hash(tok);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[h % dim_] += sign;
    }
    const double n = l2(v);
    if (n > 0.0) {
        for (double& x : v) x /= n;
    }
    return EmbeddingVector(std::move(v));
}

RemoteEmbedderConfig RemoteEmbedderConfig::from_env() {
    RemoteEmbedderConfig cfg;
    const char* url = std::getenv("EMBED_API_URL");
    if (!url || !*url) throw ConfigError("EMBED_API_URL is not set");
    cfg.url = url;
    if (const char* key = std::getenv("EMBED_API_KEY")) cfg.api_key = key;
    return cfg;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.dim == 0) throw ConfigError("embedding dim must be positive");
}

void RemoteEmbedder::throttle() const {
    if (cfg_.requests_per_minute <= 0) return;
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(rate_mu_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_slot_);
        next_slot_ = slot + std::chrono::minutes(1) / cfg_.requests_per_minute;
    }
    std::this_thread::sleep_until(slot);
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
    return embed_batch({std::string(text)}).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
    if (texts.empty()) return {};
    throttle();
    const nlohmann::json req = {{"input", texts}};
    std::vector<std::pair<std::string, std::string>> headers;
    if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);
    const auto res = net::post_json(cfg_.url, req.dump(), headers, cfg_.timeout);
    if (res.status != 200) {
        const bool retryable = res.status == 429 || res.status >= 500;
        throw ProviderError("embedding provider returned HTTP " + std::to_string(res.status), retryable,
                            res.status);
    }

    std::vector<EmbeddingVector> out;
    try {
        const auto body = nlohmann::json::parse(res.body);
        const auto& vectors = body.at("vectors");
        if (!vectors.is_array() || vectors.size() != texts.size())
            throw ProviderError("embedding provider returned wrong vector count", false, res.status);
        for (const auto& v : vectors) {
            if (!v.is_array() || v.size() != cfg_.dim)
                throw ProviderError("embedding provider returned a vector of the wrong dimension", false,
                                    res.status);
            std::vector<double> values;
            values.reserve(v.size());
            for (const auto& x : v) {
                if (!x.is_number()) throw ProviderError("non-numeric embedding component", false, res.status);
                values.push_back(x.get<double>());
            }
            out.emplace_back(std::move(values));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed embedding response: ") + e.what(), false, res.status);
    }
    return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
    if (cfg.provider == EmbedderKind::remote_api) {
        auto remote = RemoteEmbedderConfig::from_env();
        remote.dim = cfg.dim;
        return std::make_unique<RemoteEmbedder>(std::move(remote));
    }
    return std::make_unique<LocalEmbedder>(cfg.dim);
}

}  // namespace groundctl::embed
