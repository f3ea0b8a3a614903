#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "groundctl/embed.hpp"
#include "groundctl/ingest.hpp"

namespace groundctl::store {

inline constexpr const char* kFormatName = "groundctl-store";
inline constexpr int kFormatVersion = 1;

struct StoredChunk {
    ingest::DocumentChunk chunk;
    embed::EmbeddingVector vector;
};

struct QueryResult {
    std::string chunk_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based

    friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

// Set of source types a query may return; empty means "any".
class TypeFilter {
public:
    TypeFilter() = default;
    TypeFilter(std::initializer_list<ingest::SourceType> types);

    bool accepts(ingest::SourceType t) const;
    bool empty() const { return mask_ == 0; }

private:
    unsigned mask_ = 0;
};

struct SourceSummary {
    std::string source_id;
    ingest::SourceType source_type;
    std::size_t chunks = 0;
};

// Exact cosine k-NN over an in-memory chunk table. Readers share a lock,
// writers (upsert, erase, load) take it exclusively.
class VectorStore {
public:
    VectorStore() = default;
    VectorStore(const VectorStore& other);
    VectorStore& operator=(const VectorStore& other);

    // Returns the store size afterwards. Throws DimensionMismatch.
    std::size_t upsert(std::vector<StoredChunk> chunks);
    std::size_t erase_source(const std::string& source_id);

    // Top-k by cosine, ties broken by ascending chunk_id.
    std::vector<QueryResult> query(const embed::EmbeddingVector& q, std::size_t k,
                                   const TypeFilter& filter = {}) const;

    std::optional<StoredChunk> get(const std::string& chunk_id) const;
    std::vector<SourceSummary> sources() const;
    bool contains_type(ingest::SourceType t) const;
    std::size_t size() const;
    std::optional<std::size_t> dim() const;

    // Line-delimited JSON: a header line, then one record per chunk.
    void persist(const std::filesystem::path& path) const;
    static VectorStore load(const std::filesystem::path& path);  // throws LoadError

private:
    mutable std::shared_mutex mu_;
    std::map<std::string, StoredChunk> chunks_;
    std::optional<std::size_t> dim_;
};

}  // namespace groundctl::store
