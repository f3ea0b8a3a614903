#include "groundctl/store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "groundctl/error.hpp"

namespace groundctl::store {

using nlohmann::json;

TypeFilter::TypeFilter(std::initializer_list<ingest::SourceType> types) {
    for (auto t : types) mask_ |= 1u << static_cast<unsigned>(t);
}

bool TypeFilter::accepts(ingest::SourceType t) const {
    return mask_ == 0 || (mask_ & (1u << static_cast<unsigned>(t))) != 0;
}

VectorStore::VectorStore(const VectorStore& other) {
    std::shared_lock lock(other.mu_);
    chunks_ = other.chunks_;
    dim_ = other.dim_;
}

VectorStore& VectorStore::operator=(const VectorStore& other) {
    if (this == &other) return *this;
    std::unique_lock mine(mu_, std::defer_lock);
    std::shared_lock theirs(other.mu_, std::defer_lock);
    std::lock(mine, theirs);
    chunks_ = other.chunks_;
    dim_ = other.dim_;
    return *this;
}

std::size_t VectorStore::upsert(std::vector<StoredChunk> chunks) {
    std::unique_lock lock(mu_);
    std::optional<std::size_t> dim = dim_;
    for (const auto& c : chunks) {
        if (!dim) dim = c.vector.dim();
        if (c.vector.dim() != *dim) throw DimensionMismatch(*dim, c.vector.dim());
    }
    dim_ = dim;
    for (auto& c : chunks) {
        std::string id = c.chunk.chunk_id;
        chunks_.insert_or_assign(std::move(id), std::move(c));
    }
    return chunks_.size();
}

std::size_t VectorStore::erase_source(const std::string& source_id) {
    std::unique_lock lock(mu_);
    std::size_t removed = 0;
    for (auto it = chunks_.begin(); it != chunks_.end();) {
        if (it->second.chunk.source_id == source_id) {
            it = chunks_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

std::vector<QueryResult> VectorStore::query(const embed::EmbeddingVector& q, std::size_t k,
                                            const TypeFilter& filter) const {
    if (k == 0) throw ConfigError("k must be at least 1");
    std::shared_lock lock(mu_);
    if (dim_ && q.dim() != *dim_) throw DimensionMismatch(*dim_, q.dim());

    std::vector<QueryResult> scored;
    scored.reserve(chunks_.size());
    for (const auto& [id, c] : chunks_) {
        if (!filter.accepts(c.chunk.source_type)) continue;
        scored.push_back({id, embed::cosine(q, c.vector), 0});
    }
    const auto better = [](const QueryResult& a, const QueryResult& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    };
    const std::size_t n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
    scored.resize(n);
    for (std::size_t i = 0; i < n; ++i) scored[i].rank = i + 1;
    return scored;
}

std::optional<StoredChunk> VectorStore::get(const std::string& chunk_id) const {
    std::shared_lock lock(mu_);
    const auto it = chunks_.find(chunk_id);
    if (it == chunks_.end()) return std::nullopt;
    return it->second;
}

std::vector<SourceSummary> VectorStore::sources() const {
    std::shared_lock lock(mu_);
    std::map<std::string, SourceSummary> by_source;
    for (const auto& [id, c] : chunks_) {
        auto& s = by_source[c.chunk.source_id];
        s.source_id = c.chunk.source_id;
        s.source_type = c.chunk.source_type;
        ++s.chunks;
    }
    std::vector<SourceSummary> out;
    for (auto& [id, s] : by_source) out.push_back(std::move(s));
    return out;
}

bool VectorStore::contains_type(ingest::SourceType t) const {
    std::shared_lock lock(mu_);
    return std::any_of(chunks_.begin(), chunks_.end(),
                       [t](const auto& kv) { return kv.second.chunk.source_type == t; });
}

std::size_t VectorStore::size() const {
    std::shared_lock lock(mu_);
    return chunks_.size();
}

std::optional<std::size_t> VectorStore::dim() const {
    std::shared_lock lock(mu_);
    return dim_;
}

void VectorStore::persist(const std::filesystem::path& path) const {
    std::shared_lock lock(mu_);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        const json header = {{"format", kFormatName},
                             {"version", kFormatVersion},
                             {"dim", dim_.value_or(embed::kDefaultDim)}};
        out << header.dump() << '\n';
        for (const auto& [id, c] : chunks_) {
            json rec;
            rec["chunk_id"] = c.chunk.chunk_id;
            rec["source_id"] = c.chunk.source_id;
            rec["source_type"] = ingest::to_string(c.chunk.source_type);
            rec["text"] = c.chunk.text;
            rec["char_range"] = {c.chunk.char_range.start, c.chunk.char_range.end};
            rec["ordinal"] = c.chunk.ordinal;
            rec["vector"] = std::vector<double>(c.vector.values().begin(), c.vector.values().end());
            out << rec.dump() << '\n';
        }
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

VectorStore VectorStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string(), 0);

    VectorStore store;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!have_header) {
            if (line.empty()) throw LoadError("missing header", line_no);
            json h;
            try {
                h = json::parse(line);
                if (h.at("format").get<std::string>() != kFormatName) throw LoadError("unknown format", line_no);
                if (h.at("version").get<int>() != kFormatVersion)
                    throw LoadError("unsupported version " + h.at("version").dump(), line_no);
                dim = h.at("dim").get<std::size_t>();
            } catch (const json::exception& e) {
                throw LoadError(std::string("corrupt header: ") + e.what(), line_no);
            }
            have_header = true;
            continue;
        }
        if (line.empty()) throw LoadError("empty record", line_no);
        StoredChunk c;
        try {
            const json rec = json::parse(line);
            c.chunk.chunk_id = rec.at("chunk_id").get<std::string>();
            c.chunk.source_id = rec.at("source_id").get<std::string>();
            const auto type = ingest::source_type_from_string(rec.at("source_type").get<std::string>());
            if (!type) throw LoadError("unknown source_type", line_no);
            c.chunk.source_type = *type;
            c.chunk.text = rec.at("text").get<std::string>();
            const auto& range = rec.at("char_range");
            if (!range.is_array() || range.size() != 2) throw LoadError("bad char_range", line_no);
            c.chunk.char_range = {range[0].get<std::size_t>(), range[1].get<std::size_t>()};
            c.chunk.ordinal = rec.value("ordinal", std::size_t{0});
            auto values = rec.at("vector").get<std::vector<double>>();
            if (values.size() != dim)
                throw LoadError("vector has " + std::to_string(values.size()) + " components, header says " +
                                    std::to_string(dim),
                                line_no);
            c.vector = embed::EmbeddingVector(std::move(values));
        } catch (const json::exception& e) {
            throw LoadError(std::string("corrupt record: ") + e.what(), line_no);
        }
        if (store.chunks_.count(c.chunk.chunk_id)) throw LoadError("duplicate chunk_id " + c.chunk.chunk_id, line_no);
        std::string id = c.chunk.chunk_id;
        store.chunks_.emplace(std::move(id), std::move(c));
    }
    if (have_header) store.dim_ = dim;
    return store;
}

}  // namespace groundctl::store
