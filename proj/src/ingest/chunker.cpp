#include <algorithm>
#include <cstdio>
#include <set>

#include "groundctl/error.hpp"
#include "groundctl/ingest.hpp"
#include "groundctl/text.hpp"

namespace groundctl::ingest {

namespace {

// Cuts [a, b) into pieces no longer than chunk_size. Appends the end offset of
// every piece to `bounds`, left to right.
class PieceSplitter {
public:
    PieceSplitter(std::string_view text, const ChunkingConfig& cfg, std::vector<std::size_t>& bounds)
        : text_(text), cfg_(cfg), bounds_(bounds) {}

    void split(std::size_t a, std::size_t b, std::size_t sep_index) {
        if (b - a <= cfg_.chunk_size) {
            bounds_.push_back(b);
            return;
        }
        const std::string_view span = text_.substr(a, b - a);
        for (std::size_t i = sep_index; i < cfg_.separators.size(); ++i) {
            const std::string& sep = cfg_.separators[i];
            if (sep.empty()) {
                split_characters(a, b);
                return;
            }
            if (span.find(sep) == std::string_view::npos) continue;
            std::size_t start = a;
            std::size_t at = span.find(sep);
            while (at != std::string_view::npos) {
                const std::size_t piece_end = a + at + sep.size();
                split(start, piece_end, i + 1);
                start = piece_end;
                at = span.find(sep, at + sep.size());
            }
            if (start < b) split(start, b, i + 1);
            return;
        }
        hard_cut(a, b);
    }

private:
    void split_characters(std::size_t a, std::size_t b) {
        std::size_t pos = a;
        while (pos < b) {
            std::size_t next = pos + 1;
            while (next < b && !text::is_utf8_boundary(text_, next)) ++next;
            // A code point wider than chunk_size falls back to bytes.
            if (next - pos > cfg_.chunk_size) next = pos + 1;
            bounds_.push_back(next);
            pos = next;
        }
    }

    void hard_cut(std::size_t a, std::size_t b) {
        std::size_t pos = a;
        while (pos < b) {
            std::size_t next = std::min(b, pos + cfg_.chunk_size);
            std::size_t aligned = next;
            while (aligned > pos && !text::is_utf8_boundary(text_, aligned)) --aligned;
            if (aligned > pos) next = aligned;
            bounds_.push_back(next);
            pos = next;
        }
    }

    std::string_view text_;
    const ChunkingConfig& cfg_;
    std::vector<std::size_t>& bounds_;
};

}  // namespace

void ChunkingConfig::validate() const {
    if (chunk_size == 0) throw ConfigError("chunk_size must be positive");
    if (overlap >= chunk_size) throw ConfigError("overlap must be smaller than chunk_size");
}

std::string make_chunk_id(std::string_view source_id, std::size_t ordinal) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ":%04zu", ordinal);
    return std::string(source_id) + buf;
}

std::vector<CharRange> chunk_ranges(std::string_view text, const ChunkingConfig& cfg) {
    cfg.validate();
    std::vector<CharRange> ranges;
    if (text.empty()) return ranges;

    std::vector<std::size_t> bounds{0};
    PieceSplitter(text, cfg, bounds).split(0, text.size(), 0);

    const std::size_t len = text.size();
    std::size_t si = 0;
    while (true) {
        const std::size_t s = bounds[si];
        const auto past = std::upper_bound(bounds.begin() + static_cast<std::ptrdiff_t>(si) + 1, bounds.end(),
                                           s + cfg.chunk_size);
        const std::size_t ej = static_cast<std::size_t>(past - bounds.begin()) - 1;
        ranges.push_back({s, bounds[ej]});
        if (bounds[ej] == len) break;

        // Next chunk starts on a piece boundary inside the overlap window, moved
        // forward only as far as needed for the following piece to fit.
        const std::size_t end = bounds[ej];
        const std::size_t next_piece = bounds[ej + 1] - end;
        const std::size_t target = end > cfg.overlap ? end - cfg.overlap : 0;
        std::size_t nj = static_cast<std::size_t>(
            std::lower_bound(bounds.begin(), bounds.end(), target) - bounds.begin());
        nj = std::max(nj, si + 1);
        while (end - bounds[nj] + next_piece > cfg.chunk_size) ++nj;
        si = nj;
    }
    return ranges;
}

std::vector<DocumentChunk> chunk_text(std::string_view text, const ChunkingConfig& cfg,
                                      std::string_view source_id, SourceType type) {
    std::vector<DocumentChunk> chunks;
    const auto ranges = chunk_ranges(text, cfg);
    chunks.reserve(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        DocumentChunk c;
        c.chunk_id = make_chunk_id(source_id, i);
        c.source_id = std::string(source_id);
        c.source_type = type;
        c.text = std::string(text.substr(ranges[i].start, ranges[i].size()));
        c.char_range = ranges[i];
        c.ordinal = i;
        chunks.push_back(std::move(c));
    }
    return chunks;
}

Corpus ingest_corpus(const std::vector<SourceDocument>& docs, const ChunkingConfig& cfg) {
    cfg.validate();
    std::set<std::string, std::less<>> seen;
    for (const auto& d : docs) {
        if (!seen.insert(d.source_id).second) throw DuplicateSource(d.source_id);
    }

    Corpus corpus;
    for (const auto& d : docs) {
        std::string normalized;
        if (d.source_type == SourceType::html) {
            auto cleaned = dom::clean_html(d.raw_bytes);
            normalized = std::move(cleaned.structural_text);
            corpus.html_recoveries += cleaned.recoveries;
            const std::string page_id = page_id_for_source(d.source_id);
            if (!corpus.pages.emplace(page_id, std::move(cleaned.elements)).second)
                throw ConfigError("two html sources map to page " + page_id);
        } else {
            normalized = parse_source(d);
        }
        auto chunks = chunk_text(normalized, cfg, d.source_id, d.source_type);
        for (auto& c : chunks) corpus.chunks.push_back(std::move(c));
    }
    return corpus;
}

}  // namespace groundctl::ingest
