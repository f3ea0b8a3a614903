#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groundctl/dom.hpp"

namespace groundctl::ingest {

enum class SourceType { markdown, text, json, html };

std::string to_string(SourceType t);
std::optional<SourceType> source_type_from_string(std::string_view s);
// .md/.markdown, .txt, .json, .html/.htm
std::optional<SourceType> source_type_from_path(const std::filesystem::path& p);

struct SourceDocument {
    std::string source_id;
    SourceType source_type = SourceType::text;
    std::string raw_bytes;
    std::string origin;
};

struct CharRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    friend bool operator==(const CharRange&, const CharRange&) = default;
};

struct DocumentChunk {
    std::string chunk_id;  // "<source_id>:<ordinal, 4 digits>"
    std::string source_id;
    SourceType source_type = SourceType::text;
    std::string text;
    CharRange char_range;  // bytes of the normalized source text
    std::size_t ordinal = 0;

    friend bool operator==(const DocumentChunk&, const DocumentChunk&) = default;
};

struct ChunkingConfig {
    std::size_t chunk_size = 1000;
    std::size_t overlap = 200;
    // Highest priority first; "" splits between characters.
    std::vector<std::string> separators{"\n\n", "\n", " ", ""};

    void validate() const;  // throws ConfigError
};

std::string make_chunk_id(std::string_view source_id, std::size_t ordinal);

// Normalized plain text for one source. HTML goes through dom::clean_html.
// Throws ParseError (JSON, with byte offset) or EncodingError.
std::string parse_source(const SourceDocument& doc);

std::string strip_markdown(std::string_view md);
std::string flatten_json(std::string_view json_text);

// Ranges only; chunk_text wraps these into DocumentChunk values.
std::vector<CharRange> chunk_ranges(std::string_view text, const ChunkingConfig& cfg);

std::vector<DocumentChunk> chunk_text(std::string_view text, const ChunkingConfig& cfg,
                                      std::string_view source_id = "",
                                      SourceType type = SourceType::text);

struct Corpus {
    std::vector<DocumentChunk> chunks;
    // page_id (source file stem) -> cleaned elements, for every html source.
    std::map<std::string, std::vector<dom::DomElement>> pages;
    std::size_t html_recoveries = 0;
};

// Throws DuplicateSource before doing any work.
Corpus ingest_corpus(const std::vector<SourceDocument>& docs, const ChunkingConfig& cfg);

std::string page_id_for_source(std::string_view source_id);

SourceDocument load_source(const std::filesystem::path& file);
// Every supported file directly inside `dir`, sorted by name.
std::vector<SourceDocument> load_directory(const std::filesystem::path& dir);

}  // namespace groundctl::ingest
