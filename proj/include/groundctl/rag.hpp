#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groundctl/embed.hpp"
#include "groundctl/error.hpp"
#include "groundctl/ingest.hpp"
#include "groundctl/store.hpp"

namespace groundctl::rag {

inline constexpr std::string_view kDocDelimiter = "[DOCUMENTATION]";
inline constexpr std::string_view kHtmlDelimiter = "[HTML STRUCTURE]";
inline constexpr std::string_view kQueryMarker = "USER QUERY: ";

class EmptyKnowledgeBase : public Error {
public:
    EmptyKnowledgeBase() : Error("no knowledge base: the store is empty, ingest documents first") {}
};

struct RetrievalConfig {
    std::size_t k = 3;
    std::size_t char_budget = 8000;
    std::size_t per_type_minimum = 1;

    void validate() const;  // throws ConfigError
};

// Which partitions a retrieval may fill. The ablation arms use the one-sided modes.
enum class ContextMode { full, docs_only, html_only, none };

struct ContextChunk {
    std::string chunk_id;
    std::string source_id;
    ingest::SourceType source_type = ingest::SourceType::text;
    std::string text;
    double score = 0.0;
    std::size_t rank = 0;  // position in the merged ranking, 1-based
    bool backfilled = false;
};

struct RetrievedContext {
    std::string query;
    std::vector<ContextChunk> doc_chunks;   // markdown, text, json
    std::vector<ContextChunk> html_chunks;
    std::size_t candidates = 0;  // results of the main query, before backfill

    // Every chunk, ordered by rank.
    std::vector<const ContextChunk*> ranked() const;
};

// Throws EmptyKnowledgeBase when the store has no chunks.
RetrievedContext retrieve_context(const store::VectorStore& store, const embed::Embedder& embedder,
                                  std::string_view query, const RetrievalConfig& cfg,
                                  ContextMode mode = ContextMode::full);

struct PromptBundle {
    std::string system_instructions;
    std::string documentation_block;
    std::string html_block;
    std::string user_query;
    std::vector<std::string> constraints;
    std::size_t char_budget = 0;

    std::vector<std::string> included_chunk_ids;  // rank order
    std::vector<std::string> dropped_chunk_ids;
    std::optional<std::string> partial_chunk_id;  // kept with trailing lines cut

    std::string render() const;
};

std::string_view prompt_template();  // the versioned asset, verbatim
inline constexpr std::string_view kPromptTemplateVersion = "v1";

// Length of the prompt for `query` with both blocks empty.
std::size_t skeleton_size(std::string_view query);

// Throws ConfigError when the query is empty or the budget cannot hold the
// skeleton. Chunks are dropped from the lowest rank upwards; the first chunk
// that does not fit may keep a prefix of whole lines.
PromptBundle construct_prompt(const RetrievedContext& ctx, const RetrievalConfig& cfg);

std::string render_chunk_entry(const ContextChunk& c);

// Inverse views used by the template generators.
struct PromptView {
    std::string documentation;
    std::string html;
    std::string query;
};
PromptView split_prompt(std::string_view prompt);

struct Intent {
    std::string verb;  // lexicon verb or "generic"
    std::string object;
    std::optional<std::string> page_hint;
};

Intent extract_intent(std::string_view query);
const std::vector<std::string>& verb_lexicon();

}  // namespace groundctl::rag
