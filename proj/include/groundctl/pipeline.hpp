#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "groundctl/dom.hpp"
#include "groundctl/embed.hpp"
#include "groundctl/ingest.hpp"
#include "groundctl/gen.hpp"
#include "groundctl/rag.hpp"
#include "groundctl/script.hpp"
#include "groundctl/store.hpp"

namespace groundctl::pipeline {

// A generation configuration: which context the prompt carries and which
// generator reads it.
enum class Arm { grounded, ungrounded, text_only, html_only, remote };

std::string to_string(Arm a);  // grounded, ungrounded, text-only, html-only, remote
std::optional<Arm> arm_from_string(std::string_view s);
std::string display_name(Arm a);
rag::ContextMode context_mode(Arm a);
gen::GeneratorKind generator_kind(Arm a);

struct Generation {
    rag::RetrievedContext context;
    rag::PromptBundle prompt;
    std::string prompt_text;
    std::string raw;  // generator output, code fences stripped
    std::variant<gen::ActionScript, gen::SyntaxError> parsed;

    const gen::ActionScript* script() const { return std::get_if<gen::ActionScript>(&parsed); }
};

// Retrieve, build the prompt, generate and parse. Generator failures other
// than ProviderError surface as a syntax error on line 0, since no script came
// back. Throws EmptyKnowledgeBase and ProviderError.
Generation generate(const store::VectorStore& store, const embed::Embedder& embedder, const gen::Generator& generator,
                    std::string_view query, const rag::RetrievalConfig& cfg, rag::ContextMode mode);

struct IndexReport {
    std::size_t chunks_indexed = 0;
    std::size_t store_size = 0;
    std::size_t html_recoveries = 0;
    std::vector<dom::IdCollision> collisions;  // duplicate ids found on ingested pages
};

// Chunk, embed and upsert. Sources already in the store are replaced, not
// merged. Throws DuplicateSource, ParseError, EncodingError, DimensionMismatch.
IndexReport index_documents(store::VectorStore& store, const embed::Embedder& embedder,
                            const std::vector<ingest::SourceDocument>& docs, const ingest::ChunkingConfig& cfg);

}  // namespace groundctl::pipeline
