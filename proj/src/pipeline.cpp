#include "groundctl/pipeline.hpp"

namespace groundctl::pipeline {

std::string to_string(Arm a) {
    switch (a) {
        case Arm::grounded: return "grounded";
        case Arm::ungrounded: return "ungrounded";
        case Arm::text_only: return "text-only";
        case Arm::html_only: return "html-only";
        case Arm::remote: return "remote";
    }
    return "?";
}

std::optional<Arm> arm_from_string(std::string_view s) {
    for (auto a : {Arm::grounded, Arm::ungrounded, Arm::text_only, Arm::html_only, Arm::remote}) {
        if (to_string(a) == s) return a;
    }
    return std::nullopt;
}

std::string display_name(Arm a) {
    switch (a) {
        case Arm::grounded: return "Full RAG (Text + HTML)";
        case Arm::ungrounded: return "Standard LLM";
        case Arm::text_only: return "Text-Only RAG";
        case Arm::html_only: return "HTML-Only RAG";
        case Arm::remote: return "Remote LLM (Text + HTML)";
    }
    return "?";
}

rag::ContextMode context_mode(Arm a) {
    switch (a) {
        case Arm::grounded:
        case Arm::remote: return rag::ContextMode::full;
        case Arm::ungrounded: return rag::ContextMode::none;
        case Arm::text_only: return rag::ContextMode::docs_only;
        case Arm::html_only: return rag::ContextMode::html_only;
    }
    return rag::ContextMode::full;
}

gen::GeneratorKind generator_kind(Arm a) {
    switch (a) {
        case Arm::grounded: return gen::GeneratorKind::mock_grounded;
        case Arm::ungrounded: return gen::GeneratorKind::mock_ungrounded;
        case Arm::text_only: return gen::GeneratorKind::mock_text_only;
        case Arm::html_only: return gen::GeneratorKind::mock_html_only;
        case Arm::remote: return gen::GeneratorKind::remote_llm;
    }
    return gen::GeneratorKind::mock_grounded;
}

Generation generate(const store::VectorStore& store, const embed::Embedder& embedder, const gen::Generator& generator,
                    std::string_view query, const rag::RetrievalConfig& cfg, rag::ContextMode mode) {
    Generation g;
    g.context = rag::retrieve_context(store, embedder, query, cfg, mode);
    g.prompt = rag::construct_prompt(g.context, cfg);
    g.prompt_text = g.prompt.render();
    try {
        g.raw = gen::strip_code_fences(generator.generate(g.prompt_text));
    } catch (const ProviderError&) {
        throw;
    } catch (const Error& e) {
        g.parsed = gen::SyntaxError{0, std::string("generation failed: ") + e.what()};
        return g;
    }
    g.parsed = gen::parse_script(g.raw);
    return g;
}

IndexReport index_documents(store::VectorStore& store, const embed::Embedder& embedder,
                            const std::vector<ingest::SourceDocument>& docs, const ingest::ChunkingConfig& cfg) {
    auto corpus = ingest::ingest_corpus(docs, cfg);

    std::vector<std::string> texts;
    texts.reserve(corpus.chunks.size());
    for (const auto& c : corpus.chunks) texts.push_back(c.text);
    auto vectors = embedder.embed_batch(texts);

    std::vector<store::StoredChunk> batch;
    batch.reserve(corpus.chunks.size());
    for (std::size_t i = 0; i < corpus.chunks.size(); ++i)
        batch.push_back({std::move(corpus.chunks[i]), std::move(vectors[i])});

    IndexReport r;
    r.chunks_indexed = batch.size();
    r.html_recoveries = corpus.html_recoveries;
    r.collisions = dom::DomIndex::build(std::move(corpus.pages)).collisions();
    for (const auto& d : docs) store.erase_source(d.source_id);
    r.store_size = store.upsert(std::move(batch));
    return r;
}

}  // namespace groundctl::pipeline
