#include "groundctl/rag.hpp"

#include <algorithm>

#include "groundctl/text.hpp"
#include "prompt_template_asset.hpp"

namespace groundctl::rag {

namespace {

bool is_doc_type(ingest::SourceType t) { return t != ingest::SourceType::html; }

const store::TypeFilter kDocTypes{ingest::SourceType::markdown, ingest::SourceType::text,
                                  ingest::SourceType::json};
const store::TypeFilter kHtmlTypes{ingest::SourceType::html};

ContextChunk to_context(const store::VectorStore& store, const store::QueryResult& r, std::size_t rank,
                        bool backfilled) {
    const auto stored = store.get(r.chunk_id);
    if (!stored) throw Error("chunk vanished during retrieval: " + r.chunk_id);
    ContextChunk c;
    c.chunk_id = r.chunk_id;
    c.source_id = stored->chunk.source_id;
    c.source_type = stored->chunk.source_type;
    c.text = stored->chunk.text;
    c.score = r.score;
    c.rank = rank;
    c.backfilled = backfilled;
    return c;
}

// Chunk text must not be able to fake a prompt section.
std::string neutralize(std::string s) {
    s = text::replace_all(std::move(s), kDocDelimiter, "(DOCUMENTATION)");
    s = text::replace_all(std::move(s), kHtmlDelimiter, "(HTML STRUCTURE)");
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string chunk_header(const ContextChunk& c) {
    if (c.source_type == ingest::SourceType::html)
        return "--- page: " + ingest::page_id_for_source(c.source_id) + " (chunk " + c.chunk_id + ") ---";
    return "--- source: " + c.chunk_id + " ---";
}

// Single pass so placeholder-looking text inside chunks is left alone.
std::string fill_template(std::string_view docs, std::string_view html, std::string_view query) {
    const std::string_view tmpl = prompt_template();
    std::string out;
    out.reserve(tmpl.size() + docs.size() + html.size() + query.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t open = tmpl.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        const std::size_t close = tmpl.find('}', open);
        const std::string_view name =
            close == std::string_view::npos ? std::string_view{} : tmpl.substr(open + 1, close - open - 1);
        if (name == "docs") {
            out.append(docs);
        } else if (name == "html") {
            out.append(html);
        } else if (name == "query") {
            out.append(query);
        } else {
            out.push_back('{');
            pos = open + 1;
            continue;
        }
        pos = close + 1;
    }
    return out;
}

std::string single_line_query(std::string_view q) { return text::collapse_whitespace(text::trim(q)); }

void append_entry(std::string& block, std::string_view entry) {
    if (!block.empty()) block.push_back('\n');
    block.append(entry);
}

}  // namespace

void RetrievalConfig::validate() const {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (per_type_minimum > k) throw ConfigError("per_type_minimum must not exceed k");
}

std::vector<const ContextChunk*> RetrievedContext::ranked() const {
    std::vector<const ContextChunk*> all;
    for (const auto& c : doc_chunks) all.push_back(&c);
    for (const auto& c : html_chunks) all.push_back(&c);
    std::sort(all.begin(), all.end(), [](const ContextChunk* a, const ContextChunk* b) { return a->rank < b->rank; });
    return all;
}

RetrievedContext retrieve_context(const store::VectorStore& store, const embed::Embedder& embedder,
                                  std::string_view query, const RetrievalConfig& cfg, ContextMode mode) {
    cfg.validate();
    if (store.size() == 0) throw EmptyKnowledgeBase();

    RetrievedContext ctx;
    ctx.query = single_line_query(query);
    if (mode == ContextMode::none) return ctx;

    const auto vq = embedder.embed(ctx.query);
    store::TypeFilter filter;
    if (mode == ContextMode::docs_only) filter = kDocTypes;
    if (mode == ContextMode::html_only) filter = kHtmlTypes;

    const auto results = store.query(vq, cfg.k, filter);
    ctx.candidates = results.size();
    std::size_t rank = 0;
    for (const auto& r : results) {
        auto c = to_context(store, r, ++rank, false);
        (is_doc_type(c.source_type) ? ctx.doc_chunks : ctx.html_chunks).push_back(std::move(c));
    }

    if (mode == ContextMode::full && cfg.per_type_minimum > 0) {
        const auto backfill = [&](std::vector<ContextChunk>& part, const store::TypeFilter& f,
                                  ingest::SourceType probe) {
            if (!part.empty()) return;
            const bool present = probe == ingest::SourceType::html
                                     ? store.contains_type(ingest::SourceType::html)
                                     : store.contains_type(ingest::SourceType::markdown) ||
                                           store.contains_type(ingest::SourceType::text) ||
                                           store.contains_type(ingest::SourceType::json);
            if (!present) return;
            for (const auto& r : store.query(vq, cfg.per_type_minimum, f))
                part.push_back(to_context(store, r, ++rank, true));
        };
        backfill(ctx.doc_chunks, kDocTypes, ingest::SourceType::markdown);
        backfill(ctx.html_chunks, kHtmlTypes, ingest::SourceType::html);
    }
    return ctx;
}

std::string_view prompt_template() { return kPromptTemplateAsset; }

std::size_t skeleton_size(std::string_view query) { return fill_template("", "", single_line_query(query)).size(); }

std::string render_chunk_entry(const ContextChunk& c) { return chunk_header(c) + "\n" + neutralize(c.text); }

std::string PromptBundle::render() const { return fill_template(documentation_block, html_block, user_query); }

PromptBundle construct_prompt(const RetrievedContext& ctx, const RetrievalConfig& cfg) {
    cfg.validate();
    PromptBundle p;
    p.user_query = single_line_query(ctx.query);
    if (p.user_query.empty()) throw ConfigError("query must not be empty");
    p.char_budget = cfg.char_budget;

    const std::string_view tmpl = prompt_template();
    p.system_instructions = std::string(text::trim(tmpl.substr(0, tmpl.find(kDocDelimiter))));
    const std::size_t cons = tmpl.find("CONSTRAINTS:");
    if (cons != std::string_view::npos) {
        for (auto line : text::split_lines(tmpl.substr(cons))) {
            if (line.substr(0, 2) == "- ") p.constraints.emplace_back(line.substr(2));
        }
    }

    const std::size_t skeleton = skeleton_size(p.user_query);
    if (skeleton > cfg.char_budget)
        throw ConfigError("char_budget " + std::to_string(cfg.char_budget) + " is smaller than the prompt skeleton (" +
                          std::to_string(skeleton) + " chars)");

    const auto ranked = ctx.ranked();
    std::size_t i = 0;
    for (; i < ranked.size(); ++i) {
        const ContextChunk& c = *ranked[i];
        std::string& block = is_doc_type(c.source_type) ? p.documentation_block : p.html_block;
        const std::string saved = block;
        append_entry(block, render_chunk_entry(c));
        if (p.render().size() <= cfg.char_budget) {
            p.included_chunk_ids.push_back(c.chunk_id);
            continue;
        }

        // Keep as many whole lines of this chunk as still fit, then stop.
        block = saved;
        const std::string body = neutralize(c.text);
        const auto lines = text::split_lines(body);
        std::string entry = chunk_header(c);
        std::size_t kept = 0;
        for (auto line : lines) {
            std::string attempt = block;
            append_entry(attempt, entry + "\n" + std::string(line));
            std::swap(block, attempt);
            const bool fits = p.render().size() <= cfg.char_budget;
            std::swap(block, attempt);
            if (!fits) break;
            entry += "\n" + std::string(line);
            ++kept;
        }
        if (kept > 0) {
            append_entry(block, entry);
            p.included_chunk_ids.push_back(c.chunk_id);
            p.partial_chunk_id = c.chunk_id;
        } else {
            p.dropped_chunk_ids.push_back(c.chunk_id);
        }
        ++i;
        break;
    }
    for (; i < ranked.size(); ++i) p.dropped_chunk_ids.push_back(ranked[i]->chunk_id);
    return p;
}

PromptView split_prompt(std::string_view prompt) {
    PromptView v;
    const std::string doc_open = std::string(kDocDelimiter) + "\n";
    const std::string html_open = std::string(kHtmlDelimiter) + "\n";
    const std::string doc_close = "\n\n" + std::string(kHtmlDelimiter);
    const std::string html_close = "\n\n" + std::string(kQueryMarker);

    const std::size_t d = prompt.find(doc_open);
    const std::size_t dc = prompt.find(doc_close);
    if (d != std::string_view::npos && dc != std::string_view::npos && dc >= d + doc_open.size())
        v.documentation = std::string(prompt.substr(d + doc_open.size(), dc - d - doc_open.size()));

    const std::size_t h = prompt.find(html_open);
    const std::size_t hc = prompt.rfind(html_close);
    if (h != std::string_view::npos && hc != std::string_view::npos && hc >= h + html_open.size())
        v.html = std::string(prompt.substr(h + html_open.size(), hc - h - html_open.size()));

    if (hc != std::string_view::npos) {
        const std::size_t q = hc + html_close.size();
        const std::size_t eol = prompt.find('\n', q);
        v.query = std::string(prompt.substr(q, eol == std::string_view::npos ? std::string_view::npos : eol - q));
    }
    return v;
}

const std::vector<std::string>& verb_lexicon() {
    static const std::vector<std::string> verbs{"add",   "remove", "update", "search", "navigate",
                                                "complete", "apply", "sort",  "filter", "view",
                                                "write", "share",  "cancel"};
    return verbs;
}

Intent extract_intent(std::string_view query) {
    Intent intent;
    const std::string_view q = text::trim(query);
    const std::size_t sp = q.find_first_of(" \t");
    const std::string first = text::to_lower_ascii(q.substr(0, sp));
    const auto& verbs = verb_lexicon();
    if (std::find(verbs.begin(), verbs.end(), first) != verbs.end()) {
        intent.verb = first;
        intent.object = sp == std::string_view::npos ? "" : std::string(text::trim(q.substr(sp)));
    } else {
        intent.verb = "generic";
        intent.object = std::string(q);
    }

    static const std::vector<std::pair<std::string, std::string>> hints{
        {"cart", "cart"},       {"checkout", "checkout"}, {"payment", "checkout"}, {"shipping", "checkout"},
        {"order", "checkout"},  {"review", "product"},    {"wishlist", "product"}, {"detail", "product"},
        {"product", "product"},
    };
    for (const auto& tok : text::tokenize(intent.object)) {
        const auto it = std::find_if(hints.begin(), hints.end(), [&](const auto& h) { return h.first == tok; });
        if (it != hints.end()) {
            intent.page_hint = it->second;
            break;
        }
    }
    return intent;
}

}  // namespace groundctl::rag
