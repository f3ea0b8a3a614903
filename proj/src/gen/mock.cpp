#include <algorithm>
#include <regex>
#include <set>

#include "groundctl/gen.hpp"
#include "groundctl/rag.hpp"
#include "groundctl/script.hpp"
#include "groundctl/text.hpp"

namespace groundctl::gen {

namespace {

constexpr std::int64_t kWaitMs = 5000;
constexpr int kDocBonus = 3;

const std::set<std::string, std::less<>> kStopwords{"a",  "an", "and", "at",   "by",   "for",  "from", "in",
                                                    "into", "is", "it",  "my",   "of",   "on",   "or",   "the",
                                                    "page", "this", "that", "to", "with", "your"};

std::vector<std::string> content_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (auto& t : text::tokenize(s)) {
        if (!kStopwords.count(t)) out.push_back(std::move(t));
    }
    return out;
}

using Bigram = std::pair<std::string, std::string>;

std::set<Bigram> bigrams_of(const std::vector<std::string>& toks) {
    std::set<Bigram> out;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) out.emplace(toks[i], toks[i + 1]);
    return out;
}

struct QueryTerms {
    rag::Intent intent;
    std::set<std::string> unigrams;
    std::set<Bigram> bigrams;
    std::optional<std::string> quoted;
};

QueryTerms query_terms(std::string_view query) {
    QueryTerms q;
    q.intent = rag::extract_intent(query);
    std::string rest(query);
    const std::size_t open = rest.find('"');
    if (open != std::string::npos) {
        const std::size_t close = rest.find('"', open + 1);
        if (close != std::string::npos) {
            q.quoted = rest.substr(open + 1, close - open - 1);
            rest.erase(open, close - open + 1);
        }
    }
    const auto toks = content_tokens(rest);
    q.unigrams.insert(toks.begin(), toks.end());
    q.bigrams = bigrams_of(toks);
    return q;
}

struct Candidate {
    std::string page;
    dom::ElementLine el;
    std::vector<dom::ElementLine> options;

    std::string attr(const std::string& k) const {
        const auto it = el.attrs.find(k);
        return it == el.attrs.end() ? "" : it->second;
    }
    bool is_link() const { return el.tag == "a" && el.attrs.count("href"); }
    bool is_button() const {
        const std::string t = attr("type");
        return el.tag == "button" || (el.tag == "input" && (t == "submit" || t == "button"));
    }
    bool input_like() const {
        if (el.tag == "textarea" || el.tag == "select") return true;
        if (el.tag != "input") return false;
        const std::string t = attr("type");
        return t != "submit" && t != "button" && t != "checkbox" && t != "radio";
    }
};

const std::set<std::string, std::less<>> kInteractive{"a", "button", "input", "select", "textarea"};

std::vector<Candidate> parse_html_block(std::string_view html) {
    std::vector<Candidate> out;
    std::set<std::string> seen;
    std::string page;
    std::optional<std::size_t> open_select;
    for (auto line : text::split_lines(html)) {
        constexpr std::string_view kPage = "--- page: ";
        if (line.substr(0, kPage.size()) == kPage) {
            auto rest = line.substr(kPage.size());
            page = std::string(rest.substr(0, rest.find(' ')));
            open_select.reset();
            continue;
        }
        const auto el = dom::parse_element_line(line);
        if (!el) continue;
        if (el->tag == "option") {
            if (open_select) out[*open_select].options.push_back(*el);
            continue;
        }
        open_select.reset();
        if (!el->id || !kInteractive.count(el->tag)) continue;
        if (!seen.insert(page + "#" + *el->id).second) continue;
        out.push_back({page, *el, {}});
        if (el->tag == "select") open_select = out.size() - 1;
    }
    return out;
}

std::vector<std::vector<std::string>> fields_of(const Candidate& c) {
    std::vector<std::vector<std::string>> f;
    if (c.el.id) f.push_back(content_tokens(*c.el.id));
    for (const auto& cls : c.el.classes) f.push_back(content_tokens(cls));
    for (const char* k : {"name", "placeholder", "type"}) {
        const std::string v = c.attr(k);
        if (!v.empty()) f.push_back(content_tokens(v));
    }
    f.push_back(content_tokens(c.el.text));
    return f;
}

int score(const Candidate& c, const QueryTerms& q, const std::set<std::string>& bonus_ids) {
    std::set<std::string> uni;
    std::set<Bigram> bi;
    for (const auto& field : fields_of(c)) {
        uni.insert(field.begin(), field.end());
        const auto b = bigrams_of(field);
        bi.insert(b.begin(), b.end());
    }
    int s = 0;
    for (const auto& t : q.unigrams) s += uni.count(t) ? 1 : 0;
    for (const auto& b : q.bigrams) s += bi.count(b) ? 1 : 0;
    if (c.el.id && bonus_ids.count(*c.el.id)) s += kDocBonus;
    return s;
}

bool plain_ident(std::string_view id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

dom::Locator locator_for_id(const std::string& id) {
    if (plain_ident(id)) return {dom::LocatorStrategy::by_css, "#" + id};
    return {dom::LocatorStrategy::by_id, id};
}

ActionStep nav(const std::string& page) {
    ActionStep s;
    s.action = Action::navigate;
    s.page = page;
    return s;
}

ActionStep on(Action a, const std::string& id) {
    ActionStep s;
    s.action = a;
    s.locator = locator_for_id(id);
    if (a == Action::wait_for) s.timeout_ms = kWaitMs;
    return s;
}

ActionStep type_into(const std::string& id, std::string value) {
    ActionStep s = on(Action::type_text, id);
    s.text = std::move(value);
    return s;
}

std::string default_value(const QueryTerms& q, std::string_view id, std::string_view type) {
    if (q.quoted) return *q.quoted;
    if (type == "email" || id.find("email") != std::string_view::npos) return "qa@example.com";
    if (type == "number") return "2";
    return "test";
}

std::string value_for(const Candidate& c, const QueryTerms& q) {
    if (c.el.tag == "select" && !q.quoted) {
        // Best-matching option, else the first one with a value.
        const std::string* first = nullptr;
        const std::string* best = nullptr;
        int best_score = 0;
        for (const auto& o : c.options) {
            const auto it = o.attrs.find("value");
            if (it == o.attrs.end() || it->second.empty()) continue;
            if (!first) first = &it->second;
            int s = 0;
            for (const auto& t : content_tokens(o.text + " " + it->second)) s += q.unigrams.count(t) ? 1 : 0;
            if (s > best_score) {
                best_score = s;
                best = &it->second;
            }
        }
        if (best) return *best;
        if (first) return *first;
    }
    return default_value(q, c.el.id.value_or(""), c.attr("type"));
}

struct UngroundedTemplate {
    const char* page;
    const char* input;  // "" for none
    const char* target;
};

UngroundedTemplate ungrounded_template(const std::string& verb) {
    static const std::vector<std::pair<std::string, UngroundedTemplate>> lexicon{
        {"add", {"home", "", "add-to-cart"}},
        {"remove", {"cart", "", "remove-item"}},
        {"update", {"cart", "quantity", "update-btn"}},
        {"search", {"home", "search", "search-btn"}},
        {"navigate", {"home", "", "product-link"}},
        {"complete", {"checkout", "email", "submit"}},
        {"apply", {"cart", "coupon", "apply-btn"}},
        {"sort", {"home", "", "sort-btn"}},
        {"filter", {"home", "", "filter-btn"}},
        {"view", {"home", "", "view-orders"}},
        {"write", {"product", "review", "submit"}},
        {"share", {"product", "", "share-btn"}},
        {"cancel", {"checkout", "", "cancel-btn"}},
    };
    for (const auto& [v, t] : lexicon) {
        if (v == verb) return t;
    }
    return {"home", "", "submit"};
}

std::vector<ActionStep> ungrounded_steps(const QueryTerms& q) {
    const auto t = ungrounded_template(q.intent.verb);
    std::vector<ActionStep> steps{nav(t.page)};
    if (*t.input) {
        steps.push_back(on(Action::wait_for, t.input));
        steps.push_back(type_into(t.input, default_value(q, t.input, "")));
    }
    steps.push_back(on(Action::wait_for, t.target));
    steps.push_back(on(Action::click, t.target));
    steps.push_back(on(Action::assert_present, t.target));
    return steps;
}

struct DocLine {
    std::string text;
    std::vector<std::string> ids;  // #references in order
    int score = 0;
};

std::optional<DocLine> best_doc_line(std::string_view docs, const QueryTerms& q) {
    static const std::regex kIdRef(R"(#([A-Za-z][A-Za-z0-9_-]*))");
    std::optional<DocLine> best;
    int best_score = 0;
    for (auto line : text::split_lines(docs)) {
        if (line.substr(0, 4) == "--- ") continue;
        int s = 0;
        std::set<std::string> toks;
        for (auto& t : content_tokens(line)) toks.insert(std::move(t));
        for (const auto& t : q.unigrams) s += toks.count(t) ? 1 : 0;
        if (s <= best_score) continue;
        best_score = s;
        DocLine d{std::string(line), {}, s};
        const std::string l(line);
        for (auto it = std::sregex_iterator(l.begin(), l.end(), kIdRef); it != std::sregex_iterator(); ++it) {
            const std::string id = (*it)[1];
            if (std::find(d.ids.begin(), d.ids.end(), id) == d.ids.end()) d.ids.push_back(id);
        }
        best = std::move(d);
    }
    return best;
}

std::vector<ActionStep> structural_steps(const std::vector<Candidate>& cands, const QueryTerms& q,
                                         const std::set<std::string>& bonus_ids) {
    const bool links_ok = q.intent.verb == "navigate" || q.intent.verb == "view";
    std::optional<std::size_t> best;
    int best_score = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].is_link() && !links_ok) continue;
        const int s = score(cands[i], q, bonus_ids);
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    if (!best) return ungrounded_steps(q);

    const Candidate& target = cands[*best];
    const std::string& id = *target.el.id;
    std::vector<ActionStep> steps{nav(target.page), on(Action::wait_for, id)};
    const Candidate* final_el = &target;
    if (target.input_like()) {
        steps.push_back(type_into(id, value_for(target, q)));
        const Candidate* companion = nullptr;
        int companion_score = -1;
        for (std::size_t i = *best + 1; i < cands.size(); ++i) {
            if (cands[i].page != target.page || !cands[i].is_button()) continue;
            const int s = score(cands[i], q, bonus_ids);
            if (s > companion_score) {
                companion_score = s;
                companion = &cands[i];
            }
        }
        if (companion) {
            steps.push_back(on(Action::wait_for, *companion->el.id));
            steps.push_back(on(Action::click, *companion->el.id));
            final_el = companion;
        }
    } else {
        steps.push_back(on(Action::click, id));
    }
    if (!final_el->is_link()) steps.push_back(on(Action::assert_present, *final_el->el.id));
    return steps;
}

std::optional<std::string> page_from_line(std::string_view line) {
    static const std::regex kPageRef(R"(\(([A-Za-z0-9_-]+) page\))");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(line.begin(), line.end(), m, kPageRef)) return m[1].str();
    return std::nullopt;
}

std::vector<ActionStep> text_only_steps(std::string_view docs, const QueryTerms& q) {
    const auto line = best_doc_line(docs, q);
    if (!line || line->ids.empty()) return ungrounded_steps(q);

    const std::string page = page_from_line(line->text).value_or(q.intent.page_hint.value_or("home"));
    std::vector<ActionStep> steps{nav(page)};

    const auto words = text::tokenize(line->text);
    const bool fills = std::any_of(words.begin(), words.end(), [](const std::string& w) {
        return w == "enter" || w == "type" || w == "write" || w == "fill";
    });
    std::string target;
    if (line->ids.size() >= 2 && fills) {
        const std::string& field = line->ids[0];
        steps.push_back(on(Action::wait_for, field));
        steps.push_back(type_into(field, default_value(q, field, "")));
        target = line->ids[1];
    } else {
        int best_score = -1;
        for (const auto& id : line->ids) {
            int s = 0;
            for (const auto& t : content_tokens(id)) s += q.unigrams.count(t) ? 1 : 0;
            if (s > best_score) {
                best_score = s;
                target = id;
            }
        }
    }
    steps.push_back(on(Action::wait_for, target));
    steps.push_back(on(Action::click, target));
    steps.push_back(on(Action::assert_present, target));
    return steps;
}

}  // namespace

MockGenerator::MockGenerator(GeneratorKind kind) : kind_(kind) {
    if (kind == GeneratorKind::remote_llm) throw ConfigError("remote_llm is not a mock generator");
}

std::string MockGenerator::generate(std::string_view prompt) const {
    const auto view = rag::split_prompt(prompt);
    const auto q = query_terms(view.query);

    std::vector<ActionStep> steps;
    switch (kind_) {
        case GeneratorKind::mock_ungrounded: steps = ungrounded_steps(q); break;
        case GeneratorKind::mock_text_only: steps = text_only_steps(view.documentation, q); break;
        case GeneratorKind::mock_grounded:
        case GeneratorKind::mock_html_only: {
            if (text::trim(view.html).empty()) throw NoGroundingContext();
            std::set<std::string> bonus;
            if (kind_ == GeneratorKind::mock_grounded) {
                // A line sharing a single word with the query is too weak to trust.
                const auto line = best_doc_line(view.documentation, q);
                if (line && line->score >= 2) bonus.insert(line->ids.begin(), line->ids.end());
            }
            steps = structural_steps(parse_html_block(view.html), q, bonus);
            break;
        }
        case GeneratorKind::remote_llm: break;
    }
    return render_script(steps);
}

std::string to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::remote_llm: return "remote_llm";
        case GeneratorKind::mock_grounded: return "mock_grounded";
        case GeneratorKind::mock_ungrounded: return "mock_ungrounded";
        case GeneratorKind::mock_text_only: return "mock_text_only";
        case GeneratorKind::mock_html_only: return "mock_html_only";
    }
    return "?";
}

std::optional<GeneratorKind> generator_kind_from_string(std::string_view s) {
    for (auto k : {GeneratorKind::remote_llm, GeneratorKind::mock_grounded, GeneratorKind::mock_ungrounded,
                   GeneratorKind::mock_text_only, GeneratorKind::mock_html_only}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::unique_ptr<Generator> make_generator(GeneratorKind kind) {
    if (kind == GeneratorKind::remote_llm) return std::make_unique<RemoteLlmGenerator>(RemoteLlmConfig::from_env());
    return std::make_unique<MockGenerator>(kind);
}

}  // namespace groundctl::gen
