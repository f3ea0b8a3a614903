#include <algorithm>
#include <cctype>
#include <map>

#include "groundctl/dom.hpp"
#include "groundctl/text.hpp"

namespace groundctl::dom {

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

class SelectorParser {
public:
    explicit SelectorParser(std::string_view src) : src_(src) {}

    Selector parse() {
        skip_ws();
        if (at_end()) fail("empty selector");
        CompoundSelector first = compound();
        const bool had_space = skip_ws();
        if (at_end()) return Selector{std::nullopt, std::move(first)};
        if (!had_space) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        CompoundSelector second = compound();
        skip_ws();
        if (!at_end()) fail("only one descendant level is supported");
        return Selector{std::move(first), std::move(second)};
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw InvalidSelector(std::string(src_) + " (" + why + ")");
    }

    bool at_end() const { return pos_ >= src_.size(); }

    bool skip_ws() {
        const std::size_t b = pos_;
        while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        return pos_ > b;
    }

    std::string ident() {
        const std::size_t b = pos_;
        while (!at_end() && is_ident_char(src_[pos_])) ++pos_;
        if (pos_ == b) fail("expected identifier");
        return std::string(src_.substr(b, pos_ - b));
    }

    CompoundSelector compound() {
        CompoundSelector c;
        bool any = false;
        if (!at_end() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) {
            c.tag = text::to_lower_ascii(ident());
            any = true;
        }
        while (!at_end()) {
            const char ch = src_[pos_];
            if (ch == '#') {
                if (c.id) fail("more than one id");
                if (c.attr) fail("attribute must come last");
                ++pos_;
                c.id = ident();
            } else if (ch == '.') {
                if (c.attr) fail("attribute must come last");
                ++pos_;
                c.classes.push_back(ident());
            } else if (ch == '[') {
                if (c.attr) fail("more than one attribute");
                ++pos_;
                std::string name = text::to_lower_ascii(ident());
                if (at_end() || src_[pos_] != '=') fail("only [attr=\"value\"] is supported");
                ++pos_;
                std::string value;
                if (!at_end() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    const char q = src_[pos_++];
                    const std::size_t end = src_.find(q, pos_);
                    if (end == std::string_view::npos) fail("unterminated string");
                    value = std::string(src_.substr(pos_, end - pos_));
                    pos_ = end + 1;
                } else {
                    value = ident();
                }
                if (at_end() || src_[pos_] != ']') fail("expected ']'");
                ++pos_;
                c.attr = std::make_pair(std::move(name), std::move(value));
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                break;
            } else {
                fail("unsupported syntax '" + std::string(1, ch) + "'");
            }
            any = true;
        }
        if (!any) fail("empty compound");
        return c;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

std::string join_path(const std::vector<int>& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s.push_back('.');
        s += std::to_string(path[i]);
    }
    return s;
}

}  // namespace

bool CompoundSelector::matches(const DomElement& e) const {
    if (tag && e.tag != *tag) return false;
    if (id && e.id_attr != *id) return false;
    for (const auto& c : classes) {
        if (std::find(e.classes.begin(), e.classes.end(), c) == e.classes.end()) return false;
    }
    if (attr && e.attribute(attr->first) != attr->second) return false;
    return true;
}

Selector parse_selector(std::string_view css) { return SelectorParser(css).parse(); }

void validate(const Locator& loc) {
    if (loc.value.empty()) throw InvalidSelector("empty locator value");
    if (loc.strategy == LocatorStrategy::by_css) parse_selector(loc.value);
}

std::string to_string(LocatorStrategy s) {
    switch (s) {
        case LocatorStrategy::by_id: return "by_id";
        case LocatorStrategy::by_css: return "by_css";
        case LocatorStrategy::by_name: return "by_name";
    }
    return "by_css";
}

std::string to_string(ResolveResult::Kind k) {
    switch (k) {
        case ResolveResult::Kind::none: return "none";
        case ResolveResult::Kind::unique: return "unique";
        case ResolveResult::Kind::ambiguous: return "ambiguous";
    }
    return "none";
}

DomIndex DomIndex::build(std::map<std::string, std::vector<DomElement>> pages) {
    DomIndex index;
    for (auto& [page_id, elements] : pages) {
        Page page;
        std::map<std::vector<int>, std::size_t> by_path;
        for (std::size_t i = 0; i < elements.size(); ++i) {
            DomElement& e = elements[i];
            e.page_id = page_id;
            e.element_uid = page_id + ":" + join_path(e.tree_path);
            if (!by_path.emplace(e.tree_path, i).second)
                throw ConfigError("duplicate tree path " + e.element_uid);
        }
        page.parent.assign(elements.size(), -1);
        for (std::size_t i = 0; i < elements.size(); ++i) {
            const DomElement& e = elements[i];
            if (e.tree_path.size() > 1) {
                std::vector<int> up(e.tree_path.begin(), e.tree_path.end() - 1);
                const auto it = by_path.find(up);
                if (it != by_path.end()) page.parent[i] = static_cast<std::ptrdiff_t>(it->second);
            }
            if (e.id_attr) page.by_id[*e.id_attr].push_back(i);
            if (e.name_attr) page.by_name[*e.name_attr].push_back(i);
            page.by_tag[e.tag].push_back(i);
            for (const auto& c : e.classes) page.by_class[c].push_back(i);
            index.uid_to_pos_[e.element_uid] = {page_id, i};
        }
        page.elements = std::move(elements);
        std::vector<std::pair<std::size_t, std::string>> dups;
        for (const auto& [id, positions] : page.by_id) {
            if (positions.size() > 1) dups.emplace_back(positions.front(), id);
        }
        std::sort(dups.begin(), dups.end());
        for (const auto& [first, id] : dups) {
            IdCollision c{page_id, id, {}};
            for (std::size_t p : page.by_id[id]) c.element_uids.push_back(page.elements[p].element_uid);
            index.collisions_.push_back(std::move(c));
        }
        index.pages_.emplace(page_id, std::move(page));
    }
    return index;
}

bool DomIndex::has_page(std::string_view page_id) const { return pages_.find(page_id) != pages_.end(); }

std::vector<std::string> DomIndex::page_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, page] : pages_) ids.push_back(id);
    return ids;
}

const DomIndex::Page& DomIndex::page(std::string_view page_id) const {
    const auto it = pages_.find(page_id);
    if (it == pages_.end()) throw UnknownPage(std::string(page_id));
    return it->second;
}

const std::vector<DomElement>& DomIndex::elements(std::string_view page_id) const {
    return page(page_id).elements;
}

std::optional<std::string> DomIndex::lookup_id(std::string_view page_id, std::string_view id) const {
    const Page& p = page(page_id);
    const auto it = p.by_id.find(std::string(id));
    if (it == p.by_id.end()) return std::nullopt;
    return p.elements[it->second.front()].element_uid;
}

std::vector<std::string> DomIndex::lookup_name(std::string_view page_id, std::string_view name) const {
    const Page& p = page(page_id);
    std::vector<std::string> uids;
    const auto it = p.by_name.find(std::string(name));
    if (it == p.by_name.end()) return uids;
    for (std::size_t i : it->second) uids.push_back(p.elements[i].element_uid);
    return uids;
}

const DomElement* DomIndex::find(std::string_view element_uid) const {
    const auto it = uid_to_pos_.find(std::string(element_uid));
    if (it == uid_to_pos_.end()) return nullptr;
    return &pages_.find(it->second.first)->second.elements[it->second.second];
}

std::size_t DomIndex::size() const {
    std::size_t n = 0;
    for (const auto& [id, page] : pages_) n += page.elements.size();
    return n;
}

ResolveResult resolve(const DomIndex& index, std::string_view page_id, const Locator& loc) {
    const DomIndex::Page& page = index.page(page_id);
    if (loc.value.empty()) throw InvalidSelector("empty locator value");

    ResolveResult result;
    const auto collect = [&](const std::unordered_map<std::string, std::vector<std::size_t>>& map,
                             const std::string& key) {
        const auto it = map.find(key);
        if (it == map.end()) return;
        for (std::size_t i : it->second) result.matches.push_back(&page.elements[i]);
    };

    switch (loc.strategy) {
        case LocatorStrategy::by_id:
            collect(page.by_id, loc.value);
            return result;
        case LocatorStrategy::by_name:
            collect(page.by_name, loc.value);
            return result;
        case LocatorStrategy::by_css:
            break;
    }

    const Selector sel = parse_selector(loc.value);
    const CompoundSelector& subject = sel.subject;

    // Narrowest posting list available for the subject.
    const std::vector<std::size_t>* candidates = nullptr;
    static const std::vector<std::size_t> kEmpty;
    const auto posting = [&](const auto& map, const std::string& key) -> const std::vector<std::size_t>* {
        const auto it = map.find(key);
        return it == map.end() ? &kEmpty : &it->second;
    };
    if (subject.id) {
        candidates = posting(page.by_id, *subject.id);
    } else if (!subject.classes.empty()) {
        candidates = posting(page.by_class, subject.classes.front());
    } else if (subject.tag) {
        candidates = posting(page.by_tag, *subject.tag);
    }

    const auto accept = [&](std::size_t i) {
        if (!subject.matches(page.elements[i])) return;
        if (sel.ancestor) {
            bool found = false;
            for (std::ptrdiff_t p = page.parent[i]; p >= 0; p = page.parent[static_cast<std::size_t>(p)]) {
                if (sel.ancestor->matches(page.elements[static_cast<std::size_t>(p)])) {
                    found = true;
                    break;
                }
            }
            if (!found) return;
        }
        result.matches.push_back(&page.elements[i]);
    };

    if (candidates) {
        for (std::size_t i : *candidates) accept(i);
    } else {
        for (std::size_t i = 0; i < page.elements.size(); ++i) accept(i);
    }
    return result;
}

}  // namespace groundctl::dom
