#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "groundctl/error.hpp"

namespace groundctl::dom {

// Inner text kept per element, in bytes (cut on a code point boundary).
inline constexpr std::size_t kMaxInnerText = 200;

struct DomElement {
    std::string element_uid;  // "<page_id>:<dotted tree path>", assigned by DomIndex::build
    std::string page_id;
    std::string tag;  // lowercase
    std::optional<std::string> id_attr;
    std::vector<std::string> classes;  // document order, deduplicated
    std::optional<std::string> name_attr;
    std::map<std::string, std::string> other_attrs;  // href, type, value, placeholder
    std::string text;
    std::vector<int> tree_path;

    // Value of an attribute as the selector engine sees it ("class" joins classes).
    std::optional<std::string> attribute(std::string_view name) const;
};

struct CleanedHtml {
    std::string structural_text;  // one serialized element per line
    std::vector<DomElement> elements;
    std::size_t recoveries = 0;  // tags auto-closed or stray end tags dropped
};

// Strips scripts, styles and comments and serializes what is left, one element
// per line: tag#id.class1.class2[name="n"][type="t"] "inner text"
CleanedHtml clean_html(std::string_view raw);

std::string serialize_element(const DomElement& e);

// Reader for serialized lines, for consumers that only see structural text.
struct ElementLine {
    std::string tag;
    std::optional<std::string> id;
    std::vector<std::string> classes;
    std::map<std::string, std::string> attrs;  // includes name
    std::string text;
};
std::optional<ElementLine> parse_element_line(std::string_view line);

enum class LocatorStrategy { by_id, by_css, by_name };

struct Locator {
    LocatorStrategy strategy = LocatorStrategy::by_css;
    std::string value;

    friend bool operator==(const Locator&, const Locator&) = default;
};

std::string to_string(LocatorStrategy s);

class InvalidSelector : public Error {
public:
    explicit InvalidSelector(const std::string& what) : Error("invalid selector: " + what) {}
};

class UnknownPage : public Error {
public:
    explicit UnknownPage(const std::string& page_id)
        : Error("unknown page: " + page_id), page_id_(page_id) {}
    const std::string& page_id() const noexcept { return page_id_; }

private:
    std::string page_id_;
};

// Supported grammar: a compound of [tag][#id][.class]*[[attr="v"]] with at
// least one part, optionally preceded by one ancestor compound and a space.
struct CompoundSelector {
    std::optional<std::string> tag;
    std::optional<std::string> id;
    std::vector<std::string> classes;
    std::optional<std::pair<std::string, std::string>> attr;

    bool matches(const DomElement& e) const;
};

struct Selector {
    std::optional<CompoundSelector> ancestor;
    CompoundSelector subject;
};

Selector parse_selector(std::string_view css);

// Throws InvalidSelector for unsupported values.
void validate(const Locator& loc);

struct ResolveResult {
    enum class Kind { none, unique, ambiguous };

    std::vector<const DomElement*> matches;  // document order

    Kind kind() const {
        if (matches.empty()) return Kind::none;
        return matches.size() == 1 ? Kind::unique : Kind::ambiguous;
    }
    std::size_t count() const { return matches.size(); }
};

std::string to_string(ResolveResult::Kind k);

struct IdCollision {
    std::string page_id;
    std::string id;
    std::vector<std::string> element_uids;  // document order; first one wins lookups
};

class DomIndex {
public:
    DomIndex() = default;

    static DomIndex build(std::map<std::string, std::vector<DomElement>> pages);

    bool has_page(std::string_view page_id) const;
    std::vector<std::string> page_ids() const;
    const std::vector<DomElement>& elements(std::string_view page_id) const;  // throws UnknownPage

    std::optional<std::string> lookup_id(std::string_view page_id, std::string_view id) const;
    std::vector<std::string> lookup_name(std::string_view page_id, std::string_view name) const;
    const DomElement* find(std::string_view element_uid) const;

    const std::vector<IdCollision>& collisions() const { return collisions_; }
    std::size_t size() const;

private:
    struct Page {
        std::vector<DomElement> elements;
        std::vector<std::ptrdiff_t> parent;  // -1 for top-level elements
        std::unordered_map<std::string, std::vector<std::size_t>> by_id;
        std::unordered_map<std::string, std::vector<std::size_t>> by_name;
        std::unordered_map<std::string, std::vector<std::size_t>> by_tag;
        std::unordered_map<std::string, std::vector<std::size_t>> by_class;
    };

    const Page& page(std::string_view page_id) const;

    std::map<std::string, Page, std::less<>> pages_;
    std::unordered_map<std::string, std::pair<std::string, std::size_t>> uid_to_pos_;
    std::vector<IdCollision> collisions_;

    friend ResolveResult resolve(const DomIndex&, std::string_view, const Locator&);
};

// Throws UnknownPage, or InvalidSelector for css outside the supported grammar.
ResolveResult resolve(const DomIndex& index, std::string_view page_id, const Locator& loc);

}  // namespace groundctl::dom
