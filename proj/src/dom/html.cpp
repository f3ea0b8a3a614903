#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <set>

#include "groundctl/dom.hpp"
#include "groundctl/text.hpp"

namespace groundctl::dom {

namespace {

constexpr std::array kVoidTags = {"area", "base", "br",   "col",   "embed", "hr",    "img",
                                  "input", "link", "meta", "param", "source", "track", "wbr"};
// Subtrees skipped wholesale; their content never reaches the structural view.
constexpr std::array kRawDropped = {"script", "style", "noscript", "template"};
constexpr std::array kRcdata = {"textarea", "title"};
// Void tags with no structural value.
constexpr std::array kMetadataTags = {"meta", "link", "base"};
constexpr std::array kWrapperTags = {"html", "head", "body"};
constexpr std::array kKeptAttrs = {"href", "type", "value", "placeholder"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& set, std::string_view tag) {
    return std::any_of(set.begin(), set.end(), [&](const char* s) { return tag == s; });
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        const std::size_t semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(s[i++]);
            continue;
        }
        const std::string_view name = s.substr(i + 1, semi - i - 1);
        bool ok = true;
        if (name == "amp") {
            out.push_back('&');
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (name == "nbsp") {
            out.push_back(' ');
        } else if (name.size() > 1 && name[0] == '#') {
            const bool hex = name[1] == 'x' || name[1] == 'X';
            const std::string_view digits = name.substr(hex ? 2 : 1);
            std::uint32_t cp = 0;
            for (char c : digits) {
                const int v = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                              : hex && std::isxdigit(static_cast<unsigned char>(c))
                                  ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
                                  : -1;
                if (v < 0 || cp > 0x10FFFF) {
                    ok = false;
                    break;
                }
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
            }
            if (ok && !digits.empty()) {
                append_utf8(out, cp);
            } else {
                ok = false;
            }
        } else {
            ok = false;
        }
        if (ok) {
            i = semi + 1;
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

struct Node {
    std::string tag;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::ptrdiff_t parent = -1;
    std::vector<std::size_t> children;  // element children
    std::string text;                   // descendant text, assembled after parsing
    std::vector<std::pair<std::size_t, std::string>> own_text;  // (position among children, text)
};

class TreeBuilder {
public:
    explicit TreeBuilder(std::string_view src) : src_(src) {}

    void run() {
        while (pos_ < src_.size()) {
            if (src_[pos_] == '<') {
                if (starts_with("<!--")) {
                    const std::size_t end = src_.find("-->", pos_ + 4);
                    pos_ = end == std::string_view::npos ? src_.size() : end + 3;
                } else if (starts_with("<!") || starts_with("<?")) {
                    const std::size_t end = src_.find('>', pos_);
                    pos_ = end == std::string_view::npos ? src_.size() : end + 1;
                } else if (starts_with("</")) {
                    end_tag();
                } else if (pos_ + 1 < src_.size() &&
                           std::isalpha(static_cast<unsigned char>(src_[pos_ + 1]))) {
                    start_tag();
                } else {
                    add_text("<");
                    ++pos_;
                }
            } else {
                const std::size_t next = src_.find('<', pos_);
                const std::size_t end = next == std::string_view::npos ? src_.size() : next;
                add_text(decode_entities(src_.substr(pos_, end - pos_)));
                pos_ = end;
            }
        }
        for (std::size_t i = open_.size(); i-- > 0;) {
            if (!contains(kWrapperTags, nodes_[open_[i]].tag)) ++recoveries_;
        }
        open_.clear();
    }

    std::vector<Node>& nodes() { return nodes_; }
    const std::vector<std::size_t>& roots() const { return roots_; }
    std::size_t recoveries() const { return recoveries_; }

private:
    bool starts_with(std::string_view p) const { return src_.substr(pos_, p.size()) == p; }

    std::string read_name() {
        const std::size_t b = pos_;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '>' || c == '/' || c == '=') break;
            ++pos_;
        }
        return text::to_lower_ascii(src_.substr(b, pos_ - b));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    // Position just past the matching close tag of a raw-text element, and the
    // start of that close tag.
    std::pair<std::size_t, std::size_t> find_raw_end(std::string_view tag) const {
        const std::string lowered = text::to_lower_ascii(src_.substr(pos_));
        const std::string needle = "</" + std::string(tag);
        std::size_t at = 0;
        while ((at = lowered.find(needle, at)) != std::string::npos) {
            const std::size_t after = at + needle.size();
            if (after >= lowered.size() || lowered[after] == '>' ||
                std::isspace(static_cast<unsigned char>(lowered[after])) || lowered[after] == '/') {
                const std::size_t gt = lowered.find('>', after);
                const std::size_t stop = gt == std::string::npos ? lowered.size() : gt + 1;
                return {pos_ + stop, pos_ + at};
            }
            at = after;
        }
        return {src_.size(), src_.size()};
    }

    void start_tag() {
        ++pos_;
        const std::string tag = read_name();
        std::vector<std::pair<std::string, std::string>> attrs;
        bool self_closing = false;
        while (pos_ < src_.size()) {
            skip_ws();
            if (pos_ >= src_.size()) break;
            if (src_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (src_[pos_] == '/') {
                ++pos_;
                self_closing = true;
                continue;
            }
            std::string name = read_name();
            if (name.empty()) {
                ++pos_;  // junk such as a lone '='
                continue;
            }
            self_closing = false;
            skip_ws();
            std::string value;
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                skip_ws();
                if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    const char q = src_[pos_++];
                    const std::size_t end = src_.find(q, pos_);
                    const std::size_t stop = end == std::string_view::npos ? src_.size() : end;
                    value = decode_entities(src_.substr(pos_, stop - pos_));
                    pos_ = std::min(src_.size(), stop + 1);
                } else {
                    const std::size_t b = pos_;
                    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
                           src_[pos_] != '>')
                        ++pos_;
                    value = decode_entities(src_.substr(b, pos_ - b));
                }
            }
            const bool seen = std::any_of(attrs.begin(), attrs.end(),
                                          [&](const auto& a) { return a.first == name; });
            if (!seen) attrs.emplace_back(std::move(name), std::move(value));
        }

        if (contains(kRawDropped, tag)) {
            if (!self_closing) pos_ = find_raw_end(tag).first;
            return;
        }
        if (contains(kMetadataTags, tag)) return;

        close_implied(tag);
        push_node(tag, std::move(attrs));
        if (contains(kRcdata, tag)) {
            const auto [after, close_at] = find_raw_end(tag);
            add_text(decode_entities(src_.substr(pos_, close_at - pos_)));
            pos_ = after;
            open_.pop_back();
            return;
        }
        if (contains(kVoidTags, tag) || self_closing) open_.pop_back();
    }

    void end_tag() {
        pos_ += 2;
        const std::string tag = read_name();
        const std::size_t gt = src_.find('>', pos_);
        pos_ = gt == std::string_view::npos ? src_.size() : gt + 1;
        if (tag.empty() || contains(kVoidTags, tag)) return;
        for (std::size_t i = open_.size(); i-- > 0;) {
            if (nodes_[open_[i]].tag == tag) {
                recoveries_ += open_.size() - 1 - i;
                open_.resize(i);
                return;
            }
        }
        if (!contains(kWrapperTags, tag)) ++recoveries_;
    }

    // Tags whose start implicitly ends an open sibling of the same family.
    void close_implied(const std::string& tag) {
        static const std::map<std::string, std::set<std::string>, std::less<>> closes = {
            {"li", {"li"}},       {"option", {"option"}}, {"p", {"p"}},
            {"tr", {"tr", "td", "th"}}, {"td", {"td", "th"}}, {"th", {"td", "th"}},
            {"dt", {"dt", "dd"}}, {"dd", {"dt", "dd"}},
        };
        const auto it = closes.find(tag);
        if (it == closes.end()) return;
        while (!open_.empty() && it->second.count(nodes_[open_.back()].tag) > 0) open_.pop_back();
    }

    std::size_t push_node(const std::string& tag, std::vector<std::pair<std::string, std::string>> attrs) {
        Node n;
        n.tag = tag;
        n.attrs = std::move(attrs);
        n.parent = open_.empty() ? -1 : static_cast<std::ptrdiff_t>(open_.back());
        const std::size_t idx = nodes_.size();
        nodes_.push_back(std::move(n));
        if (open_.empty()) {
            roots_.push_back(idx);
        } else {
            nodes_[open_.back()].children.push_back(idx);
        }
        open_.push_back(idx);
        return idx;
    }

    void add_text(std::string t) {
        if (open_.empty() || t.empty()) return;
        Node& cur = nodes_[open_.back()];
        cur.own_text.emplace_back(cur.children.size(), std::move(t));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::size_t> roots_;
    std::vector<std::size_t> open_;
    std::size_t recoveries_ = 0;
};

// Element boundaries contribute a space so adjacent inline words stay apart.
void gather_text(const std::vector<Node>& nodes, std::size_t idx, std::string& out) {
    const Node& n = nodes[idx];
    std::size_t t = 0;
    for (std::size_t c = 0; c <= n.children.size(); ++c) {
        while (t < n.own_text.size() && n.own_text[t].first == c) out += n.own_text[t++].second;
        if (c < n.children.size()) {
            out.push_back(' ');
            gather_text(nodes, n.children[c], out);
            out.push_back(' ');
        }
    }
}

std::string escape_quoted(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

void emit(const std::vector<Node>& nodes, std::size_t idx, std::vector<int> path, CleanedHtml& out) {
    const Node& n = nodes[idx];
    DomElement e;
    e.tag = n.tag;
    for (const auto& [k, v] : n.attrs) {
        if (k == "id") {
            if (!v.empty()) e.id_attr = v;
        } else if (k == "class") {
            std::size_t b = 0;
            while (b < v.size()) {
                while (b < v.size() && std::isspace(static_cast<unsigned char>(v[b]))) ++b;
                std::size_t end = b;
                while (end < v.size() && !std::isspace(static_cast<unsigned char>(v[end]))) ++end;
                if (end > b) {
                    std::string cls = v.substr(b, end - b);
                    if (std::find(e.classes.begin(), e.classes.end(), cls) == e.classes.end())
                        e.classes.push_back(std::move(cls));
                }
                b = end;
            }
        } else if (k == "name") {
            e.name_attr = v;
        } else if (contains(kKeptAttrs, k)) {
            e.other_attrs[k] = v;
        }
    }
    std::string raw;
    gather_text(nodes, idx, raw);
    e.text = std::string(text::utf8_prefix(text::collapse_whitespace(raw), kMaxInnerText));
    // A cut can leave a trailing space behind.
    while (!e.text.empty() && e.text.back() == ' ') e.text.pop_back();
    e.tree_path = path;
    out.structural_text += serialize_element(e);
    out.structural_text.push_back('\n');
    out.elements.push_back(std::move(e));
    for (std::size_t c = 0; c < n.children.size(); ++c) {
        std::vector<int> child = path;
        child.push_back(static_cast<int>(c));
        emit(nodes, n.children[c], std::move(child), out);
    }
}

}  // namespace

std::optional<std::string> DomElement::attribute(std::string_view name) const {
    if (name == "id") return id_attr;
    if (name == "name") return name_attr;
    if (name == "class") {
        if (classes.empty()) return std::nullopt;
        std::string joined;
        for (const auto& c : classes) {
            if (!joined.empty()) joined.push_back(' ');
            joined += c;
        }
        return joined;
    }
    const auto it = other_attrs.find(std::string(name));
    if (it == other_attrs.end()) return std::nullopt;
    return it->second;
}

CleanedHtml clean_html(std::string_view raw) {
    const std::string src = text::sanitize_utf8(raw);
    TreeBuilder builder(src);
    builder.run();
    CleanedHtml out;
    out.recoveries = builder.recoveries();
    const auto& roots = builder.roots();
    for (std::size_t r = 0; r < roots.size(); ++r) {
        emit(builder.nodes(), roots[r], {static_cast<int>(r)}, out);
    }
    return out;
}

std::string serialize_element(const DomElement& e) {
    std::string line = e.tag;
    if (e.id_attr) line += "#" + *e.id_attr;
    for (const auto& c : e.classes) line += "." + c;
    if (e.name_attr) line += "[name=\"" + escape_quoted(*e.name_attr) + "\"]";
    for (const auto& [k, v] : e.other_attrs) line += "[" + k + "=\"" + escape_quoted(v) + "\"]";
    if (!e.text.empty()) line += " \"" + escape_quoted(e.text) + "\"";
    return line;
}

std::optional<ElementLine> parse_element_line(std::string_view line) {
    line = text::trim(line);
    if (line.empty()) return std::nullopt;
    ElementLine out;
    std::size_t i = 0;
    const auto ident_end = [&](std::size_t from) {
        while (from < line.size() && line[from] != '#' && line[from] != '.' && line[from] != '[' &&
               line[from] != ' ' && line[from] != '"')
            ++from;
        return from;
    };
    std::size_t e = ident_end(0);
    out.tag = std::string(line.substr(0, e));
    if (out.tag.empty()) return std::nullopt;
    for (char c : out.tag) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != ':') return std::nullopt;
    }
    i = e;
    const auto read_quoted = [&](std::size_t& at) -> std::optional<std::string> {
        if (at >= line.size() || line[at] != '"') return std::nullopt;
        ++at;
        std::string v;
        while (at < line.size() && line[at] != '"') {
            if (line[at] == '\\' && at + 1 < line.size()) ++at;
            v.push_back(line[at++]);
        }
        if (at >= line.size()) return std::nullopt;
        ++at;
        return v;
    };
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#' || c == '.') {
            e = ident_end(i + 1);
            std::string part(line.substr(i + 1, e - i - 1));
            if (part.empty()) return std::nullopt;
            if (c == '#') {
                out.id = std::move(part);
            } else {
                out.classes.push_back(std::move(part));
            }
            i = e;
        } else if (c == '[') {
            const std::size_t eq = line.find('=', i);
            if (eq == std::string_view::npos) return std::nullopt;
            std::string key(line.substr(i + 1, eq - i - 1));
            std::size_t at = eq + 1;
            auto value = read_quoted(at);
            if (!value || at >= line.size() || line[at] != ']') return std::nullopt;
            out.attrs[key] = std::move(*value);
            i = at + 1;
        } else if (c == ' ') {
            std::size_t at = i + 1;
            auto value = read_quoted(at);
            if (!value) return std::nullopt;
            out.text = std::move(*value);
            i = at;
            if (!text::trim(line.substr(i)).empty()) return std::nullopt;
            break;
        } else {
            return std::nullopt;
        }
    }
    return out;
}

}  // namespace groundctl::dom
