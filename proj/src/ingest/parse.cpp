#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "groundctl/error.hpp"
#include "groundctl/ingest.hpp"
#include "groundctl/text.hpp"

namespace groundctl::ingest {

namespace {

std::string normalize_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string_view strip_bom(std::string_view s) {
    if (s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
    return s;
}

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// [text](url) -> text, ![alt](url) -> alt
std::string strip_links(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        const bool image = s[i] == '!' && i + 1 < s.size() && s[i + 1] == '[';
        if (s[i] == '[' || image) {
            const std::size_t open = image ? i + 1 : i;
            const std::size_t close = s.find(']', open);
            if (close != std::string_view::npos && close + 1 < s.size() && s[close + 1] == '(') {
                const std::size_t paren = s.find(')', close + 2);
                if (paren != std::string_view::npos) {
                    out.append(s.substr(open + 1, close - open - 1));
                    i = paren + 1;
                    continue;
                }
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

std::string strip_inline(std::string_view line) {
    std::string s = strip_links(line);
    s = text::replace_all(std::move(s), "`", "");
    s = text::replace_all(std::move(s), "**", "");
    s = text::replace_all(std::move(s), "__", "");
    s = text::replace_all(std::move(s), "~~", "");
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        const char prev = i > 0 ? s[i - 1] : ' ';
        const char next = i + 1 < s.size() ? s[i + 1] : ' ';
        if (c == '*' && !(prev == ' ' && next == ' ')) continue;
        // Keep underscores inside identifiers such as inp_email.
        if (c == '_' && !(is_word(prev) && is_word(next))) continue;
        out.push_back(c);
    }
    return out;
}

bool is_rule(std::string_view t) {
    if (t.size() < 3) return false;
    const char c = t[0];
    if (c != '-' && c != '*' && c != '_' && c != '=') return false;
    return std::all_of(t.begin(), t.end(), [c](char x) { return x == c || x == ' '; });
}

bool is_table_separator(std::string_view t) {
    if (t.find('-') == std::string_view::npos) return false;
    return std::all_of(t.begin(), t.end(), [](char x) { return x == '|' || x == '-' || x == ':' || x == ' '; }) &&
           t.find('|') != std::string_view::npos;
}

void flatten(const nlohmann::ordered_json& j, const std::string& path, std::string& out) {
    const auto line = [&](const std::string& value) {
        if (path.empty()) {
            out += value;
        } else {
            out += path + ": " + value;
        }
        out.push_back('\n');
    };
    if (j.is_object()) {
        if (j.empty()) return line("{}");
        for (auto it = j.begin(); it != j.end(); ++it) {
            flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
        }
    } else if (j.is_array()) {
        if (j.empty()) return line("[]");
        for (std::size_t i = 0; i < j.size(); ++i) {
            flatten(j[i], path.empty() ? std::to_string(i) : path + "." + std::to_string(i), out);
        }
    } else if (j.is_string()) {
        line(j.get<std::string>());
    } else {
        line(j.dump());
    }
}

}  // namespace

std::string to_string(SourceType t) {
    switch (t) {
        case SourceType::markdown: return "markdown";
        case SourceType::text: return "text";
        case SourceType::json: return "json";
        case SourceType::html: return "html";
    }
    return "text";
}

std::optional<SourceType> source_type_from_string(std::string_view s) {
    if (s == "markdown" || s == "md") return SourceType::markdown;
    if (s == "text" || s == "txt") return SourceType::text;
    if (s == "json") return SourceType::json;
    if (s == "html" || s == "htm") return SourceType::html;
    return std::nullopt;
}

std::optional<SourceType> source_type_from_path(const std::filesystem::path& p) {
    const std::string ext = text::to_lower_ascii(p.extension().string());
    if (ext == ".md" || ext == ".markdown") return SourceType::markdown;
    if (ext == ".txt") return SourceType::text;
    if (ext == ".json") return SourceType::json;
    if (ext == ".html" || ext == ".htm") return SourceType::html;
    return std::nullopt;
}

std::string strip_markdown(std::string_view md) {
    static const std::regex kHeading(R"(^ {0,3}#{1,6}(\s+|$))");
    static const std::regex kClosingHashes(R"(\s+#+\s*$)");
    static const std::regex kListMarker(R"(^\s*([-*+]|\d+[.)])\s+(\[[ xX]\]\s+)?)");
    static const std::regex kQuote(R"(^\s*(>\s?)+)");

    std::vector<std::string> lines;
    bool in_fence = false;
    for (std::string_view raw : text::split_lines(md)) {
        std::string line(raw);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        const std::string_view t = text::trim(line);
        if (t.substr(0, 3) == "```" || t.substr(0, 3) == "~~~") {
            in_fence = !in_fence;
            continue;
        }
        if (in_fence) {
            lines.push_back(line);
            continue;
        }
        if (is_rule(t) || is_table_separator(t)) continue;
        line = std::regex_replace(line, kQuote, "", std::regex_constants::format_first_only);
        std::smatch m;
        if (std::regex_search(line, m, kHeading)) {
            line = m.suffix().str();
            line = std::regex_replace(line, kClosingHashes, "");
        } else {
            line = std::regex_replace(line, kListMarker, "", std::regex_constants::format_first_only);
        }
        std::string_view tt = text::trim(line);
        if (!tt.empty() && tt.front() == '|') {
            tt.remove_prefix(1);
            if (!tt.empty() && tt.back() == '|') tt.remove_suffix(1);
            std::string row;
            std::size_t b = 0;
            while (b <= tt.size()) {
                const std::size_t bar = tt.find('|', b);
                const std::size_t e = bar == std::string_view::npos ? tt.size() : bar;
                if (!row.empty()) row += " | ";
                row += std::string(text::trim(tt.substr(b, e - b)));
                if (bar == std::string_view::npos) break;
                b = bar + 1;
            }
            line = row;
        }
        line = strip_inline(line);
        lines.push_back(std::string(text::trim(line)).empty() ? std::string() : line);
    }

    std::string out;
    bool pending_blank = false;
    for (const auto& l : lines) {
        if (text::trim(l).empty()) {
            pending_blank = !out.empty();
            continue;
        }
        if (!out.empty()) out += pending_blank ? "\n\n" : "\n";
        pending_blank = false;
        out += l;
    }
    return out;
}

std::string flatten_json(std::string_view json_text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
    }
    std::string out;
    flatten(j, "", out);
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string parse_source(const SourceDocument& doc) {
    if (doc.source_type == SourceType::html) return dom::clean_html(doc.raw_bytes).structural_text;

    if (const auto bad = text::first_invalid_utf8(doc.raw_bytes)) {
        throw EncodingError(doc.source_id + ": invalid UTF-8 at byte " + std::to_string(*bad), *bad);
    }
    const std::string normalized = normalize_newlines(strip_bom(doc.raw_bytes));
    switch (doc.source_type) {
        case SourceType::text: return normalized;
        case SourceType::markdown: return strip_markdown(normalized);
        case SourceType::json: return flatten_json(normalized);
        case SourceType::html: break;
    }
    return normalized;
}

std::string page_id_for_source(std::string_view source_id) {
    return std::filesystem::path(std::string(source_id)).stem().string();
}

SourceDocument load_source(const std::filesystem::path& file) {
    const auto type = source_type_from_path(file);
    if (!type) throw ConfigError("unsupported file type: " + file.string());
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return SourceDocument{file.filename().string(), *type, buf.str(), file.string()};
}

std::vector<SourceDocument> load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && source_type_from_path(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<SourceDocument> docs;
    docs.reserve(files.size());
    for (const auto& f : files) docs.push_back(load_source(f));
    return docs;
}

}  // namespace groundctl::ingest
