#include "groundctl/script.hpp"

#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "groundctl/text.hpp"

namespace groundctl::gen {

namespace {

struct Token {
    std::string value;
    bool quoted = false;
};

struct LineError {
    std::string reason;
};

std::variant<std::vector<Token>, LineError> split_tokens(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        Token t;
        if (line[i] == '"') {
            t.quoted = true;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                const char c = line[i];
                if (c == '\\' && i + 1 < line.size() && (line[i + 1] == '"' || line[i + 1] == '\\')) {
                    t.value.push_back(line[i + 1]);
                    i += 2;
                } else if (c == '"') {
                    closed = true;
                    ++i;
                    break;
                } else {
                    t.value.push_back(c);
                    ++i;
                }
            }
            if (!closed) return LineError{"unterminated string"};
            if (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
                return LineError{"text directly after closing quote"};
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
                if (line[i] == '"') return LineError{"stray quote inside token"};
                t.value.push_back(line[i++]);
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

bool needs_quotes(std::string_view s) {
    if (s.empty()) return true;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '"' || c == '\\') return true;
    }
    return false;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string token(std::string_view s) { return needs_quotes(s) ? quote(s) : std::string(s); }

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::optional<std::string> parse_locator(const Token& t, dom::Locator& out) {
    try {
        out = gen::parse_locator(t.value);
    } catch (const dom::InvalidSelector& e) {
        return std::string("malformed locator: ") + e.what();
    }
    return std::nullopt;
}

bool valid_page(std::string_view p) {
    if (p.empty()) return false;
    for (char c : p) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<Action> action_from(std::string_view name) {
    if (name == "navigate") return Action::navigate;
    if (name == "click") return Action::click;
    if (name == "type_text") return Action::type_text;
    if (name == "wait_for") return Action::wait_for;
    if (name == "assert_present") return Action::assert_present;
    if (name == "assert_state") return Action::assert_state;
    return std::nullopt;
}

std::size_t arity(Action a) {
    switch (a) {
        case Action::navigate: return 1;
        case Action::click: return 1;
        case Action::type_text: return 2;
        case Action::wait_for: return 2;
        case Action::assert_present: return 1;
        case Action::assert_state: return 2;
    }
    return 0;
}

std::variant<ActionStep, std::string> parse_step(const std::vector<Token>& toks) {
    if (toks.front().quoted) return std::string("action name must not be quoted");
    const auto action = action_from(toks.front().value);
    if (!action) return "unknown action '" + toks.front().value + "'";
    const std::size_t want = arity(*action);
    if (toks.size() - 1 != want)
        return to_string(*action) + " takes " + std::to_string(want) + " argument" + (want == 1 ? "" : "s") +
               ", got " + std::to_string(toks.size() - 1);

    ActionStep s;
    s.action = *action;
    switch (*action) {
        case Action::navigate:
            if (!valid_page(toks[1].value)) return "invalid page id '" + toks[1].value + "'";
            s.page = toks[1].value;
            break;
        case Action::click:
        case Action::assert_present:
            if (auto err = parse_locator(toks[1], s.locator)) return *err;
            break;
        case Action::type_text:
            if (auto err = parse_locator(toks[1], s.locator)) return *err;
            s.text = toks[2].value;
            break;
        case Action::wait_for: {
            if (auto err = parse_locator(toks[1], s.locator)) return *err;
            const auto ms = toks[2].quoted ? std::nullopt : parse_int(toks[2].value);
            if (!ms) return "timeout must be an integer, got '" + toks[2].value + "'";
            if (*ms <= 0) return std::string("timeout must be positive");
            s.timeout_ms = *ms;
            break;
        }
        case Action::assert_state: {
            if (toks[1].quoted || toks[1].value.empty()) return std::string("state key must be a bare word");
            s.key = toks[1].value;
            if (toks[2].quoted) {
                s.expected = toks[2].value;
            } else if (const auto v = parse_int(toks[2].value)) {
                s.expected = *v;
            } else {
                return "expected value must be an integer or a quoted string, got '" + toks[2].value + "'";
            }
            break;
        }
    }
    return s;
}

std::string page_url(const std::map<std::string, std::string>& files, const std::string& page) {
    const auto it = files.find(page);
    return it != files.end() ? it->second : page + ".html";
}

bool plain_id_selector(std::string_view css) {
    if (css.size() < 2 || css[0] != '#') return false;
    for (char c : css.substr(1)) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-';
        if (!ok) return false;
    }
    return true;
}

std::string py_str(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

std::string py_by(const dom::Locator& loc) {
    switch (loc.strategy) {
        case dom::LocatorStrategy::by_id: return "By.ID, " + py_str(loc.value);
        case dom::LocatorStrategy::by_name: return "By.NAME, " + py_str(loc.value);
        case dom::LocatorStrategy::by_css:
            if (plain_id_selector(loc.value)) return "By.ID, " + py_str(loc.value.substr(1));
            return "By.CSS_SELECTOR, " + py_str(loc.value);
    }
    return {};
}

}  // namespace

std::string to_string(const StateValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return quote(std::get<std::string>(v));
}

std::string to_string(Action a) {
    switch (a) {
        case Action::navigate: return "navigate";
        case Action::click: return "click";
        case Action::type_text: return "type_text";
        case Action::wait_for: return "wait_for";
        case Action::assert_present: return "assert_present";
        case Action::assert_state: return "assert_state";
    }
    return "?";
}

bool ActionStep::has_locator() const {
    return action == Action::click || action == Action::type_text || action == Action::wait_for ||
           action == Action::assert_present;
}

std::string SyntaxError::message() const {
    if (line == 0) return reason;
    return "line " + std::to_string(line) + ": " + reason;
}

std::variant<ActionScript, SyntaxError> parse_script(std::string_view raw) {
    ActionScript script;
    script.raw_text = std::string(raw);
    std::size_t line_no = 0;
    for (auto line : text::split_lines(raw)) {
        ++line_no;
        const std::string_view t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto toks = split_tokens(t);
        if (auto* err = std::get_if<LineError>(&toks)) return SyntaxError{line_no, err->reason};
        auto step = parse_step(std::get<std::vector<Token>>(toks));
        if (auto* err = std::get_if<std::string>(&step)) return SyntaxError{line_no, *err};
        auto& s = std::get<ActionStep>(step);
        s.line_no = line_no;
        script.steps.push_back(std::move(s));
    }
    if (script.steps.empty()) return SyntaxError{0, "empty script"};
    return script;
}

dom::Locator parse_locator(std::string_view v) {
    dom::Locator out;
    if (starts_with(v, "id=")) {
        out = {dom::LocatorStrategy::by_id, std::string(v.substr(3))};
    } else if (starts_with(v, "name=")) {
        out = {dom::LocatorStrategy::by_name, std::string(v.substr(5))};
    } else if (starts_with(v, "css=")) {
        out = {dom::LocatorStrategy::by_css, std::string(v.substr(4))};
    } else {
        out = {dom::LocatorStrategy::by_css, std::string(v)};
    }
    dom::validate(out);
    return out;
}

std::string render_locator(const dom::Locator& loc) {
    switch (loc.strategy) {
        case dom::LocatorStrategy::by_id: return token("id=" + loc.value);
        case dom::LocatorStrategy::by_name: return token("name=" + loc.value);
        case dom::LocatorStrategy::by_css: {
            const bool prefixed = starts_with(loc.value, "id=") || starts_with(loc.value, "name=") ||
                                  starts_with(loc.value, "css=");
            return token(prefixed ? "css=" + loc.value : loc.value);
        }
    }
    return {};
}

std::string render_step(const ActionStep& s) {
    std::string out = to_string(s.action);
    switch (s.action) {
        case Action::navigate: out += " " + s.page; break;
        case Action::click:
        case Action::assert_present: out += " " + render_locator(s.locator); break;
        case Action::type_text: out += " " + render_locator(s.locator) + " " + quote(s.text); break;
        case Action::wait_for: out += " " + render_locator(s.locator) + " " + std::to_string(s.timeout_ms); break;
        case Action::assert_state: out += " " + s.key + " " + to_string(s.expected); break;
    }
    return out;
}

std::string render_script(const std::vector<ActionStep>& steps) {
    std::string out;
    for (const auto& s : steps) out += render_step(s) + "\n";
    return out;
}

std::vector<dom::Locator> extract_locators(const ActionScript& script) {
    std::vector<dom::Locator> out;
    for (const auto& s : script.steps) {
        if (s.has_locator()) out.push_back(s.locator);
    }
    return out;
}

std::string strip_code_fences(std::string_view text) {
    const auto lines = text::split_lines(text);
    std::optional<std::size_t> open;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!starts_with(text::trim(lines[i]), "```")) continue;
        if (!open) {
            open = i;
            continue;
        }
        std::string out;
        for (std::size_t j = *open + 1; j < i; ++j) out += std::string(lines[j]) + "\n";
        return out;
    }
    return std::string(text);
}

std::vector<std::string> describe_steps(const std::vector<ActionStep>& steps) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        std::string d;
        switch (s.action) {
            case Action::navigate: d = "Open the " + s.page + " page"; break;
            case Action::click: d = "Click " + render_locator(s.locator); break;
            case Action::type_text: d = "Type " + quote(s.text) + " into " + render_locator(s.locator); break;
            case Action::wait_for:
                d = "Wait up to " + std::to_string(s.timeout_ms) + " ms for " + render_locator(s.locator) +
                    " to appear";
                break;
            case Action::assert_present: d = "Check that " + render_locator(s.locator) + " is present"; break;
            case Action::assert_state: d = "Check that " + s.key + " equals " + to_string(s.expected); break;
        }
        out.push_back(std::to_string(i + 1) + ". " + d);
    }
    return out;
}

std::string export_selenium_python(const ActionScript& script, const std::map<std::string, std::string>& page_files,
                                   std::string_view base_url) {
    std::string out;
    out += "from selenium import webdriver\n";
    out += "from selenium.webdriver.common.by import By\n";
    out += "from selenium.webdriver.support import expected_conditions as EC\n";
    out += "from selenium.webdriver.support.ui import WebDriverWait\n\n";
    out += "BASE_URL = " + py_str(base_url) + "\n\n\n";
    out += "def run(driver):\n";
    for (const auto& s : script.steps) {
        out += "    # " + render_step(s) + "\n";
        switch (s.action) {
            case Action::navigate:
                out += "    driver.get(BASE_URL + \"/\" + " + py_str(page_url(page_files, s.page)) + ")\n";
                break;
            case Action::click: out += "    driver.find_element(" + py_by(s.locator) + ").click()\n"; break;
            case Action::type_text:
                out += "    field = driver.find_element(" + py_by(s.locator) + ")\n";
                out += "    field.clear()\n";
                out += "    field.send_keys(" + py_str(s.text) + ")\n";
                break;
            case Action::wait_for: {
                const double secs = static_cast<double>(s.timeout_ms) / 1000.0;
                char buf[32];
                std::snprintf(buf, sizeof buf, "%g", secs);
                out += std::string("    WebDriverWait(driver, ") + buf + ").until(EC.presence_of_element_located((" +
                       py_by(s.locator) + ")))\n";
                break;
            }
            case Action::assert_present:
                out += "    assert driver.find_elements(" + py_by(s.locator) + ")\n";
                break;
            case Action::assert_state:
                out += "    # application state is not observable from the browser; check it in the app\n";
                break;
        }
    }
    if (script.steps.empty()) out += "    pass\n";
    out += "\n\nif __name__ == \"__main__\":\n";
    out += "    driver = webdriver.Chrome()\n";
    out += "    try:\n";
    out += "        run(driver)\n";
    out += "    finally:\n";
    out += "        driver.quit()\n";
    return out;
}

}  // namespace groundctl::gen
