#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "groundctl/dom.hpp"

namespace groundctl::gen {

using StateValue = std::variant<std::int64_t, std::string>;
std::string to_string(const StateValue& v);  // ints bare, strings JSON-quoted

enum class Action { navigate, click, type_text, wait_for, assert_present, assert_state };
std::string to_string(Action a);

struct ActionStep {
    Action action = Action::navigate;
    std::string page;             // navigate
    dom::Locator locator;         // click, type_text, wait_for, assert_present
    std::string text;             // type_text
    std::int64_t timeout_ms = 0;  // wait_for
    std::string key;              // assert_state
    StateValue expected;          // assert_state
    std::size_t line_no = 0;

    bool has_locator() const;

    // Line numbers are bookkeeping and do not take part in equality.
    friend bool operator==(const ActionStep& a, const ActionStep& b) {
        return a.action == b.action && a.page == b.page && a.locator == b.locator && a.text == b.text &&
               a.timeout_ms == b.timeout_ms && a.key == b.key && a.expected == b.expected;
    }
};

struct ActionScript {
    std::string raw_text;
    std::vector<ActionStep> steps;
    std::optional<std::string> scenario_id;
};

struct SyntaxError {
    std::size_t line = 0;  // 1-based; 0 when the script as a whole is rejected
    std::string reason;

    std::string message() const;
};

// Grammar, one step per line:
//   navigate <page>
//   click <selector>
//   type_text <selector> "<text>"
//   wait_for <selector> <timeout_ms>
//   assert_present <selector>
//   assert_state <key> <integer | "string">
// Selectors are CSS unless prefixed with id=, name= or css=. Tokens containing
// spaces are double-quoted with \" and \\ escapes. Blank lines and lines whose
// first non-blank character is # are ignored.
std::variant<ActionScript, SyntaxError> parse_script(std::string_view raw);

// A selector token as written in scripts and manifests: id=, name=, css= or
// bare CSS. Throws InvalidSelector.
dom::Locator parse_locator(std::string_view token);
std::string render_locator(const dom::Locator& loc);
std::string render_step(const ActionStep& step);
std::string render_script(const std::vector<ActionStep>& steps);  // canonical, newline-terminated

// Locators of interaction steps in order, duplicates kept.
std::vector<dom::Locator> extract_locators(const ActionScript& script);

// Content of the first fenced code block when present, else the input.
std::string strip_code_fences(std::string_view text);

// Numbered plain-language steps ("1. Open the home page").
std::vector<std::string> describe_steps(const std::vector<ActionStep>& steps);

// Python + Selenium WebDriver source for the script. `page_files` maps page ids
// to paths below base_url; unmapped pages use "<page>.html".
std::string export_selenium_python(const ActionScript& script, const std::map<std::string, std::string>& page_files,
                                   std::string_view base_url = "http://localhost:8000");

}  // namespace groundctl::gen
