#include <doctest.h>

#include <random>

#include "groundctl/script.hpp"

using namespace groundctl;
using gen::Action;

namespace {

gen::ActionScript ok(std::string_view raw) {
    auto r = gen::parse_script(raw);
    if (auto* e = std::get_if<gen::SyntaxError>(&r)) FAIL("unexpected syntax error: " << e->message());
    return std::get<gen::ActionScript>(r);
}

gen::SyntaxError bad(std::string_view raw) {
    auto r = gen::parse_script(raw);
    REQUIRE(std::holds_alternative<gen::SyntaxError>(r));
    return std::get<gen::SyntaxError>(r);
}

}  // namespace

TEST_CASE("single steps") {
    const auto s = ok("click #btn_pay");
    REQUIRE(s.steps.size() == 1);
    CHECK(s.steps[0].action == Action::click);
    CHECK(s.steps[0].locator == dom::Locator{dom::LocatorStrategy::by_css, "#btn_pay"});
    CHECK(s.steps[0].line_no == 1);

    const auto t = ok("\n# comment\n  type_text name=email \"a \\\"b\\\" \\\\ c\"\nwait_for id=x 250\nassert_state cart.count 2\n"
                      "assert_state order.status \"paid\"\nnavigate cart\nassert_present \"form .btn\"");
    REQUIRE(t.steps.size() == 6);
    CHECK(t.steps[0].line_no == 3);
    CHECK(t.steps[0].locator.strategy == dom::LocatorStrategy::by_name);
    CHECK(t.steps[0].text == "a \"b\" \\ c");
    CHECK(t.steps[1].timeout_ms == 250);
    CHECK(t.steps[1].locator.strategy == dom::LocatorStrategy::by_id);
    CHECK(std::get<std::int64_t>(t.steps[2].expected) == 2);
    CHECK(std::get<std::string>(t.steps[3].expected) == "paid");
    CHECK(t.steps[4].page == "cart");
    CHECK(t.steps[5].locator.value == "form .btn");
}

TEST_CASE("syntax errors carry the line") {
    CHECK(bad("").reason == "empty script");
    CHECK(bad("# only a comment\n\n").line == 0);
    CHECK(bad("clik #x").line == 1);
    CHECK(bad("navigate home\nclick").line == 2);
    CHECK(bad("navigate home\nclick a > b").line == 2);
    CHECK(bad("wait_for #x soon").line == 1);
    CHECK(bad("wait_for #x 0").line == 1);
    CHECK(bad("wait_for #x -5").line == 1);
    CHECK(bad("type_text #x \"unterminated").line == 1);
    CHECK(bad("assert_state k maybe").line == 1);
    CHECK(bad("navigate \"a b\"").line == 1);
    CHECK(bad("navigate home\n\nclick #a #b").message() == "line 3: click takes 1 argument, got 2");
    CHECK(bad("click id=").line == 1);
}

TEST_CASE("render and parse round trip") {
    const std::string raw =
        "navigate home\nwait_for #search 5000\ntype_text #search \"laptop bag\"\nclick \"form button.btn\"\n"
        "click name=go\nclick id=x\nassert_state n -3\nassert_state s \"q\\\"\"\n";
    const auto s = ok(raw);
    CHECK(gen::render_script(s.steps) == raw);
    CHECK(ok(gen::render_script(s.steps)).steps == s.steps);
}

TEST_CASE("random scripts round trip") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> selectors{"#a", ".b", "div.c", "button#d", "input[name=\"q\"]", "form .e", "li a"};
    const std::vector<std::string> texts{"", "x", "two words", "q\"uote", "back\\slash", "tab\tin"};
    const auto pick = [&](const auto& xs) { return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)]; };
    for (int i = 0; i < 200; ++i) {
        std::vector<gen::ActionStep> steps;
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        for (int j = 0; j < n; ++j) {
            gen::ActionStep s;
            s.action = static_cast<Action>(std::uniform_int_distribution<int>(0, 5)(rng));
            const auto strategy = static_cast<dom::LocatorStrategy>(std::uniform_int_distribution<int>(0, 2)(rng));
            s.locator = {strategy, strategy == dom::LocatorStrategy::by_css ? pick(selectors) : "v" + std::to_string(j)};
            switch (s.action) {
                case Action::navigate: s.page = "page" + std::to_string(j); s.locator = {}; break;
                case Action::type_text: s.text = pick(texts); break;
                case Action::wait_for: s.timeout_ms = std::uniform_int_distribution<int>(1, 10000)(rng); break;
                case Action::assert_state:
                    s.locator = {};
                    s.key = "k" + std::to_string(j);
                    if (j % 2) s.expected = std::int64_t{j - 3};
                    else s.expected = pick(texts);
                    break;
                default: break;
            }
            steps.push_back(s);
        }
        const auto rendered = gen::render_script(steps);
        CAPTURE(rendered);
        CHECK(ok(rendered).steps == steps);
    }
}

TEST_CASE("extract_locators") {
    CHECK(gen::extract_locators(ok("navigate home\nclick #a\nassert_state x 1")).size() == 1);
    CHECK(gen::extract_locators(ok("navigate home\nclick #a\nwait_for #b 10")).size() == 2);
    CHECK(gen::extract_locators(ok("navigate home")).empty());
    const auto dup = gen::extract_locators(ok("wait_for #a 10\nclick #a"));
    CHECK(dup.size() == 2);
    CHECK(dup[0] == dup[1]);
}

TEST_CASE("code fences") {
    CHECK(gen::strip_code_fences("Here:\n```\nnavigate home\n```\nbye") == "navigate home\n");
    CHECK(gen::strip_code_fences("```text\nclick #a\nclick #b\n```") == "click #a\nclick #b\n");
    CHECK(gen::strip_code_fences("click #a") == "click #a");
    CHECK(gen::strip_code_fences("```\nunclosed") == "```\nunclosed");
}

TEST_CASE("describe_steps numbers every step") {
    const auto d = gen::describe_steps(ok("navigate cart\nwait_for #x 5000\ntype_text #q \"hi\"\nassert_state c 1").steps);
    REQUIRE(d.size() == 4);
    CHECK(d[0] == "1. Open the cart page");
    CHECK(d[1] == "2. Wait up to 5000 ms for #x to appear");
    CHECK(d[2] == "3. Type \"hi\" into #q");
    CHECK(d[3] == "4. Check that c equals 1");
}

TEST_CASE("selenium export") {
    const auto py = gen::export_selenium_python(
        ok("navigate home\nwait_for #add-headphones 5000\nclick #add-headphones\ntype_text name=email \"a\\\"b\"\n"
           "assert_present \".cart .item\""),
        {{"home", "index.html"}}, "http://shop.test");
    CHECK(py.find("BASE_URL = \"http://shop.test\"") != std::string::npos);
    CHECK(py.find("driver.get(BASE_URL + \"/\" + \"index.html\")") != std::string::npos);
    CHECK(py.find("driver.find_element(By.ID, \"add-headphones\").click()") != std::string::npos);
    CHECK(py.find("WebDriverWait(driver, 5).until") != std::string::npos);
    CHECK(py.find("By.NAME, \"email\"") != std::string::npos);
    CHECK(py.find("send_keys(\"a\\\"b\")") != std::string::npos);
    CHECK(py.find("By.CSS_SELECTOR, \".cart .item\"") != std::string::npos);
}

TEST_CASE("locator tokens") {
    CHECK(gen::parse_locator("id=x").strategy == dom::LocatorStrategy::by_id);
    CHECK(gen::parse_locator("css=#x").value == "#x");
    CHECK_THROWS_AS(gen::parse_locator("a > b"), dom::InvalidSelector);
    CHECK(gen::render_locator({dom::LocatorStrategy::by_css, "a b"}) == "\"a b\"");
}
