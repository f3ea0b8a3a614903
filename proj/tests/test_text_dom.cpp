#include <doctest.h>

#include "groundctl/dom.hpp"
#include "groundctl/text.hpp"
#include "selector_oracle.hpp"
#include "support.hpp"

using namespace groundctl;

namespace {

dom::DomIndex index_of(const std::string& page, const std::string& html) {
    std::map<std::string, std::vector<dom::DomElement>> pages;
    pages[page] = dom::clean_html(html).elements;
    return dom::DomIndex::build(std::move(pages));
}

dom::Locator css(std::string v) { return {dom::LocatorStrategy::by_css, std::move(v)}; }

}  // namespace

TEST_CASE("utf8 helpers") {
    CHECK_FALSE(text::first_invalid_utf8("plain ascii"));
    CHECK_FALSE(text::first_invalid_utf8("caf\xC3\xA9"));
    CHECK(text::first_invalid_utf8("ab\xC3") == 2u);
    CHECK(text::first_invalid_utf8("a\xFFz") == 1u);
    CHECK(text::sanitize_utf8("a\xFFz") == "a\xEF\xBF\xBDz");

    const std::string s = "ab\xC3\xA9";  // a b e-acute
    CHECK(text::utf8_prefix(s, 3) == "ab");
    CHECK(text::utf8_prefix(s, 4) == s);
    CHECK(text::is_utf8_boundary(s, 2));
    CHECK_FALSE(text::is_utf8_boundary(s, 3));
}

TEST_CASE("tokenize and whitespace helpers") {
    CHECK(text::tokenize("Add-to Cart_2!") == std::vector<std::string>{"add", "to", "cart", "2"});
    CHECK(text::collapse_whitespace("  a \n\t b  ") == "a b");
    CHECK(text::trim("  x  ") == "x");
    CHECK(text::replace_all("aXbXc", "X", "--") == "a--b--c");
    CHECK(text::split_lines("a\nb\n").size() == 2);
}

TEST_CASE("clean_html drops scripts, styles and comments") {
    const auto c = dom::clean_html(
        "<html><head><style>.x{}</style><script>var a = '<div id=\"fake\">';</script></head>"
        "<body><!-- <button id=\"ghost\"> --><button id=\"real\" class=\"btn primary\" onclick=\"x()\">Go</button>"
        "</body></html>");
    CHECK(c.structural_text.find("fake") == std::string::npos);
    CHECK(c.structural_text.find("ghost") == std::string::npos);
    CHECK(c.structural_text.find("onclick") == std::string::npos);
    CHECK(c.structural_text.find("button#real.btn.primary \"Go\"") != std::string::npos);
    CHECK(c.elements.size() == 4);  // html, head, body, button
    CHECK(c.recoveries == 0);
}

TEST_CASE("serialization keeps only the structural attributes") {
    const auto c = dom::clean_html(
        R"(<input id="q" name="query" type="text" placeholder="Find" data-x="1" style="a" value="v">)");
    REQUIRE(c.elements.size() == 1);
    const auto& e = c.elements[0];
    CHECK(e.tag == "input");
    CHECK(e.id_attr == "q");
    CHECK(e.name_attr == "query");
    CHECK(e.other_attrs.size() == 3);
    CHECK(e.other_attrs.count("data-x") == 0);
    CHECK(dom::serialize_element(e) == R"(input#q[name="query"][placeholder="Find"][type="text"][value="v"])");
}

TEST_CASE("element lines parse back") {
    const auto c = dom::clean_html(
        R"(<a id="l" class="nav x" href="/p?a=1" name="n">Say "hi" \ there</a>)");
    REQUIRE(c.elements.size() == 1);
    const auto line = dom::serialize_element(c.elements[0]);
    const auto parsed = dom::parse_element_line(line);
    REQUIRE(parsed);
    CHECK(parsed->tag == "a");
    CHECK(parsed->id == "l");
    CHECK(parsed->classes == std::vector<std::string>{"nav", "x"});
    CHECK(parsed->attrs.at("href") == "/p?a=1");
    CHECK(parsed->attrs.at("name") == "n");
    CHECK(parsed->text == R"(Say "hi" \ there)");
    CHECK_FALSE(dom::parse_element_line("   "));
}

TEST_CASE("inner text is capped on a code point boundary") {
    std::string body;
    for (int i = 0; i < 150; ++i) body += "\xC3\xA9";  // 300 bytes
    const auto c = dom::clean_html("<p>" + body + "</p>");
    REQUIRE(c.elements.size() == 1);
    CHECK(c.elements[0].text.size() <= dom::kMaxInnerText);
    CHECK(c.elements[0].text.size() == 200);
    CHECK_FALSE(text::first_invalid_utf8(c.elements[0].text));
}

TEST_CASE("malformed html is recovered") {
    const auto c = dom::clean_html("<div id=\"a\"><span id=\"b\">x</div></p><button id=\"c\">y");
    std::vector<std::string> ids;
    for (const auto& e : c.elements) ids.push_back(e.id_attr.value_or(""));
    CHECK(ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(c.recoveries >= 2);  // span auto-closed, stray </p>
    CHECK(c.elements[1].tree_path == std::vector<int>{0, 0});
    CHECK(c.elements[2].tree_path == std::vector<int>{1});
}

TEST_CASE("tree paths and uids") {
    const auto idx = index_of("p", "<div><span></span><span id=\"s\"></span></div>");
    const auto uid = idx.lookup_id("p", "s");
    REQUIRE(uid);
    CHECK(*uid == "p:0.1");
    CHECK(idx.find(*uid)->tag == "span");
    CHECK(idx.size() == 3);
    CHECK_THROWS_AS(idx.elements("nope"), dom::UnknownPage);
}

TEST_CASE("id collisions are reported in document order") {
    const auto idx = index_of("p", "<button id=\"x\">1</button><a id=\"y\"></a><input id=\"x\">");
    REQUIRE(idx.collisions().size() == 1);
    CHECK(idx.collisions()[0].id == "x");
    CHECK(idx.collisions()[0].element_uids == std::vector<std::string>{"p:0", "p:2"});
    CHECK(idx.lookup_id("p", "x") == "p:0");

    const auto r = dom::resolve(idx, "p", {dom::LocatorStrategy::by_id, "x"});
    CHECK(r.kind() == dom::ResolveResult::Kind::ambiguous);
    CHECK(r.count() == 2);
}

TEST_CASE("selector grammar") {
    CHECK_NOTHROW(dom::parse_selector("button#go.btn.primary[type=\"submit\"]"));
    CHECK_NOTHROW(dom::parse_selector("form .btn"));
    CHECK_NOTHROW(dom::parse_selector("[name='q']"));
    CHECK_NOTHROW(dom::parse_selector("DIV"));
    for (const char* bad : {"", "a > b", "a b c", "#a#b", "a:hover", "[x]", "a[x=\"1\"].c", "*", "a,b", "[x=\"1\"][y=\"2\"]"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(dom::parse_selector(bad), dom::InvalidSelector);
    }
    CHECK_THROWS_AS(dom::validate({dom::LocatorStrategy::by_id, ""}), dom::InvalidSelector);
}

TEST_CASE("resolve by strategy") {
    const auto idx = index_of("p",
                              "<form id=\"f\"><input name=\"q\" class=\"in\"><button class=\"btn\" id=\"go\">Go</button>"
                              "</form><button class=\"btn\">Other</button>");
    CHECK(dom::resolve(idx, "p", {dom::LocatorStrategy::by_id, "go"}).kind() == dom::ResolveResult::Kind::unique);
    CHECK(dom::resolve(idx, "p", {dom::LocatorStrategy::by_name, "q"}).kind() == dom::ResolveResult::Kind::unique);
    CHECK(dom::resolve(idx, "p", css(".btn")).count() == 2);
    CHECK(dom::resolve(idx, "p", css("#f .btn")).count() == 1);
    CHECK(dom::resolve(idx, "p", css("form button")).count() == 1);
    CHECK(dom::resolve(idx, "p", css("#nope")).kind() == dom::ResolveResult::Kind::none);
    CHECK(dom::resolve(idx, "p", css("BUTTON")).count() == 2);
    CHECK_THROWS_AS(dom::resolve(idx, "p", css("a > b")), dom::InvalidSelector);
    CHECK_THROWS_AS(dom::resolve(idx, "zz", css("a")), dom::UnknownPage);
}

TEST_CASE("resolve agrees with the full-scan oracle on random pages") {
    std::mt19937_64 rng(7);
    const auto vocab = oracle::random_page_vocabulary();
    const auto selectors = oracle::all_selectors(vocab, oracle::random_page_ancestors());
    for (int page = 0; page < 10; ++page) {
        const auto idx = index_of("r", oracle::random_page(rng, 50));
        const auto& elements = idx.elements("r");
        for (const auto& sel : selectors) {
            const auto got = dom::resolve(idx, "r", css(sel.css()));
            std::vector<std::string> uids;
            for (const auto* e : got.matches) uids.push_back(e->element_uid);
            const auto want = oracle::naive_resolve(elements, sel);
            if (uids != want) {
                CAPTURE(sel.css());
                CHECK(uids == want);
            }
        }
    }
}
