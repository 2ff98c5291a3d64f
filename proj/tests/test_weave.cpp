#include "doctest.h"

#include "gen.hpp"
#include "html_check.hpp"
#include "litgrid/engine.hpp"
#include "litgrid/error.hpp"
#include "litgrid/lsheet.hpp"
#include "litgrid/weave.hpp"

#include <filesystem>
#include <random>

using namespace litgrid;

namespace {

Document parse(const std::string& text) { return parse_lsheet(text).doc; }

std::string html_for(const Document& doc, const std::string& theme) {
    auto r = evaluate(doc);
    return render_html(weave(doc, theme, r), toc(doc, theme), cross_refs(doc), term_index(doc));
}

void collect_ids(const std::vector<TocEntry>& entries, std::set<std::string>& out) {
    for (const auto& e : entries) {
        out.insert(e.chunk_id);
        collect_ids(e.children, out);
    }
}

const char* kDoc = R"(@title: Weave demo

# One {#one}

We compute a ((net present value)) from [[data]].

## Two {#two}

::: grid name=data
1
2
:::

::: formula name=total desc="sum"
total = SUM(data)
:::

Total is {{total}}.

## Three {#three}

::: assert msg="too small"
total > 10
:::

# Four {#four}

### Deep {#deep}

::: theme name=brief
total
four
data
:::
)";

} // namespace

TEST_CASE("table of contents") {
    auto d = parse(kDoc);
    auto t = toc(d, "all");
    REQUIRE(t.size() == 2);
    CHECK(t[0].chunk_id == "one");
    REQUIRE(t[0].children.size() == 2);
    CHECK(t[0].children[1].chunk_id == "three");
    REQUIRE(t[1].children.size() == 1);
    CHECK(t[1].children[0].chunk_id == "deep"); // level jump nests directly
    CHECK(t[1].children[0].level == 3);

    auto brief = toc(d, "brief");
    REQUIRE(brief.size() == 1);
    CHECK(brief[0].chunk_id == "four");
    CHECK(toc(parse("::: theme name=none\ndata\n:::\n::: grid name=data\n1\n:::\n"), "none").empty());
    CHECK_THROWS_AS(toc(d, "ghost"), Error);
}

TEST_CASE("cross references") {
    auto d = parse("::: narrative id=n1\nSee [[total]] and [[ghost]].\n:::\n\n::: formula name=a\na = b\n:::\n\n"
                   "::: formula name=b\nb = 1\n:::\n\n::: formula name=total\ntotal = a\n:::\n\n"
                   "::: grid name=g\n1,=A1\n:::\n");
    auto x = cross_refs(d);
    CHECK(x.referrers["total"] == std::vector<std::string>{"n1"});
    CHECK(x.referrers["b"] == std::vector<std::string>{"a"});
    CHECK(x.referrers["a"] == std::vector<std::string>{"total"});
    CHECK(x.unknown == std::set<std::string>{"ghost"});
    CHECK(x.referrers.count("g") == 0);
    CHECK(cross_refs(parse("Just words.\n")).referrers.empty());
}

TEST_CASE("term index") {
    auto d = parse("::: narrative id=n2\nThe ((net present value)) and again ((net present value)).\n:::\n\n"
                   "::: formula name=total\ntotal = 1\n:::\n\n::: grid name=Big\n1\n:::\n");
    auto idx = term_index(d);
    std::map<std::string, std::vector<std::string>> m(idx.begin(), idx.end());
    CHECK(m["net present value"] == std::vector<std::string>{"n2"});
    CHECK(m["total"] == std::vector<std::string>{"total"});
    for (std::size_t i = 1; i < idx.size(); ++i) {
        std::string a = idx[i - 1].first, b = idx[i].first;
        std::transform(a.begin(), a.end(), a.begin(), ::tolower);
        std::transform(b.begin(), b.end(), b.begin(), ::tolower);
        CHECK(a <= b);
    }
}

TEST_CASE("inline runs") {
    auto runs = parse_inline("Total is {{total}}. See [[data]]");
    REQUIRE(runs.size() == 4);
    CHECK(runs[0] == Run{Run::Kind::Text, "Total is ", ""});
    CHECK(runs[1].kind == Run::Kind::Splice);
    CHECK(runs[1].target == "total");
    CHECK(runs[3].kind == Run::Kind::Link);
    CHECK(runs[3].target == "data");
    CHECK(parse_inline("no markers [[ here").size() == 1);
}

TEST_CASE("render tree") {
    auto d = parse("::: formula name=total\ntotal = 3\n:::\n\nTotal is {{total}}.\n\n"
                   "::: assert msg=\"must be big\"\ntotal > 5\n:::\n\nBroken {{nope}} and [[gone]].\n");
    auto rt = weave(d, "all", evaluate(d));
    REQUIRE(rt.blocks.size() == 4);
    CHECK(rt.blocks[0].kind == Block::Kind::FormulaDisplay);
    CHECK(rt.blocks[0].display == "3");
    const auto& p = rt.blocks[1];
    REQUIRE(p.runs.size() == 3);
    CHECK(p.runs[0] == Run{Run::Kind::Text, "Total is ", ""});
    CHECK(p.runs[1] == Run{Run::Kind::Splice, "3", "total"});
    CHECK(p.runs[2] == Run{Run::Kind::Text, ".", ""});
    CHECK(rt.blocks[2].kind == Block::Kind::AssertionBadge);
    CHECK_FALSE(rt.blocks[2].pass);
    CHECK(rt.blocks[2].msg == "must be big");
    CHECK(rt.blocks[3].runs[1].kind == Run::Kind::Error);
    CHECK(rt.blocks[3].runs[3].kind == Run::Kind::Error);
    CHECK(rt.diagnostics.size() == 2);

    auto j = render_tree_to_json(rt);
    CHECK(j["blocks"][0]["type"] == "formula_display");
    CHECK(j["blocks"][1]["runs"][1]["type"] == "value_splice");
    CHECK(j["blocks"][2]["type"] == "assertion_badge");
}

TEST_CASE("themes reorder blocks but not values") {
    auto d = parse(kDoc);
    auto r = evaluate(d);
    auto all = weave(d, "all", r);
    auto brief = weave(d, "brief", r);
    REQUIRE(brief.blocks.size() == 3);
    CHECK(brief.blocks[0].chunk_id == "total");
    CHECK(brief.blocks[2].kind == Block::Kind::Table);
    auto f = std::find_if(all.blocks.begin(), all.blocks.end(), [](const Block& b) { return b.chunk_id == "total"; });
    CHECK(f->display == brief.blocks[0].display);
}

TEST_CASE("html output") {
    SUBCASE("empty document") {
        std::string html = html_for(Document{}, "all");
        CHECK(html.find("<!DOCTYPE html>") == 0);
        CHECK(html.find("</html>") != std::string::npos);
        CHECK(lgtest::toc_links(html).empty());
    }
    SUBCASE("single heading") {
        std::string html = html_for(parse("# Only {#only}\n"), "all");
        CHECK(lgtest::toc_links(html) == std::vector<std::string>{"only"});
        CHECK(html.find("<h2 id=\"only\"") != std::string::npos);
    }
    SUBCASE("links resolve in every theme") {
        auto d = parse(kDoc);
        for (const auto& theme : theme_names(d)) {
            std::string html = html_for(d, theme);
            INFO(theme);
            CHECK(lgtest::dangling_links(html).empty());
            auto links = lgtest::toc_links(html);
            std::set<std::string> expected;
            collect_ids(toc(d, theme), expected);
            CHECK(std::set<std::string>(links.begin(), links.end()) == expected);
            CHECK(html_for(d, theme) == html);
        }
    }
    SUBCASE("random documents") {
        std::mt19937_64 rng(12);
        for (int i = 0; i < 30; ++i) {
            auto d = lgtest::random_any_doc(rng);
            for (const auto& theme : theme_names(d)) {
                std::string html = html_for(d, theme);
                CHECK(lgtest::dangling_links(html).empty());
            }
        }
    }
}
