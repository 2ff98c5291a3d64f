#include "doctest.h"

#include "gen.hpp"
#include "litgrid/engine.hpp"
#include "litgrid/lsheet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace litgrid;

namespace {

Document parse(const std::string& text) { return parse_lsheet(text).doc; }

double num(const EvalResult& r, const std::string& key) {
    const Value* v = r.find(key);
    REQUIRE(v != nullptr);
    REQUIRE(std::holds_alternative<double>(*v));
    return std::get<double>(*v);
}

ErrorKind err(const EvalResult& r, const std::string& key) {
    const Value* v = r.find(key);
    REQUIRE(v != nullptr);
    REQUIRE(is_error(*v));
    return std::get<ErrorValue>(*v).kind;
}

Value eval_text(const std::string& text) {
    Document doc = parse("::: formula name=x\nx = " + text + "\n:::\n");
    auto r = evaluate(doc);
    return r.values.at("x");
}

std::size_t count_kind(const std::vector<Diagnostic>& ds, DiagKind k) {
    return std::count_if(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.kind == k; });
}

const char* kSumDoc = R"(::: grid name=data
,1
,2
:::

::: formula name=total
total = SUM(data!B1:B2)
:::
)";

} // namespace

TEST_CASE("topological order uses a lexicographic tie-break") {
    RefGraph g;
    g.nodes = {"a", "b", "c"};
    g.computable = g.nodes;
    g.edges["a"] = {"b"};
    auto t = topo_order(g);
    CHECK(t.order == std::vector<NodeKey>{"b", "c", "a"});
    CHECK(t.cycles.empty());

    RefGraph cyc;
    cyc.nodes = {"a", "b"};
    cyc.computable = cyc.nodes;
    cyc.edges["a"] = {"b"};
    cyc.edges["b"] = {"a"};
    t = topo_order(cyc);
    CHECK(t.order.empty());
    REQUIRE(t.cycles.size() == 1);
    CHECK(t.cycles[0] == std::vector<NodeKey>{"a", "b", "a"});

    CHECK(topo_order(RefGraph{}).order.empty());
}

TEST_CASE("graph construction") {
    auto g = build_graph(parse(kSumDoc));
    CHECK(g.has_edge("total", "data!B1"));
    CHECK(g.has_edge("total", "data!B2"));

    g = build_graph(parse("::: formula name=x\nx = ghost\n:::\n"));
    CHECK(g.placeholders.count("ghost") == 1);
    CHECK(count_kind(g.diagnostics, DiagKind::UnknownRef) == 1);

    g = build_graph(parse("::: grid name=g\n1,2\n,=SUM(g)\n:::\n::: formula name=t\nt = SUM(g)\n:::\n"));
    CHECK(g.has_edge("t", "g!A1"));
    CHECK(g.has_edge("t", "g!B1"));
    CHECK(g.has_edge("t", "g!B2"));
}

TEST_CASE("evaluation examples") {
    auto r = evaluate(parse(kSumDoc));
    CHECK(num(r, "total") == 3);

    r = evaluate(parse("::: formula name=a\na = b\n:::\n::: formula name=b\nb = a\n:::\n"));
    CHECK(err(r, "a") == ErrorKind::Cycle);
    CHECK(err(r, "b") == ErrorKind::Cycle);
    CHECK(count_kind(r.diagnostics, DiagKind::CycleError) == 1);

    r = evaluate(parse("::: grid name=g\n2\n\n4\n:::\n::: formula name=m\nm = AVERAGE(g!A1:A3)\n:::\n"));
    CHECK(num(r, "m") == 3);
}

TEST_CASE("operator semantics") {
    CHECK(std::get<ErrorValue>(eval_text("1/0")).kind == ErrorKind::Div0);
    CHECK(std::get<double>(eval_text("ROUND(2.5, 0)")) == 3);
    CHECK(std::get<double>(eval_text("ROUND(-2.5, 0)")) == -3);
    CHECK(std::get<double>(eval_text("ROUND(1.235, 2)")) == doctest::Approx(1.24));
    CHECK(std::get<double>(eval_text("-2^2")) == -4);
    CHECK(std::get<double>(eval_text("2^3^2")) == 512);
    CHECK(std::get<std::string>(eval_text("1 & \"a\" & TRUE")) == "1aTRUE");
    CHECK(std::get<ErrorValue>(eval_text("\"a\" + 1")).kind == ErrorKind::Value);
    CHECK(std::get<bool>(eval_text("\"a\" < \"b\"")));
    CHECK(std::get<bool>(eval_text("2 <> 3")));
    CHECK(std::get<double>(eval_text("IF(1 > 2, 1/0, 7)")) == 7);
    CHECK(std::get<ErrorValue>(eval_text("1/0 + \"x\"")).kind == ErrorKind::Div0);
    CHECK(std::get<double>(eval_text("ABS(-3)")) == 3);
    CHECK(std::get<double>(eval_text("MIN(3, 1, 2) + MAX(3, 1, 2)")) == 4);
    CHECK(std::get<bool>(eval_text("AND(TRUE, NOT(FALSE), OR(FALSE, TRUE))")));
    CHECK(std::get<std::string>(eval_text("CONCAT(\"a\", 1, \"b\")")) == "a1b");
    CHECK(std::get<ErrorValue>(eval_text("(-8) ^ 0.5")).kind == ErrorKind::Value);
}

TEST_CASE("empty cells, aggregates and grid names") {
    auto r = evaluate(parse("::: grid name=g\n1,x,\n,TRUE,=A1+C1\n:::\n"
                            "::: formula name=c\nc = COUNT(g)\n:::\n"
                            "::: formula name=s\ns = SUM(g) + g!C1\n:::\n"
                            "::: formula name=e\ne = g!C1 & \"!\"\n:::\n"
                            "::: formula name=z\nz = AVERAGE(g!B1:B2)\n:::\n"
                            "::: formula name=bad\nbad = g + 1\n:::\n"));
    CHECK(num(r, "g!C2") == 1);
    CHECK(num(r, "c") == 2);
    CHECK(num(r, "s") == 2);
    CHECK(std::get<std::string>(r.values.at("e")) == "!");
    CHECK(err(r, "z") == ErrorKind::Div0);
    CHECK(err(r, "bad") == ErrorKind::Value);
}

TEST_CASE("reference errors") {
    auto r = evaluate(parse("::: grid name=g\n1\n:::\n"
                            "::: formula name=a\na = g!D9\n:::\n"
                            "::: formula name=b\nb = nope!A1\n:::\n"
                            "::: formula name=c\nc = ghost + 1\n:::\n"
                            "::: formula name=p\np = 1 +\n:::\n"
                            "::: formula name=q\nq = p\n:::\n"));
    CHECK(err(r, "a") == ErrorKind::Ref);
    CHECK(err(r, "b") == ErrorKind::Ref);
    CHECK(err(r, "c") == ErrorKind::Name);
    CHECK(err(r, "p") == ErrorKind::Parse);
    CHECK(err(r, "q") == ErrorKind::Parse);
}

TEST_CASE("cycles leave the rest of the document intact") {
    auto r = evaluate(parse("::: grid name=g\n=B1,=C1,=A1,5\n:::\n"
                            "::: formula name=ok\nok = g!D1 * 2\n:::\n"
                            "::: formula name=down\ndown = g!A1 + 1\n:::\n"));
    CHECK(err(r, "g!A1") == ErrorKind::Cycle);
    CHECK(err(r, "g!B1") == ErrorKind::Cycle);
    CHECK(err(r, "g!C1") == ErrorKind::Cycle);
    CHECK(num(r, "ok") == 10);
    CHECK(err(r, "down") == ErrorKind::Cycle);
    REQUIRE(count_kind(r.diagnostics, DiagKind::CycleError) == 1);
    auto it = std::find_if(r.diagnostics.begin(), r.diagnostics.end(),
                           [](const Diagnostic& d) { return d.kind == DiagKind::CycleError; });
    CHECK(it->cycle_path.size() == 4);
    CHECK(it->cycle_path.front() == it->cycle_path.back());

    r = evaluate(parse("::: formula name=s\ns = s + 1\n:::\n"));
    CHECK(err(r, "s") == ErrorKind::Cycle);
    CHECK(count_kind(r.diagnostics, DiagKind::CycleError) == 1);
}

TEST_CASE("assertions") {
    const std::string base = "::: grid name=g\n3\n:::\n::: formula name=total\ntotal = g!A1\n:::\n";
    auto doc = parse(base + "::: assert msg=\"Total must be non-negative\"\ntotal >= 0\n:::\n");
    CHECK(check_assertions(doc, evaluate(doc)).empty());

    doc = apply_edit(doc, edit::SetCell{"g", {1, 1}, "-1"});
    auto ds = check_assertions(doc, evaluate(doc));
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].kind == DiagKind::AssertionFailure);
    CHECK(ds[0].message == "Total must be non-negative");

    doc = parse(base + "::: assert\ntotal & \"\"\n:::\n");
    ds = check_assertions(doc, evaluate(doc));
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].message == "assertion did not evaluate to a boolean");

    auto r = evaluate_checked(doc);
    CHECK(count_kind(r.diagnostics, DiagKind::AssertionFailure) == 1);
}

TEST_CASE("results match the reference oracle") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 60; ++i) {
        auto g = lgtest::random_computational_doc(rng);
        auto expected = lgtest::oracle_values(g);
        auto r = evaluate(g.doc);
        for (const auto& [key, want] : expected) {
            INFO(key);
            const Value* got = r.find(key);
            REQUIRE(got != nullptr);
            if (std::holds_alternative<double>(want) && std::holds_alternative<double>(*got)) {
                double a = std::get<double>(want), b = std::get<double>(*got);
                CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)));
            } else {
                CHECK(format_value(*got) == format_value(want));
                CHECK(got->index() == want.index());
            }
        }
    }
}

TEST_CASE("evaluation is deterministic and order independent") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 20; ++i) {
        auto g = lgtest::random_computational_doc(rng);
        auto a = evaluate(g.doc);
        auto b = evaluate(g.doc);
        CHECK(a.diagnostics == b.diagnostics);
        Document shuffled = g.doc;
        std::shuffle(shuffled.chunks.begin(), shuffled.chunks.end(), rng);
        auto c = evaluate(shuffled);
        REQUIRE(a.values.size() == c.values.size());
        for (const auto& [k, v] : a.values)
            CHECK(identical(v, c.values.at(k)));
    }
}
