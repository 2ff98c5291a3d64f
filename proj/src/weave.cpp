#include "litgrid/weave.hpp"
#include "litgrid/error.hpp"
#include "litgrid/expr.hpp"

#include <algorithm>

namespace litgrid {

std::vector<TocEntry> toc(const Document& doc, std::string_view theme) {
    std::vector<TocEntry> roots;
    std::vector<TocEntry*> stack;
    for (const auto& id : theme_view(doc, theme)) {
        const Chunk* c = doc.find(id);
        const Heading* h = c ? c->as<Heading>() : nullptr;
        if (!h)
            continue;
        while (!stack.empty() && stack.back()->level >= h->level)
            stack.pop_back();
        auto& siblings = stack.empty() ? roots : stack.back()->children;
        siblings.push_back(TocEntry{id, h->level, h->title, {}});
        stack.push_back(&siblings.back());
    }
    return roots;
}

namespace {

struct Marker {
    char open;
    std::size_t begin; // of the opening brackets
    std::size_t end;   // past the closing brackets
    std::string inner;
};

// Finds `[[..]]`, `{{..}}` and `((..))` markers on a single line.
std::vector<Marker> find_markers(std::string_view text) {
    std::vector<Marker> out;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        char c = text[i];
        if ((c != '[' && c != '{' && c != '(') || text[i + 1] != c)
            continue;
        std::string_view close = c == '[' ? "]]" : c == '{' ? "}}" : "))";
        std::size_t end = text.find(close, i + 2);
        if (end == std::string_view::npos)
            continue;
        std::string_view inner = text.substr(i + 2, end - i - 2);
        if (inner.find('\n') != std::string_view::npos)
            continue;
        auto b = inner.find_first_not_of(" \t");
        if (b == std::string_view::npos)
            continue;
        auto e = inner.find_last_not_of(" \t");
        out.push_back({c, i, end + 2, std::string(inner.substr(b, e - b + 1))});
        i = end + 1;
    }
    return out;
}

// Chunk id named by a splice target (`total` or `data!B2`).
std::string splice_chunk(const std::string& target) {
    auto bang = target.find('!');
    return bang == std::string::npos ? target : target.substr(0, bang);
}

void add_ref(CrossRefs& x, const std::string& target, const std::string& from) {
    auto& v = x.referrers[target];
    if (std::find(v.begin(), v.end(), from) == v.end())
        v.push_back(from);
}

} // namespace

std::vector<Run> parse_inline(std::string_view text) {
    std::vector<Run> runs;
    auto push_text = [&](std::string_view t) {
        if (t.empty())
            return;
        if (!runs.empty() && runs.back().kind == Run::Kind::Text)
            runs.back().text += t;
        else
            runs.push_back({Run::Kind::Text, std::string(t), {}});
    };
    std::size_t pos = 0;
    for (const auto& m : find_markers(text)) {
        push_text(text.substr(pos, m.begin - pos));
        if (m.open == '[')
            runs.push_back({Run::Kind::Link, m.inner, m.inner});
        else if (m.open == '{')
            runs.push_back({Run::Kind::Splice, {}, m.inner});
        else
            push_text(m.inner);
        pos = m.end;
    }
    push_text(text.substr(pos));
    return runs;
}

CrossRefs cross_refs(const Document& doc) {
    CrossRefs x;
    auto from_expr = [&](const std::string& text, const std::optional<std::string>& ctx, const std::string& from) {
        try {
            auto e = parse_expr(text, ctx);
            for (const auto& ref : refs_of(*e, ctx))
                if (!(ctx && ref.target == *ctx))
                    add_ref(x, ref.target, from);
        } catch (const Error&) {
            // unparseable expressions are reported by validation
        }
    };
    for (const auto& c : doc.chunks) {
        if (auto* n = c.as<Narrative>()) {
            for (const auto& m : find_markers(n->body)) {
                if (m.open == '[')
                    add_ref(x, m.inner, c.id);
                else if (m.open == '{')
                    add_ref(x, splice_chunk(m.inner), c.id);
            }
        } else if (auto* f = c.as<Formula>()) {
            from_expr(f->expr_text, std::nullopt, c.id);
        } else if (auto* a = c.as<Assertion>()) {
            from_expr(a->expr_text, std::nullopt, c.id);
        } else if (auto* g = c.as<Grid>()) {
            for (const auto& [addr, cell] : g->cells)
                if (auto* fc = std::get_if<FormulaCell>(&cell.parsed))
                    from_expr(fc->expr_text, c.id, c.id);
        }
    }
    for (const auto& [target, from] : x.referrers)
        if (!doc.find(target))
            x.unknown.insert(target);
    return x;
}

TermIndex term_index(const Document& doc) {
    std::map<std::string, std::vector<std::string>> terms;
    auto add = [&](const std::string& term, const std::string& id) {
        auto& v = terms[term];
        if (std::find(v.begin(), v.end(), id) == v.end())
            v.push_back(id);
    };
    for (const auto& c : doc.chunks) {
        if (auto* n = c.as<Narrative>()) {
            for (const auto& m : find_markers(n->body))
                if (m.open == '(')
                    add(m.inner, c.id);
        } else if (c.kind() == ChunkKind::Formula || c.kind() == ChunkKind::Grid) {
            add(c.id, c.id);
        }
    }
    TermIndex out(terms.begin(), terms.end());
    auto lower = [](std::string s) {
        for (auto& ch : s)
            if (ch >= 'A' && ch <= 'Z')
                ch = static_cast<char>(ch - 'A' + 'a');
        return s;
    };
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        auto la = lower(a.first), lb = lower(b.first);
        return la != lb ? la < lb : a.first < b.first;
    });
    return out;
}

namespace {

std::string type_tag(const Value& v) {
    switch (v.index()) {
    case 0: return "n";
    case 1: return "s";
    case 2: return "b";
    case 3: return "empty";
    default: return "e";
    }
}

Diagnostic dangling(const std::string& chunk, const std::string& msg) {
    Diagnostic d;
    d.kind = DiagKind::UnknownRef;
    d.severity = Severity::Warning;
    d.chunk = chunk;
    d.message = msg;
    return d;
}

} // namespace

RenderTree weave(const Document& doc, std::string_view theme, const EvalResult& r) {
    RenderTree rt;
    rt.title = doc.title();
    rt.theme = std::string(theme);
    auto view = theme_view(doc, theme);
    std::set<std::string> in_view(view.begin(), view.end());

    for (const auto& id : view) {
        const Chunk* c = doc.find(id);
        if (!c)
            continue;
        Block b;
        b.chunk_id = id;
        std::visit(
            [&](const auto& body) {
                using T = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<T, Heading>) {
                    b.kind = Block::Kind::Heading;
                    b.level = body.level;
                    b.text = body.title;
                } else if constexpr (std::is_same_v<T, Narrative>) {
                    if (body.is_stub) {
                        b.kind = Block::Kind::StubNotice;
                        b.text = body.body;
                        return;
                    }
                    b.kind = Block::Kind::Paragraph;
                    for (auto run : parse_inline(body.body)) {
                        if (run.kind == Run::Kind::Link && !doc.find(run.target)) {
                            rt.diagnostics.push_back(dangling(id, "link to unknown chunk '" + run.target + "'"));
                            run = {Run::Kind::Error, "[[" + run.target + "]]", run.target};
                        } else if (run.kind == Run::Kind::Link && !in_view.count(run.target)) {
                            run.kind = Run::Kind::Text;
                        } else if (run.kind == Run::Kind::Splice) {
                            if (const Value* v = r.find(run.target)) {
                                run.text = format_value(*v);
                            } else {
                                rt.diagnostics.push_back(
                                    dangling(id, "no computed value for '" + run.target + "'"));
                                run = {Run::Kind::Error, "{{" + run.target + "}}", run.target};
                            }
                        }
                        b.runs.push_back(std::move(run));
                    }
                } else if constexpr (std::is_same_v<T, Grid>) {
                    b.kind = Block::Kind::Table;
                    for (int row = 1; row <= body.n_rows; ++row) {
                        std::vector<TableCell> cells;
                        for (int col = 1; col <= body.n_cols; ++col) {
                            CellAddr addr{col, row};
                            const CellContent* content = body.cell(addr);
                            Value v = Empty{};
                            if (const Value* computed = r.find(cell_key(id, addr)))
                                v = *computed;
                            else if (content)
                                v = literal_value(content->parsed);
                            cells.push_back({format_value(v), content ? content->raw : std::string(), type_tag(v),
                                             content && content->is_formula()});
                        }
                        b.rows.push_back(std::move(cells));
                    }
                } else if constexpr (std::is_same_v<T, Formula>) {
                    b.kind = Block::Kind::FormulaDisplay;
                    b.text = canonical_expr_text(body.expr_text).value_or(body.expr_text);
                    b.msg = body.desc.value_or("");
                    const Value* v = r.find(id);
                    Value value = v ? *v : Value(error_value(ErrorKind::Name));
                    b.display = format_value(value);
                    b.value_type = type_tag(value);
                } else if constexpr (std::is_same_v<T, Assertion>) {
                    b.kind = Block::Kind::AssertionBadge;
                    b.text = canonical_expr_text(body.expr_text).value_or(body.expr_text);
                    const Value* v = r.find(id);
                    Value value = v ? *v : Value(error_value(ErrorKind::Name));
                    b.pass = std::holds_alternative<bool>(value) && std::get<bool>(value);
                    b.msg = body.msg.empty() ? "assertion failed: " + b.text : body.msg;
                    b.display = format_value(value);
                    b.value_type = type_tag(value);
                } else if constexpr (std::is_same_v<T, Asset>) {
                    b.kind = Block::Kind::Image;
                    b.src = body.src;
                    b.caption = body.caption;
                }
            },
            c->body);
        rt.blocks.push_back(std::move(b));
    }
    return rt;
}

std::string_view block_kind_name(Block::Kind kind) {
    switch (kind) {
    case Block::Kind::Heading: return "heading";
    case Block::Kind::Paragraph: return "paragraph";
    case Block::Kind::Table: return "table";
    case Block::Kind::FormulaDisplay: return "formula_display";
    case Block::Kind::AssertionBadge: return "assertion_badge";
    case Block::Kind::Image: return "image";
    case Block::Kind::StubNotice: return "stub_notice";
    }
    return "paragraph";
}

namespace {

std::string_view run_kind_name(Run::Kind kind) {
    switch (kind) {
    case Run::Kind::Text: return "text";
    case Run::Kind::Link: return "link";
    case Run::Kind::Splice: return "value_splice";
    case Run::Kind::Error: return "error";
    }
    return "text";
}

} // namespace

Json render_tree_to_json(const RenderTree& rt) {
    Json blocks = Json::array();
    for (const auto& b : rt.blocks) {
        Json j = {{"type", std::string(block_kind_name(b.kind))}, {"id", b.chunk_id}};
        switch (b.kind) {
        case Block::Kind::Heading:
            j["level"] = b.level;
            j["title"] = b.text;
            break;
        case Block::Kind::Paragraph: {
            Json runs = Json::array();
            for (const auto& run : b.runs) {
                Json jr = {{"type", std::string(run_kind_name(run.kind))}, {"text", run.text}};
                if (run.kind == Run::Kind::Link)
                    jr["target"] = run.target;
                else if (run.kind != Run::Kind::Text)
                    jr["node"] = run.target;
                runs.push_back(std::move(jr));
            }
            j["runs"] = std::move(runs);
            break;
        }
        case Block::Kind::Table: {
            Json rows = Json::array();
            for (const auto& row : b.rows) {
                Json jr = Json::array();
                for (const auto& cell : row)
                    jr.push_back({{"display", cell.display},
                                  {"raw", cell.raw},
                                  {"t", cell.type},
                                  {"formula", cell.formula}});
                rows.push_back(std::move(jr));
            }
            j["rows"] = std::move(rows);
            break;
        }
        case Block::Kind::FormulaDisplay:
            j["name"] = b.chunk_id;
            j["expr"] = b.text;
            j["desc"] = b.msg;
            j["display"] = b.display;
            j["t"] = b.value_type;
            break;
        case Block::Kind::AssertionBadge:
            j["expr"] = b.text;
            j["pass"] = b.pass;
            j["msg"] = b.msg;
            j["display"] = b.display;
            j["t"] = b.value_type;
            break;
        case Block::Kind::Image:
            j["src"] = b.src;
            j["caption"] = b.caption;
            break;
        case Block::Kind::StubNotice:
            j["text"] = b.text;
            break;
        }
        blocks.push_back(std::move(j));
    }
    return {{"title", rt.title},
            {"theme", rt.theme},
            {"blocks", std::move(blocks)},
            {"diagnostics", diagnostics_to_json(rt.diagnostics)}};
}

Json toc_to_json(const std::vector<TocEntry>& entries) {
    Json arr = Json::array();
    for (const auto& e : entries)
        arr.push_back({{"id", e.chunk_id}, {"level", e.level}, {"title", e.title}, {"children", toc_to_json(e.children)}});
    return arr;
}

Json cross_refs_to_json(const CrossRefs& x) {
    Json refs = Json::object();
    for (const auto& [target, from] : x.referrers)
        refs[target] = from;
    return {{"referrers", refs}, {"unknown", x.unknown}};
}

Json term_index_to_json(const TermIndex& index) {
    Json arr = Json::array();
    for (const auto& [term, ids] : index)
        arr.push_back({{"term", term}, {"chunks", ids}});
    return arr;
}

// ---------------------------------------------------------------------------

namespace {

std::string esc(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

const char* kStyle = R"(body{font-family:sans-serif;margin:0;display:flex;}
nav#_toc{width:16rem;padding:1rem;border-right:1px solid #ccc;position:sticky;top:0;height:100vh;overflow:auto;}
nav#_toc ul{list-style:none;padding-left:1rem;}
main{flex:1;padding:1rem 2rem;max-width:60rem;}
table.grid{border-collapse:collapse;margin:.5rem 0;}
table.grid td{border:1px solid #bbb;padding:.2rem .5rem;text-align:right;}
td.t-s{text-align:left;} td.t-e,span.err,.dangling{color:#b00;}
.formula code{background:#f4f4f4;padding:.1rem .3rem;}
.badge{padding:.2rem .5rem;border-radius:.3rem;}
.badge.pass{background:#dfd;} .badge.fail{background:#fdd;}
.stub{border-left:3px solid #e90;padding-left:.5rem;color:#850;}
)";

class HtmlWriter {
public:
    HtmlWriter(const RenderTree& rt) : rt_(rt) {
        for (const auto& b : rt.blocks)
            ids_.insert(b.chunk_id);
    }

    std::string link(const std::string& id, std::string_view text) const {
        if (ids_.count(id))
            return "<a href=\"#" + esc(id) + "\">" + esc(text) + "</a>";
        return esc(text);
    }

    void toc(const std::vector<TocEntry>& entries) {
        if (entries.empty())
            return;
        out_ += "<ul>\n";
        for (const auto& e : entries) {
            out_ += "<li>" + link(e.chunk_id, e.title);
            if (!e.children.empty()) {
                out_ += "\n";
                toc(e.children);
            }
            out_ += "</li>\n";
        }
        out_ += "</ul>\n";
    }

    void block(const Block& b) {
        std::string id = esc(b.chunk_id);
        std::string cls = std::string(block_kind_name(b.kind));
        switch (b.kind) {
        case Block::Kind::Heading: {
            std::string tag = "h" + std::to_string(std::clamp(b.level, 1, 4) + 1);
            out_ += "<" + tag + " id=\"" + id + "\" class=\"chunk heading\">" + esc(b.text) + "</" + tag + ">\n";
            return;
        }
        case Block::Kind::Paragraph:
            out_ += "<p id=\"" + id + "\" class=\"chunk paragraph\">";
            for (const auto& run : b.runs) {
                switch (run.kind) {
                case Run::Kind::Text: out_ += esc(run.text); break;
                case Run::Kind::Link: out_ += link(run.target, run.text); break;
                case Run::Kind::Splice:
                    out_ += "<span class=\"splice\" data-node=\"" + esc(run.target) + "\">" + esc(run.text) + "</span>";
                    break;
                case Run::Kind::Error:
                    out_ += "<span class=\"dangling\" title=\"unresolved reference\">" + esc(run.text) + "</span>";
                    break;
                }
            }
            out_ += "</p>\n";
            return;
        case Block::Kind::Table:
            out_ += "<div id=\"" + id + "\" class=\"chunk table\">\n<table class=\"grid\">\n";
            out_ += "<caption>" + esc(b.chunk_id) + "</caption>\n";
            for (const auto& row : b.rows) {
                out_ += "<tr>";
                for (const auto& cell : row) {
                    out_ += "<td class=\"t-" + cell.type + "\"";
                    if (cell.formula)
                        out_ += " title=\"" + esc(cell.raw) + "\"";
                    out_ += ">" + esc(cell.display) + "</td>";
                }
                out_ += "</tr>\n";
            }
            out_ += "</table>\n</div>\n";
            return;
        case Block::Kind::FormulaDisplay:
            out_ += "<div id=\"" + id + "\" class=\"chunk formula\"><code>" + esc(b.chunk_id) + " = " + esc(b.text) +
                    "</code> &rarr; <span class=\"t-" + b.value_type + "\">" + esc(b.display) + "</span>";
            if (!b.msg.empty())
                out_ += " <span class=\"desc\">" + esc(b.msg) + "</span>";
            out_ += "</div>\n";
            return;
        case Block::Kind::AssertionBadge:
            out_ += "<div id=\"" + id + "\" class=\"chunk assertion\"><span class=\"badge " +
                    std::string(b.pass ? "pass" : "fail") + "\">" + (b.pass ? "pass" : "fail") + "</span> <code>" +
                    esc(b.text) + "</code>";
            if (!b.pass)
                out_ += " <span class=\"msg\">" + esc(b.msg) + "</span>";
            out_ += "</div>\n";
            return;
        case Block::Kind::Image:
            out_ += "<figure id=\"" + id + "\" class=\"chunk image\"><img src=\"" + esc(b.src) + "\" alt=\"" +
                    esc(b.caption) + "\"><figcaption>" + esc(b.caption) + "</figcaption></figure>\n";
            return;
        case Block::Kind::StubNotice:
            out_ += "<p id=\"" + id + "\" class=\"chunk stub\">" + esc(b.text) + "</p>\n";
            return;
        }
    }

    std::string& out() { return out_; }

private:
    const RenderTree& rt_;
    std::set<std::string> ids_;
    std::string out_;
};

} // namespace

std::string render_html(const RenderTree& rt, const std::vector<TocEntry>& toc_entries, const CrossRefs& xrefs,
                        const TermIndex& index) {
    HtmlWriter w(rt);
    auto& out = w.out();
    out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    out += "<title>" + esc(rt.title) + "</title>\n<style>\n" + kStyle + "</style>\n</head>\n<body>\n";
    out += "<nav id=\"_toc\">\n<h2>Contents</h2>\n";
    w.toc(toc_entries);
    out += "</nav>\n<main>\n<h1>" + esc(rt.title) + "</h1>\n";
    for (const auto& b : rt.blocks)
        w.block(b);

    out += "<section id=\"_xrefs\">\n<h2>Cross-references</h2>\n<dl>\n";
    for (const auto& [target, from] : xrefs.referrers) {
        out += "<dt>";
        out += xrefs.unknown.count(target) ? "<span class=\"dangling\">" + esc(target) + " (unknown)</span>"
                                           : w.link(target, target);
        out += "</dt><dd>";
        for (std::size_t i = 0; i < from.size(); ++i)
            out += (i ? ", " : "") + w.link(from[i], from[i]);
        out += "</dd>\n";
    }
    out += "</dl>\n</section>\n";

    out += "<section id=\"_index\">\n<h2>Index</h2>\n<dl>\n";
    for (const auto& [term, ids] : index) {
        out += "<dt>" + esc(term) + "</dt><dd>";
        for (std::size_t i = 0; i < ids.size(); ++i)
            out += (i ? ", " : "") + w.link(ids[i], ids[i]);
        out += "</dd>\n";
    }
    out += "</dl>\n</section>\n</main>\n";
    if (!rt.diagnostics.empty()) {
        out += "<!-- ";
        out += std::to_string(rt.diagnostics.size()) + " unresolved reference(s) -->\n";
    }
    out += "</body>\n</html>\n";
    return out;
}

} // namespace litgrid
