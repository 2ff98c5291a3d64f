#include "litgrid/json_io.hpp"
#include "litgrid/error.hpp"

namespace litgrid {

std::string dump_json(const Json& j, int indent) {
    return j.dump(indent, ' ', false, Json::error_handler_t::replace);
}

namespace {

std::string quote(std::string_view s) { return dump_json(Json(std::string(s))); }

} // namespace

std::string value_to_json(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>)
                return R"({"t":"n","v":)" + format_number(x) + "}";
            else if constexpr (std::is_same_v<T, std::string>)
                return R"({"t":"s","v":)" + quote(x) + "}";
            else if constexpr (std::is_same_v<T, bool>)
                return std::string(R"({"t":"b","v":)") + (x ? "true" : "false") + "}";
            else if constexpr (std::is_same_v<T, Empty>)
                return R"({"t":"empty","v":null})";
            else
                return R"({"t":"e","v":")" + std::string(to_string(x.kind)) + "\"}";
        },
        v);
}

std::string values_to_json(const EvalResult& r) {
    std::string out = R"({"values":{)";
    bool first = true;
    for (const auto& [key, value] : r.values) { // std::map: already ascending
        if (!first)
            out.push_back(',');
        first = false;
        out += quote(key) + ":" + value_to_json(value);
    }
    out += R"(},"diagnostics":)" + dump_json(diagnostics_to_json(r.diagnostics)) + "}";
    return out;
}

Json diagnostic_to_json(const Diagnostic& d) {
    Json j = {
        {"kind", std::string(to_string(d.kind))},
        {"severity", std::string(to_string(d.severity))},
        {"chunk", d.chunk},
        {"message", d.message},
    };
    if (d.cell)
        j["cell"] = to_string(*d.cell);
    if (d.line)
        j["line"] = *d.line;
    if (!d.cycle_path.empty())
        j["cycle_path"] = d.cycle_path;
    return j;
}

Json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
    Json arr = Json::array();
    for (const auto& d : diags)
        arr.push_back(diagnostic_to_json(d));
    return arr;
}

Json chunk_to_json(const Chunk& c) {
    Json j = {{"id", c.id}, {"kind", std::string(kind_name(c.kind()))}};
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Heading>) {
                j["level"] = b.level;
                j["title"] = b.title;
            } else if constexpr (std::is_same_v<T, Narrative>) {
                j["body"] = b.body;
                j["stub"] = b.is_stub;
            } else if constexpr (std::is_same_v<T, Grid>) {
                j["rows"] = b.n_rows;
                j["cols"] = b.n_cols;
                Json cells = Json::object();
                for (const auto& [addr, content] : b.cells)
                    cells[to_string(addr)] = content.raw;
                j["cells"] = std::move(cells);
            } else if constexpr (std::is_same_v<T, Formula>) {
                j["expr"] = b.expr_text;
                j["desc"] = b.desc ? Json(*b.desc) : Json(nullptr);
            } else if constexpr (std::is_same_v<T, Assertion>) {
                j["expr"] = b.expr_text;
                j["msg"] = b.msg;
            } else if constexpr (std::is_same_v<T, Asset>) {
                j["src"] = b.src;
                j["caption"] = b.caption;
            } else {
                j["members"] = b.member_ids;
            }
        },
        c.body);
    return j;
}

Json document_to_json(const Document& doc) {
    Json chunks = Json::array();
    for (const auto& c : doc.chunks)
        chunks.push_back(chunk_to_json(c));
    Json meta = Json::object();
    for (const auto& [k, v] : doc.meta)
        meta[k] = v;
    return {{"meta", meta}, {"title", doc.title()}, {"revision", doc.revision}, {"chunks", chunks}};
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::BadEdit, msg); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object())
        bad("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end())
        bad(std::string("missing field '") + key + "'");
    return *it;
}

std::string str_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string())
        bad(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::string str_or(const Json& j, const char* key, std::string fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return fallback;
    if (!it->is_string())
        bad(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::int64_t int_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer())
        bad(std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::size_t index_field(const Json& j, const char* key) {
    auto v = int_field(j, key);
    if (v < 0)
        bad(std::string("field '") + key + "' must not be negative");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> str_list(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_array())
        bad(std::string("field '") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string())
            bad(std::string("field '") + key + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

CellAddr cell_field(const Json& j, const char* key) {
    auto text = str_field(j, key);
    auto addr = parse_cell_addr(text);
    if (!addr)
        bad("bad cell address '" + text + "'");
    return *addr;
}

} // namespace

ChunkBody chunk_body_from_json(const Json& j) {
    auto kind = kind_from_name(str_field(j, "kind"));
    if (!kind)
        bad("unknown chunk kind '" + str_field(j, "kind") + "'");
    switch (*kind) {
    case ChunkKind::Heading:
        return Heading{static_cast<int>(int_field(j, "level")), str_field(j, "title")};
    case ChunkKind::Narrative: {
        bool stub = false;
        if (auto it = j.find("stub"); it != j.end()) {
            if (!it->is_boolean())
                bad("field 'stub' must be a boolean");
            stub = it->get<bool>();
        }
        return Narrative{str_field(j, "body"), stub};
    }
    case ChunkKind::Grid: {
        Grid g;
        g.n_rows = static_cast<int>(j.contains("rows") ? int_field(j, "rows") : 0);
        g.n_cols = static_cast<int>(j.contains("cols") ? int_field(j, "cols") : 0);
        if (g.n_rows < 0 || g.n_cols < 0)
            bad("grid dimensions must not be negative");
        if (auto it = j.find("cells"); it != j.end()) {
            if (!it->is_object())
                bad("field 'cells' must be an object");
            for (const auto& [key, raw] : it->items()) {
                auto addr = parse_cell_addr(key);
                if (!addr)
                    bad("bad cell address '" + key + "'");
                if (!raw.is_string())
                    bad("cell " + key + " must be a string");
                if (raw.get<std::string>().empty())
                    continue;
                g.cells[*addr] = CellContent::from_raw(raw.get<std::string>());
                g.n_rows = std::max(g.n_rows, addr->row);
                g.n_cols = std::max(g.n_cols, addr->column);
            }
        }
        return g;
    }
    case ChunkKind::Formula: {
        Formula f{str_field(j, "expr"), std::nullopt};
        if (auto it = j.find("desc"); it != j.end() && !it->is_null())
            f.desc = str_field(j, "desc");
        return f;
    }
    case ChunkKind::Assertion:
        return Assertion{str_field(j, "expr"), str_or(j, "msg", "")};
    case ChunkKind::Asset:
        return Asset{str_field(j, "src"), str_or(j, "caption", "")};
    case ChunkKind::ThemeDef:
        return ThemeDef{str_list(j, "members")};
    }
    bad("unknown chunk kind");
}

Chunk chunk_from_json(const Json& j) { return Chunk{str_field(j, "id"), chunk_body_from_json(j)}; }

Edit edit_from_json(const Json& j) {
    auto op = str_field(j, "op");
    if (op == "set_cell")
        return edit::SetCell{str_field(j, "grid"), cell_field(j, "cell"), str_field(j, "raw")};
    if (op == "set_chunk")
        return edit::SetChunk{str_field(j, "id"), chunk_body_from_json(field(j, "chunk"))};
    if (op == "insert_chunk")
        return edit::InsertChunk{index_field(j, "index"), chunk_from_json(field(j, "chunk"))};
    if (op == "delete_chunk")
        return edit::DeleteChunk{str_field(j, "id")};
    if (op == "move_chunk")
        return edit::MoveChunk{str_field(j, "id"), index_field(j, "index")};
    if (op == "set_theme")
        return edit::SetTheme{str_field(j, "name"), str_list(j, "members")};
    bad("unknown edit op '" + op + "'");
}

} // namespace litgrid
