#include "litgrid/lsheet.hpp"
#include "litgrid/error.hpp"
#include "litgrid/expr.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace litgrid {

namespace {

std::string normalize_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

std::string join(const std::vector<std::string>& lines, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i)
            out += sep;
        out += lines[i];
    }
    return out;
}

// A line starting with `\` followed by `#`, `:::` or `@` loses one backslash.
bool needs_escape(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && line[i] == '\\')
        ++i;
    std::string_view rest = line.substr(i);
    return rest.starts_with("#") || rest.starts_with(":::") || rest.starts_with("@");
}

std::string unescape_line(std::string_view line) {
    if (line.starts_with("\\") && needs_escape(line))
        return std::string(line.substr(1));
    return std::string(line);
}

std::string escape_line(std::string_view line) {
    if (needs_escape(line))
        return "\\" + std::string(line);
    return std::string(line);
}

int heading_level(std::string_view line) {
    std::size_t n = 0;
    while (n < line.size() && line[n] == '#')
        ++n;
    if (n >= 1 && n <= 4 && n < line.size() && line[n] == ' ')
        return static_cast<int>(n);
    return 0;
}

bool is_meta_line(std::string_view line, std::string& key, std::string& value) {
    if (!line.starts_with("@"))
        return false;
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos || colon == 1)
        return false;
    std::string_view k = line.substr(1, colon - 1);
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
            return false;
    key = std::string(k);
    std::string_view v = line.substr(colon + 1);
    while (!v.empty() && v.front() == ' ')
        v.remove_prefix(1);
    value = std::string(v);
    return true;
}

struct Attrs {
    std::vector<std::pair<std::string, std::string>> items;

    const std::string* get(std::string_view key) const {
        for (const auto& [k, v] : items)
            if (k == key)
                return &v;
        return nullptr;
    }
};

// `key=value key="quoted \" value"`; returns an error message on failure.
std::optional<std::string> parse_attrs(std::string_view text, Attrs& out) {
    std::size_t i = 0;
    while (true) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t'))
            ++i;
        if (i >= text.size())
            return std::nullopt;
        std::size_t key_start = i;
        while (i < text.size() && text[i] != '=' && text[i] != ' ' && text[i] != '\t')
            ++i;
        std::string key(text.substr(key_start, i - key_start));
        if (i >= text.size() || text[i] != '=')
            return "attribute '" + key + "' has no value";
        ++i;
        std::string value;
        if (i < text.size() && text[i] == '"') {
            ++i;
            bool closed = false;
            while (i < text.size()) {
                char c = text[i++];
                if (c == '\\' && i < text.size()) {
                    value.push_back(text[i++]);
                } else if (c == '"') {
                    closed = true;
                    break;
                } else {
                    value.push_back(c);
                }
            }
            if (!closed)
                return "unterminated quoted value for '" + key + "'";
        } else {
            std::size_t v_start = i;
            while (i < text.size() && text[i] != ' ' && text[i] != '\t')
                ++i;
            value = std::string(text.substr(v_start, i - v_start));
        }
        out.items.emplace_back(std::move(key), std::move(value));
    }
}

std::string attr_value(std::string_view v) {
    bool bare = !v.empty() && std::none_of(v.begin(), v.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '"' || c == '\\' || c == '=';
    });
    if (bare)
        return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// CSV over body lines; a quoted field may continue onto following lines.
std::vector<std::vector<std::string>> parse_csv_lines(const std::vector<std::string>& lines, int first_line,
                                                      std::vector<Diagnostic>& diags, const std::string& chunk) {
    if (lines.empty())
        return {};
    try {
        std::string text = join(lines, "\n");
        // Every line is a record, including an empty final one.
        auto records = parse_csv(text + "\n");
        return records;
    } catch (const PositionedError& e) {
        Diagnostic d;
        d.kind = DiagKind::ParseError;
        d.chunk = chunk;
        d.line = first_line + e.line().value_or(1) - 1;
        d.message = e.what();
        diags.push_back(std::move(d));
        return {};
    }
}

struct PendingChunk {
    std::optional<std::string> explicit_id;
    ChunkBody body;
};

class LsheetParser {
public:
    explicit LsheetParser(std::string_view text) : lines_(split_lines(normalize_newlines(text))) {}

    ParseOutput run() {
        std::size_t i = 0;
        // Metadata block.
        while (i < lines_.size()) {
            std::string key, value;
            if (is_blank(lines_[i])) {
                ++i;
            } else if (is_meta_line(lines_[i], key, value)) {
                out_.doc.meta[key] = value;
                ++i;
            } else {
                break;
            }
        }
        if (!out_.doc.meta.count("title"))
            out_.doc.meta["title"] = "untitled";

        while (i < lines_.size()) {
            const std::string& line = lines_[i];
            if (is_blank(line)) {
                ++i;
            } else if (line == ":::") {
                error(i, "closing ':::' without an open block");
                ++i;
            } else if (line.starts_with(":::")) {
                i = fence(i);
            } else if (int level = heading_level(line)) {
                heading(i, level, line.substr(static_cast<std::size_t>(level) + 1));
                ++i;
            } else {
                std::vector<std::string> body;
                while (i < lines_.size() && !is_blank(lines_[i]) && !lines_[i].starts_with(":::") &&
                       !heading_level(lines_[i]))
                    body.push_back(unescape_line(lines_[i++]));
                pending_.push_back({std::nullopt, Narrative{join(body, "\n"), false}});
            }
        }
        assign_ids();
        return std::move(out_);
    }

private:
    void error(std::size_t idx, std::string msg, Severity sev = Severity::Error) {
        Diagnostic d;
        d.kind = DiagKind::ParseError;
        d.severity = sev;
        d.line = static_cast<int>(idx) + 1;
        d.message = std::move(msg);
        out_.diagnostics.push_back(std::move(d));
    }

    void heading(std::size_t idx, int level, std::string_view rest) {
        std::optional<std::string> id;
        std::string title(rest);
        if (title.ends_with("}")) {
            std::size_t open = title.rfind(" {#");
            if (open != std::string::npos) {
                std::string candidate = title.substr(open + 3, title.size() - open - 4);
                if (is_valid_chunk_id(candidate)) {
                    id = candidate;
                    title.erase(open);
                } else {
                    error(idx, "'" + candidate + "' is not a valid chunk id; kept as heading text", Severity::Warning);
                }
            }
        }
        pending_.push_back({id, Heading{level, title}});
    }

    std::size_t fence(std::size_t open) {
        std::string_view header = std::string_view(lines_[open]).substr(3);
        while (!header.empty() && header.front() == ' ')
            header.remove_prefix(1);
        std::size_t sp = header.find_first_of(" \t");
        std::string kind_word(header.substr(0, sp));
        std::string_view attr_text = sp == std::string_view::npos ? std::string_view() : header.substr(sp);

        std::size_t close = open + 1;
        while (close < lines_.size() && lines_[close] != ":::")
            ++close;
        if (close >= lines_.size())
            throw PositionedError(ErrorCode::UnterminatedFence,
                                  "block opened at line " + std::to_string(open + 1) + " is never closed", 0,
                                  static_cast<int>(open) + 1);
        std::vector<std::string> body(lines_.begin() + static_cast<std::ptrdiff_t>(open) + 1,
                                      lines_.begin() + static_cast<std::ptrdiff_t>(close));

        Attrs attrs;
        if (auto err = parse_attrs(attr_text, attrs))
            error(open, *err);

        auto known = [&](std::initializer_list<std::string_view> keys) {
            for (const auto& [k, v] : attrs.items)
                if (std::find(keys.begin(), keys.end(), k) == keys.end())
                    error(open, "unknown attribute '" + k + "' on " + kind_word + " block", Severity::Warning);
        };
        auto explicit_id = [&](std::string_view key) -> std::optional<std::string> {
            if (const auto* v = attrs.get(key)) {
                if (!is_valid_chunk_id(*v))
                    error(open, "invalid chunk id '" + *v + "'");
                return *v;
            }
            return std::nullopt;
        };

        if (kind_word == "narrative") {
            known({"id", "stub"});
            bool stub = false;
            if (const auto* v = attrs.get("stub")) {
                if (*v == "true")
                    stub = true;
                else if (*v != "false")
                    error(open, "stub must be true or false");
            }
            std::vector<std::string> text;
            for (const auto& l : body)
                text.push_back(unescape_line(l));
            pending_.push_back({explicit_id("id"), Narrative{join(text, "\n"), stub}});
        } else if (kind_word == "formula") {
            known({"name", "desc"});
            formula(open, body, attrs);
        } else if (kind_word == "grid") {
            known({"name", "rows", "cols"});
            Grid grid;
            auto records = parse_csv_lines(body, static_cast<int>(open) + 2, out_.diagnostics,
                                           attrs.get("name") ? *attrs.get("name") : std::string());
            grid.n_rows = static_cast<int>(records.size());
            for (std::size_t r = 0; r < records.size(); ++r) {
                grid.n_cols = std::max(grid.n_cols, static_cast<int>(records[r].size()));
                for (std::size_t c = 0; c < records[r].size(); ++c)
                    if (!records[r][c].empty())
                        grid.cells[CellAddr{static_cast<int>(c) + 1, static_cast<int>(r) + 1}] =
                            CellContent::from_raw(records[r][c]);
            }
            if (const auto* rows = attrs.get("rows"))
                grid.n_rows = std::max(grid.n_rows, std::atoi(rows->c_str()));
            if (const auto* cols = attrs.get("cols"))
                grid.n_cols = std::max(grid.n_cols, std::atoi(cols->c_str()));
            auto id = explicit_id("name");
            if (!id)
                error(open, "grid block needs a name attribute");
            pending_.push_back({id, std::move(grid)});
        } else if (kind_word == "assert") {
            known({"id", "msg"});
            Assertion a;
            a.msg = attrs.get("msg") ? *attrs.get("msg") : std::string();
            a.expr_text = single_line(open, body, "assert");
            if (auto canon = canonical_expr_text(a.expr_text))
                a.expr_text = *canon;
            pending_.push_back({explicit_id("id"), std::move(a)});
        } else if (kind_word == "asset") {
            known({"id", "src", "caption"});
            Asset a;
            a.src = attrs.get("src") ? *attrs.get("src") : std::string();
            a.caption = attrs.get("caption") ? *attrs.get("caption") : std::string();
            if (a.src.empty())
                error(open, "asset block needs a src attribute");
            for (std::size_t k = 0; k < body.size(); ++k)
                if (!is_blank(body[k]))
                    error(open + 1 + k, "asset blocks take no body");
            pending_.push_back({explicit_id("id"), std::move(a)});
        } else if (kind_word == "theme") {
            known({"name"});
            ThemeDef t;
            for (const auto& l : body) {
                auto member = trim(l);
                if (!member.empty())
                    t.member_ids.emplace_back(member);
            }
            auto id = explicit_id("name");
            if (!id)
                error(open, "theme block needs a name attribute");
            pending_.push_back({id, std::move(t)});
        } else {
            error(open, "unknown block kind '" + kind_word + "'");
        }
        return close + 1;
    }

    std::string single_line(std::size_t open, const std::vector<std::string>& body, std::string_view what) {
        std::vector<std::string> content;
        for (std::size_t k = 0; k < body.size(); ++k) {
            if (is_blank(body[k]))
                continue;
            if (!content.empty())
                error(open + 1 + k, std::string(what) + " body must be a single line");
            else
                content.push_back(body[k]);
        }
        if (content.empty()) {
            error(open, std::string(what) + " block has no expression");
            return {};
        }
        return std::string(trim(content.front()));
    }

    void formula(std::size_t open, const std::vector<std::string>& body, const Attrs& attrs) {
        std::string line = single_line(open, body, "formula");
        std::optional<std::string> name = attrs.get("name") ? std::optional(*attrs.get("name")) : std::nullopt;
        std::string expr = line;
        // `name = expr` when the line starts with an id followed by '='.
        std::size_t eq = line.find('=');
        if (eq != std::string::npos) {
            std::string lhs(trim(std::string_view(line).substr(0, eq)));
            bool followed_by_op = eq + 1 < line.size() && line[eq + 1] == '=';
            if (!lhs.empty() && !followed_by_op &&
                std::all_of(lhs.begin(), lhs.end(), [](char c) {
                    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
                }) &&
                lhs[0] >= 'a' && lhs[0] <= 'z') {
                if (name && *name != lhs)
                    error(open + 1, "formula name '" + lhs + "' does not match name attribute '" + *name + "'");
                if (!name)
                    name = lhs;
                expr = std::string(trim(std::string_view(line).substr(eq + 1)));
            }
        }
        if (!name)
            error(open, "formula block needs a name");
        else if (!is_valid_chunk_id(*name))
            error(open, "invalid chunk id '" + *name + "'");
        Formula f;
        f.expr_text = canonical_expr_text(expr).value_or(expr);
        if (const auto* d = attrs.get("desc"))
            f.desc = *d;
        pending_.push_back({name, std::move(f)});
    }

    void assign_ids() {
        std::map<ChunkKind, int> counters;
        for (auto& p : pending_) {
            Chunk c;
            c.body = std::move(p.body);
            if (p.explicit_id) {
                c.id = *p.explicit_id;
            } else {
                int n = ++counters[c.kind()];
                c.id = std::string(kind_name(c.kind())) + "-" + std::to_string(n);
            }
            out_.doc.chunks.push_back(std::move(c));
        }
    }

    std::vector<std::string> lines_;
    std::vector<PendingChunk> pending_;
    ParseOutput out_;
};

} // namespace

ParseOutput parse_lsheet(std::string_view text) { return LsheetParser(text).run(); }

// ---------------------------------------------------------------------------

namespace {

bool auto_id_kind(ChunkKind k) {
    return k == ChunkKind::Heading || k == ChunkKind::Narrative || k == ChunkKind::Assertion ||
           k == ChunkKind::Asset;
}

void emit_fence_body_lines(const std::string& body, std::string& out) {
    if (body.empty())
        return;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = body.find('\n', start);
        std::string_view line = std::string_view(body).substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        out += escape_line(line);
        out.push_back('\n');
        if (nl == std::string::npos)
            break;
        start = nl + 1;
    }
}

bool plain_narrative_ok(const std::string& body) {
    if (body.empty())
        return false;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = body.find('\n', start);
        std::string_view line = std::string_view(body).substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        if (is_blank(line))
            return false;
        if (nl == std::string::npos)
            return true;
        start = nl + 1;
    }
}

std::string expr_for_output(const std::string& text) {
    return canonical_expr_text(text).value_or(text);
}

} // namespace

std::string serialize_lsheet(const Document& doc) {
    std::string out;
    auto meta = doc.meta;
    if (!meta.count("title"))
        meta["title"] = "untitled";
    for (const auto& [k, v] : meta)
        out += "@" + k + ": " + v + "\n";

    std::map<ChunkKind, int> counters;
    for (const auto& c : doc.chunks) {
        out.push_back('\n');
        bool implicit = false;
        if (auto_id_kind(c.kind())) {
            std::string expected =
                std::string(kind_name(c.kind())) + "-" + std::to_string(counters[c.kind()] + 1);
            if (c.id == expected) {
                implicit = true;
                ++counters[c.kind()];
            }
        }
        std::visit(
            [&](const auto& b) {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, Heading>) {
                    out += std::string(static_cast<std::size_t>(std::clamp(b.level, 1, 4)), '#');
                    out += " " + b.title;
                    if (!implicit)
                        out += " {#" + c.id + "}";
                    out.push_back('\n');
                } else if constexpr (std::is_same_v<T, Narrative>) {
                    if (implicit && !b.is_stub && plain_narrative_ok(b.body)) {
                        emit_fence_body_lines(b.body, out);
                    } else {
                        out += "::: narrative";
                        if (b.is_stub)
                            out += " stub=true";
                        if (!implicit)
                            out += " id=" + attr_value(c.id);
                        out.push_back('\n');
                        emit_fence_body_lines(b.body, out);
                        out += ":::\n";
                    }
                } else if constexpr (std::is_same_v<T, Grid>) {
                    out += "::: grid name=" + attr_value(c.id);
                    if (b.n_rows == 0 && b.n_cols > 0)
                        out += " cols=" + std::to_string(b.n_cols);
                    if (b.n_cols == 0 && b.n_rows > 0)
                        out += " rows=" + std::to_string(b.n_rows);
                    out.push_back('\n');
                    if (b.n_cols > 0) {
                        for (int r = 1; r <= b.n_rows; ++r) {
                            for (int col = 1; col <= b.n_cols; ++col) {
                                if (col > 1)
                                    out.push_back(',');
                                if (const auto* cell = b.cell(CellAddr{col, r}))
                                    out += csv_field(cell->raw);
                            }
                            out.push_back('\n');
                        }
                    }
                    out += ":::\n";
                } else if constexpr (std::is_same_v<T, Formula>) {
                    out += "::: formula name=" + attr_value(c.id);
                    if (b.desc)
                        out += " desc=" + attr_value(*b.desc);
                    out += "\n" + c.id + " = " + expr_for_output(b.expr_text) + "\n:::\n";
                } else if constexpr (std::is_same_v<T, Assertion>) {
                    out += "::: assert";
                    if (!implicit)
                        out += " id=" + attr_value(c.id);
                    out += " msg=" + attr_value(b.msg);
                    out += "\n" + expr_for_output(b.expr_text) + "\n:::\n";
                } else if constexpr (std::is_same_v<T, Asset>) {
                    out += "::: asset";
                    if (!implicit)
                        out += " id=" + attr_value(c.id);
                    out += " src=" + attr_value(b.src) + " caption=" + attr_value(b.caption) + "\n:::\n";
                } else {
                    out += "::: theme name=" + attr_value(c.id) + "\n";
                    for (const auto& m : b.member_ids)
                        out += m + "\n";
                    out += ":::\n";
                }
            },
            c.body);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(std::string_view raw) {
    const std::string normalized = normalize_newlines(raw);
    const std::string_view text = normalized;
    std::vector<std::vector<std::string>> records;
    if (text.empty())
        return records;
    std::vector<std::string> record;
    std::string field;
    int row = 1;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg) {
        int col = static_cast<int>(record.size()) + 1;
        throw PositionedError(ErrorCode::CsvError,
                              "CSV error at row " + std::to_string(row) + ", column " + std::to_string(col) + ": " +
                                  msg,
                              i, row, col);
    };
    while (i < text.size()) {
        // Start of a field.
        if (text[i] == '"') {
            ++i;
            while (true) {
                if (i >= text.size())
                    fail("unterminated quoted field");
                char c = text[i++];
                if (c == '"') {
                    if (i < text.size() && text[i] == '"') {
                        field.push_back('"');
                        ++i;
                        continue;
                    }
                    break;
                }
                field.push_back(c);
            }
            if (i < text.size() && text[i] != ',' && text[i] != '\n')
                fail("unexpected character after closing quote");
        } else {
            while (i < text.size() && text[i] != ',' && text[i] != '\n') {
                if (text[i] == '"')
                    fail("quote inside unquoted field");
                field.push_back(text[i++]);
            }
        }
        record.push_back(std::move(field));
        field.clear();
        if (i >= text.size()) {
            records.push_back(std::move(record));
            break;
        }
        if (text[i] == ',') {
            ++i;
            if (i >= text.size()) {
                record.emplace_back();
                records.push_back(std::move(record));
                break;
            }
            continue;
        }
        // newline
        ++i;
        records.push_back(std::move(record));
        record.clear();
        ++row;
    }
    return records;
}

std::string csv_field(std::string_view field) {
    bool quote = field.find_first_of(",\"\n\r") != std::string_view::npos || field.starts_with(":::");
    if (!quote)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string id_from_name(std::string_view name) {
    std::string id;
    for (char c : name) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') || l == '_' || l == '-')
            id.push_back(l);
        else
            id.push_back('_');
    }
    if (id.empty() || id[0] < 'a' || id[0] > 'z')
        id.insert(id.begin(), 'g');
    if (id.size() > 63)
        id.resize(63);
    if (looks_like_cell_addr(id))
        id.push_back('_');
    return id;
}

Document import_grid_csv(std::string_view text, std::string_view name) {
    std::string normalized = normalize_newlines(text);
    auto records = parse_csv(normalized);
    Grid grid;
    grid.n_rows = static_cast<int>(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        grid.n_cols = std::max(grid.n_cols, static_cast<int>(records[r].size()));
        for (std::size_t c = 0; c < records[r].size(); ++c)
            if (!records[r][c].empty())
                grid.cells[CellAddr{static_cast<int>(c) + 1, static_cast<int>(r) + 1}] =
                    CellContent::from_raw(records[r][c]);
    }
    Document doc;
    doc.meta["title"] = std::string(name);
    doc.meta["imported"] = "true";
    doc.chunks.push_back(Chunk{id_from_name(name), std::move(grid)});
    return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path.string());
}

ParseOutput load_document(const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    if (path.extension() == ".csv")
        return ParseOutput{import_grid_csv(text, path.stem().string()), {}};
    return parse_lsheet(text);
}

} // namespace litgrid
