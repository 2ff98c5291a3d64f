#include "litgrid/model.hpp"
#include "litgrid/error.hpp"
#include "litgrid/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace litgrid {

std::optional<double> parse_number_literal(std::string_view text) {
    std::size_t i = 0;
    auto digits = [&] {
        std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9')
            ++i;
        return i - start;
    };
    if (i < text.size() && (text[i] == '+' || text[i] == '-'))
        ++i;
    std::size_t int_digits = digits();
    std::size_t frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        frac_digits = digits();
    }
    if (int_digits + frac_digits == 0)
        return std::nullopt;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        if (i < text.size() && (text[i] == '+' || text[i] == '-'))
            ++i;
        if (digits() == 0)
            return std::nullopt;
    }
    if (i != text.size())
        return std::nullopt;

    std::string normalized(text);
    if (normalized.front() == '+')
        normalized.erase(normalized.begin());
    bool neg = !normalized.empty() && normalized.front() == '-';
    if (neg)
        normalized.erase(normalized.begin());
    if (normalized.front() == '.')
        normalized.insert(normalized.begin(), '0');
    double v = 0;
    auto [ptr, ec] = std::from_chars(normalized.data(), normalized.data() + normalized.size(), v);
    if (ec != std::errc() || ptr != normalized.data() + normalized.size() || !std::isfinite(v))
        return std::nullopt;
    return neg ? -v : v;
}

CellContent CellContent::from_raw(std::string raw) {
    CellContent c;
    c.raw = std::move(raw);
    if (c.raw.empty())
        c.parsed = Empty{};
    else if (c.raw.front() == '=')
        c.parsed = FormulaCell{c.raw.substr(1)};
    else if (c.raw == "TRUE")
        c.parsed = true;
    else if (c.raw == "FALSE")
        c.parsed = false;
    else if (auto n = parse_number_literal(c.raw))
        c.parsed = *n;
    else
        c.parsed = c.raw;
    return c;
}

const CellContent* Grid::cell(CellAddr addr) const {
    auto it = cells.find(addr);
    return it == cells.end() ? nullptr : &it->second;
}

std::string_view kind_name(ChunkKind kind) {
    switch (kind) {
    case ChunkKind::Heading: return "heading";
    case ChunkKind::Narrative: return "narrative";
    case ChunkKind::Grid: return "grid";
    case ChunkKind::Formula: return "formula";
    case ChunkKind::Assertion: return "assert";
    case ChunkKind::Asset: return "asset";
    case ChunkKind::ThemeDef: return "theme";
    }
    return "chunk";
}

std::optional<ChunkKind> kind_from_name(std::string_view name) {
    for (int k = 0; k <= static_cast<int>(ChunkKind::ThemeDef); ++k)
        if (kind_name(static_cast<ChunkKind>(k)) == name)
            return static_cast<ChunkKind>(k);
    return std::nullopt;
}

const Chunk* Document::find(std::string_view id) const {
    for (const auto& c : chunks)
        if (c.id == id)
            return &c;
    return nullptr;
}

std::optional<std::size_t> Document::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < chunks.size(); ++i)
        if (chunks[i].id == id)
            return i;
    return std::nullopt;
}

std::string Document::title() const {
    auto it = meta.find("title");
    return it == meta.end() ? std::string("untitled") : it->second;
}

std::string_view to_string(DiagKind kind) {
    switch (kind) {
    case DiagKind::ParseError: return "ParseError";
    case DiagKind::UnknownRef: return "UnknownRef";
    case DiagKind::CycleError: return "CycleError";
    case DiagKind::TypeError: return "TypeError";
    case DiagKind::AssertionFailure: return "AssertionFailure";
    case DiagKind::DuplicateId: return "DuplicateId";
    case DiagKind::BadTheme: return "BadTheme";
    case DiagKind::StubSuggestion: return "StubSuggestion";
    case DiagKind::InvalidId: return "InvalidId";
    }
    return "Unknown";
}

std::string_view to_string(Severity severity) {
    switch (severity) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
    }
    return "error";
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string out = d.chunk.empty() ? std::string("<document>") : d.chunk;
    if (d.cell)
        out += "!" + to_string(*d.cell);
    if (d.line)
        out += ":" + std::to_string(*d.line);
    out += ": ";
    out += to_string(d.severity);
    out += ": ";
    out += to_string(d.kind);
    out += ": ";
    out += d.message;
    if (!d.cycle_path.empty()) {
        out += " [";
        for (std::size_t i = 0; i < d.cycle_path.size(); ++i) {
            if (i)
                out += " -> ";
            out += d.cycle_path[i];
        }
        out += "]";
    }
    return out;
}

std::size_t count_severity(std::span<const Diagnostic> diags, Severity severity) {
    return static_cast<std::size_t>(
        std::count_if(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.severity == severity; }));
}

// ---------------------------------------------------------------------------

namespace {

Diagnostic make_diag(DiagKind kind, Severity sev, std::string chunk, std::string message,
                     std::optional<CellAddr> cell = std::nullopt) {
    Diagnostic d;
    d.kind = kind;
    d.severity = sev;
    d.chunk = std::move(chunk);
    d.cell = cell;
    d.message = std::move(message);
    return d;
}

void check_expr(std::string_view text, const std::optional<std::string>& ctx, const std::string& chunk,
                std::optional<CellAddr> cell, std::vector<Diagnostic>& out) {
    try {
        parse_expr(text, ctx);
    } catch (const Error& e) {
        out.push_back(make_diag(DiagKind::ParseError, Severity::Error, chunk, e.what(), cell));
    }
}

} // namespace

std::vector<Diagnostic> validate_document(const Document& doc) {
    std::vector<Diagnostic> out;
    std::map<std::string, int> seen;
    for (const auto& c : doc.chunks)
        ++seen[c.id];

    std::set<std::string> reported;
    for (const auto& c : doc.chunks) {
        if (seen[c.id] > 1 && reported.insert(c.id).second)
            out.push_back(make_diag(DiagKind::DuplicateId, Severity::Error, c.id,
                                    "id '" + c.id + "' is used by " + std::to_string(seen[c.id]) + " chunks"));
        if (!is_valid_chunk_id(c.id)) {
            std::string why = looks_like_cell_addr(c.id) ? "looks like a cell address"
                                                          : "must match [a-z][a-z0-9_-]* (max 64 chars)";
            out.push_back(make_diag(DiagKind::InvalidId, Severity::Error, c.id, "chunk id '" + c.id + "' " + why));
        }
    }

    for (const auto& c : doc.chunks) {
        std::visit(
            [&](const auto& body) {
                using T = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<T, ThemeDef>) {
                    if (c.id == kAllTheme)
                        out.push_back(make_diag(DiagKind::BadTheme, Severity::Error, c.id,
                                                "theme name 'all' is reserved"));
                    std::set<std::string> members;
                    for (const auto& m : body.member_ids) {
                        const Chunk* target = doc.find(m);
                        if (!target)
                            out.push_back(make_diag(DiagKind::BadTheme, Severity::Error, c.id,
                                                    "theme member '" + m + "' does not exist"));
                        else if (target->kind() == ChunkKind::ThemeDef)
                            out.push_back(make_diag(DiagKind::BadTheme, Severity::Error, c.id,
                                                    "theme member '" + m + "' is a theme"));
                        if (!members.insert(m).second)
                            out.push_back(make_diag(DiagKind::BadTheme, Severity::Warning, c.id,
                                                    "theme member '" + m + "' is listed twice"));
                    }
                } else if constexpr (std::is_same_v<T, Heading>) {
                    if (body.level < 1 || body.level > 4)
                        out.push_back(make_diag(DiagKind::ParseError, Severity::Error, c.id,
                                                "heading level must be 1..4"));
                } else if constexpr (std::is_same_v<T, Narrative>) {
                    if (body.is_stub && body.body.rfind("TODO:", 0) != 0)
                        out.push_back(make_diag(DiagKind::StubSuggestion, Severity::Warning, c.id,
                                                "stub narrative should begin with 'TODO:'"));
                } else if constexpr (std::is_same_v<T, Grid>) {
                    for (const auto& [addr, cell] : body.cells) {
                        if (!body.in_bounds(addr))
                            out.push_back(make_diag(DiagKind::ParseError, Severity::Error, c.id,
                                                    "cell outside the grid bounds", addr));
                        if (auto* f = std::get_if<FormulaCell>(&cell.parsed))
                            check_expr(f->expr_text, c.id, c.id, addr, out);
                    }
                } else if constexpr (std::is_same_v<T, Formula>) {
                    check_expr(body.expr_text, std::nullopt, c.id, std::nullopt, out);
                } else if constexpr (std::is_same_v<T, Assertion>) {
                    check_expr(body.expr_text, std::nullopt, c.id, std::nullopt, out);
                }
            },
            c.body);
    }
    return out;
}

std::vector<std::string> theme_view(const Document& doc, std::string_view theme) {
    std::vector<std::string> ids;
    if (theme == kAllTheme) {
        for (const auto& c : doc.chunks)
            if (c.kind() != ChunkKind::ThemeDef)
                ids.push_back(c.id);
        return ids;
    }
    for (const auto& c : doc.chunks)
        if (c.id == theme)
            if (auto* t = c.as<ThemeDef>())
                return t->member_ids;
    throw Error(ErrorCode::UnknownTheme, "unknown theme '" + std::string(theme) + "'");
}

std::vector<std::string> theme_names(const Document& doc) {
    std::vector<std::string> names{std::string(kAllTheme)};
    for (const auto& c : doc.chunks)
        if (c.kind() == ChunkKind::ThemeDef)
            names.push_back(c.id);
    return names;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t require_index(const Document& doc, std::string_view id) {
    auto idx = doc.index_of(id);
    if (!idx)
        throw Error(ErrorCode::UnknownChunk, "unknown chunk '" + std::string(id) + "'");
    return *idx;
}

void require_new_id(const Document& doc, const std::string& id) {
    if (!is_valid_chunk_id(id))
        throw Error(ErrorCode::InvalidId, "invalid chunk id '" + id + "'");
    if (doc.find(id))
        throw Error(ErrorCode::IdCollision, "chunk id '" + id + "' already exists");
}

void apply_in_place(Document& doc, const Edit& e, const GridLimits& limits) {
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, edit::SetCell>) {
                std::size_t idx = require_index(doc, op.grid);
                auto* grid = doc.chunks[idx].template as<Grid>();
                if (!grid)
                    throw Error(ErrorCode::UnknownChunk, "chunk '" + op.grid + "' is not a grid");
                if (op.addr.row < 1 || op.addr.column < 1 || op.addr.row > limits.max_rows ||
                    op.addr.column > limits.max_cols)
                    throw Error(ErrorCode::GridBoundsExceeded,
                                "cell " + to_string(op.addr) + " exceeds the grid size cap of " +
                                    std::to_string(limits.max_rows) + " rows x " +
                                    std::to_string(limits.max_cols) + " columns");
                grid->n_rows = std::max(grid->n_rows, op.addr.row);
                grid->n_cols = std::max(grid->n_cols, op.addr.column);
                if (op.raw.empty())
                    grid->cells.erase(op.addr);
                else
                    grid->cells[op.addr] = CellContent::from_raw(op.raw);
            } else if constexpr (std::is_same_v<T, edit::SetChunk>) {
                std::size_t idx = require_index(doc, op.id);
                doc.chunks[idx].body = op.body;
            } else if constexpr (std::is_same_v<T, edit::InsertChunk>) {
                if (op.index > doc.chunks.size())
                    throw Error(ErrorCode::BadIndex, "insert index " + std::to_string(op.index) +
                                                         " outside 0.." + std::to_string(doc.chunks.size()));
                require_new_id(doc, op.chunk.id);
                doc.chunks.insert(doc.chunks.begin() + static_cast<std::ptrdiff_t>(op.index), op.chunk);
            } else if constexpr (std::is_same_v<T, edit::DeleteChunk>) {
                std::size_t idx = require_index(doc, op.id);
                doc.chunks.erase(doc.chunks.begin() + static_cast<std::ptrdiff_t>(idx));
            } else if constexpr (std::is_same_v<T, edit::MoveChunk>) {
                std::size_t idx = require_index(doc, op.id);
                if (op.index >= doc.chunks.size())
                    throw Error(ErrorCode::BadIndex, "move index " + std::to_string(op.index) +
                                                         " outside 0.." + std::to_string(doc.chunks.size() - 1));
                Chunk moved = std::move(doc.chunks[idx]);
                doc.chunks.erase(doc.chunks.begin() + static_cast<std::ptrdiff_t>(idx));
                doc.chunks.insert(doc.chunks.begin() + static_cast<std::ptrdiff_t>(op.index), std::move(moved));
            } else if constexpr (std::is_same_v<T, edit::SetTheme>) {
                if (op.name == kAllTheme)
                    throw Error(ErrorCode::InvalidId, "theme name 'all' is reserved");
                if (auto idx = doc.index_of(op.name)) {
                    auto* theme = doc.chunks[*idx].template as<ThemeDef>();
                    if (!theme)
                        throw Error(ErrorCode::IdCollision, "chunk '" + op.name + "' is not a theme");
                    theme->member_ids = op.member_ids;
                } else {
                    require_new_id(doc, op.name);
                    doc.chunks.push_back(Chunk{op.name, ThemeDef{op.member_ids}});
                }
            }
        },
        e);
}

} // namespace

Document apply_edit(const Document& doc, const Edit& e, const GridLimits& limits) {
    Document next = doc;
    apply_in_place(next, e, limits);
    next.revision = doc.revision + 1;
    return next;
}

Document apply_edits(const Document& doc, std::span<const Edit> edits, const GridLimits& limits) {
    Document next = doc;
    for (const auto& e : edits)
        apply_in_place(next, e, limits);
    next.revision = doc.revision + 1;
    return next;
}

} // namespace litgrid
