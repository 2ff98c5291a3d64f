#pragma once

#include "litgrid/cell_addr.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace litgrid {

struct Empty {
    bool operator==(const Empty&) const = default;
};

struct FormulaCell {
    std::string expr_text; // without the leading '='
    bool operator==(const FormulaCell&) const = default;
};

using ParsedCell = std::variant<Empty, double, std::string, bool, FormulaCell>;

/// A grid cell as typed by the user. `parsed` is always derived from `raw`.
struct CellContent {
    std::string raw;
    ParsedCell parsed;

    static CellContent from_raw(std::string raw);

    bool is_formula() const { return std::holds_alternative<FormulaCell>(parsed); }
    bool operator==(const CellContent& other) const { return raw == other.raw; }
};

/// Strict decimal literal: optional sign, digits with optional fraction, optional exponent.
std::optional<double> parse_number_literal(std::string_view text);

struct Heading {
    int level = 1;
    std::string title;
    bool operator==(const Heading&) const = default;
};

struct Narrative {
    std::string body;
    bool is_stub = false;
    bool operator==(const Narrative&) const = default;
};

struct Grid {
    std::map<CellAddr, CellContent> cells; // empty cells are never stored
    int n_rows = 0;
    int n_cols = 0;
    bool operator==(const Grid&) const = default;

    const CellContent* cell(CellAddr addr) const;
    bool in_bounds(CellAddr addr) const {
        return addr.row >= 1 && addr.column >= 1 && addr.row <= n_rows && addr.column <= n_cols;
    }
};

struct Formula {
    std::string expr_text;
    std::optional<std::string> desc;
    bool operator==(const Formula&) const = default;
};

struct Assertion {
    std::string expr_text;
    std::string msg;
    bool operator==(const Assertion&) const = default;
};

struct Asset {
    std::string src;
    std::string caption;
    bool operator==(const Asset&) const = default;
};

struct ThemeDef {
    std::vector<std::string> member_ids;
    bool operator==(const ThemeDef&) const = default;
};

enum class ChunkKind { Heading, Narrative, Grid, Formula, Assertion, Asset, ThemeDef };

/// Keyword used for a kind in files, JSON and auto-assigned ids.
std::string_view kind_name(ChunkKind kind);
std::optional<ChunkKind> kind_from_name(std::string_view name);

using ChunkBody = std::variant<Heading, Narrative, Grid, Formula, Assertion, Asset, ThemeDef>;

/// A first-class unit of a document. For grids, formulas and themes the id
/// is also the name used to reference the chunk.
struct Chunk {
    std::string id;
    ChunkBody body;

    ChunkKind kind() const { return static_cast<ChunkKind>(body.index()); }
    template <class T> const T* as() const { return std::get_if<T>(&body); }
    template <class T> T* as() { return std::get_if<T>(&body); }

    bool is_stub() const {
        auto* n = as<Narrative>();
        return n && n->is_stub;
    }
    bool is_documenting_narrative() const {
        auto* n = as<Narrative>();
        return n && !n->is_stub;
    }

    bool operator==(const Chunk&) const = default;
};

struct Document {
    std::map<std::string, std::string> meta;
    std::vector<Chunk> chunks;
    std::int64_t revision = 1;

    const Chunk* find(std::string_view id) const;
    std::optional<std::size_t> index_of(std::string_view id) const;
    std::string title() const;

    /// Equality of meta and chunks, ignoring the revision counter.
    bool same_content(const Document& other) const {
        return meta == other.meta && chunks == other.chunks;
    }
    bool operator==(const Document&) const = default;
};

enum class DiagKind {
    ParseError,
    UnknownRef,
    CycleError,
    TypeError,
    AssertionFailure,
    DuplicateId,
    BadTheme,
    StubSuggestion,
    InvalidId,
};

enum class Severity { Error, Warning, Info };

std::string_view to_string(DiagKind kind);
std::string_view to_string(Severity severity);

struct Diagnostic {
    DiagKind kind = DiagKind::ParseError;
    Severity severity = Severity::Error;
    std::string chunk;
    std::optional<CellAddr> cell;
    std::optional<int> line;
    std::string message;
    std::vector<std::string> cycle_path;

    bool operator==(const Diagnostic&) const = default;
};

/// "chunk[!CELL][:line]: severity: Kind: message"
std::string format_diagnostic(const Diagnostic& d);

std::size_t count_severity(std::span<const Diagnostic> diags, Severity severity);

namespace edit {

struct SetCell {
    std::string grid;
    CellAddr addr;
    std::string raw;
    bool operator==(const SetCell&) const = default;
};

struct SetChunk {
    std::string id;
    ChunkBody body;
    bool operator==(const SetChunk&) const = default;
};

struct InsertChunk {
    std::size_t index = 0;
    Chunk chunk;
    bool operator==(const InsertChunk&) const = default;
};

struct DeleteChunk {
    std::string id;
    bool operator==(const DeleteChunk&) const = default;
};

struct MoveChunk {
    std::string id;
    std::size_t index = 0;
    bool operator==(const MoveChunk&) const = default;
};

struct SetTheme {
    std::string name;
    std::vector<std::string> member_ids;
    bool operator==(const SetTheme&) const = default;
};

} // namespace edit

using Edit = std::variant<edit::SetCell, edit::SetChunk, edit::InsertChunk, edit::DeleteChunk,
                          edit::MoveChunk, edit::SetTheme>;

struct GridLimits {
    int max_rows = 10000;
    int max_cols = 256;
};

inline constexpr std::string_view kAllTheme = "all";

/// Structural checks only: duplicate or malformed ids, theme membership,
/// grid bounds, stub markers and expression syntax. Never evaluates.
std::vector<Diagnostic> validate_document(const Document& doc);

/// Chunk ids presented by `theme`. `all` is document order without theme
/// definitions; a named theme lists its members in its own order.
/// Throws Error(UnknownTheme).
std::vector<std::string> theme_view(const Document& doc, std::string_view theme);

/// Names of every theme that can be viewed, `all` first.
std::vector<std::string> theme_names(const Document& doc);

/// Returns a new document with the edit applied and revision + 1.
/// Throws Error(UnknownChunk | BadIndex | GridBoundsExceeded | IdCollision | InvalidId).
Document apply_edit(const Document& doc, const Edit& edit, const GridLimits& limits = {});

/// Applies every edit in order, all-or-nothing, bumping the revision once.
Document apply_edits(const Document& doc, std::span<const Edit> edits, const GridLimits& limits = {});

} // namespace litgrid
