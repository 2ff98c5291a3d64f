#pragma once

#include "litgrid/engine.hpp"
#include "litgrid/json_io.hpp"
#include "litgrid/model.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace litgrid {

struct TocEntry {
    std::string chunk_id;
    int level = 1;
    std::string title;
    std::vector<TocEntry> children;

    bool operator==(const TocEntry&) const = default;
};

/// Headings of the theme, nested by level. A jump (H1 then H3) nests the
/// deeper heading directly under the shallower one.
std::vector<TocEntry> toc(const Document& doc, std::string_view theme);

struct CrossRefs {
    std::map<std::string, std::vector<std::string>> referrers; // target -> referring chunks, document order
    std::set<std::string> unknown;                            // targets with no chunk
};

/// `[[id]]` and `{{id}}` in narratives plus every reference in expressions.
/// A grid's references to its own cells are not recorded.
CrossRefs cross_refs(const Document& doc);

using TermIndex = std::vector<std::pair<std::string, std::vector<std::string>>>;

/// `((term))` markers and formula/grid names, sorted case-insensitively.
TermIndex term_index(const Document& doc);

struct Run {
    enum class Kind { Text, Link, Splice, Error };
    Kind kind = Kind::Text;
    std::string text;   // display text; formatted value for splices
    std::string target; // chunk id for links, node key for splices and errors

    bool operator==(const Run&) const = default;
};

/// Splits narrative text into runs. Links and splices are unresolved.
std::vector<Run> parse_inline(std::string_view text);

struct TableCell {
    std::string display;
    std::string raw;
    std::string type; // n, s, b, e, empty
    bool formula = false;
};

struct Block {
    enum class Kind { Heading, Paragraph, Table, FormulaDisplay, AssertionBadge, Image, StubNotice };
    Kind kind = Kind::Paragraph;
    std::string chunk_id;
    int level = 0;           // heading
    std::string text;        // heading title, stub text, formula/assert expression
    std::vector<Run> runs;   // paragraph
    std::vector<std::vector<TableCell>> rows;
    std::string display;     // formula value, assertion value
    std::string value_type;
    bool pass = false;       // assertion
    std::string msg;         // assertion message
    std::string src;         // image
    std::string caption;
};

struct RenderTree {
    std::string title;
    std::string theme;
    std::vector<Block> blocks;
    std::vector<Diagnostic> diagnostics;
};

/// Throws Error(UnknownTheme).
RenderTree weave(const Document& doc, std::string_view theme, const EvalResult& r);

std::string_view block_kind_name(Block::Kind kind);

Json render_tree_to_json(const RenderTree& rt);
Json toc_to_json(const std::vector<TocEntry>& entries);
Json cross_refs_to_json(const CrossRefs& x);
Json term_index_to_json(const TermIndex& index);

/// Self-contained HTML page with navigation, chunk anchors, cross-references
/// and an index. Links to chunks outside the render tree are shown as text.
std::string render_html(const RenderTree& rt, const std::vector<TocEntry>& toc, const CrossRefs& xrefs,
                        const TermIndex& index);

} // namespace litgrid
