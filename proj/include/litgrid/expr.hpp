#pragma once

#include "litgrid/cell_addr.hpp"

#include <compare>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace litgrid {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Le, Gt, Ge };
enum class Fn { Sum, Average, Min, Max, Count, If, Abs, Round, And, Or, Not, Concat };

std::string_view op_symbol(BinOp op);
std::string_view fn_name(Fn fn);
std::optional<Fn> fn_from_name(std::string_view name); // case-insensitive

/// True for functions that accept ranges and whole-grid names as arguments.
bool is_aggregate(Fn fn);

struct NumberLit {
    double value = 0; // finite, non-negative
};
struct TextLit {
    std::string value;
};
struct BoolLit {
    bool value = false;
};
/// `grid` is empty for a bare address, resolved against the cell's own grid.
struct CellRef {
    std::optional<std::string> grid;
    CellAddr addr;
};
struct RangeRef {
    std::optional<std::string> grid;
    CellAddr from; // from.column <= to.column, from.row <= to.row
    CellAddr to;
};
struct NameRef {
    std::string name;
};
struct Unary {
    ExprPtr arg; // negation is the only unary operator
};
struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Call {
    Fn fn;
    std::vector<ExprPtr> args;
};

struct Expr {
    std::variant<NumberLit, TextLit, BoolLit, CellRef, RangeRef, NameRef, Unary, Binary, Call> node;
};

bool operator==(const Expr& a, const Expr& b);

ExprPtr make_number(double v);
ExprPtr make_text(std::string v);
ExprPtr make_bool(bool v);
ExprPtr make_cell(std::optional<std::string> grid, CellAddr addr);
ExprPtr make_range(std::optional<std::string> grid, CellAddr a, CellAddr b); // normalizes corners
ExprPtr make_name(std::string name);
ExprPtr make_neg(ExprPtr arg);
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(Fn fn, std::vector<ExprPtr> args);

/// Parses a formula expression (no leading '='). `grid_ctx` names the grid a
/// cell formula lives in; without it, a bare cell address is an error.
/// Throws PositionedError with code ParseError, UnknownFunction or UnknownRef.
ExprPtr parse_expr(std::string_view text, const std::optional<std::string>& grid_ctx = std::nullopt);

/// Canonical text: single spaces around binary operators, minimal
/// parentheses, uppercase function names and columns.
std::string format_expr(const Expr& e);

/// Parses and reformats; returns nullopt when the text does not parse.
std::optional<std::string> canonical_expr_text(std::string_view text,
                                               const std::optional<std::string>& grid_ctx = std::nullopt);

struct Ref {
    enum class Kind { Cell, Range, Name };
    Kind kind = Kind::Name;
    std::string target; // grid for Cell/Range, chunk id for Name
    CellAddr from;
    CellAddr to;

    static Ref cell(std::string grid, CellAddr addr) { return {Kind::Cell, std::move(grid), addr, addr}; }
    static Ref range(std::string grid, CellAddr from, CellAddr to) { return {Kind::Range, std::move(grid), from, to}; }
    static Ref name(std::string id) { return {Kind::Name, std::move(id), {}, {}}; }

    auto operator<=>(const Ref&) const = default;
};

std::string to_string(const Ref& ref);

/// Every cell, range and name referenced by `e`, with bare cells resolved to
/// `grid_ctx`. Ranges are not expanded. Throws Error(UnresolvedContext) when
/// a bare cell appears and no context is given.
std::set<Ref> refs_of(const Expr& e, const std::optional<std::string>& grid_ctx);

} // namespace litgrid
