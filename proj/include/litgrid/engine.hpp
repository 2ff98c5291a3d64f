#pragma once

#include "litgrid/expr.hpp"
#include "litgrid/model.hpp"
#include "litgrid/value.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace litgrid {

/// `grid!ADDR` for cells, the chunk id for formula chunks and assertions.
using NodeKey = std::string;

NodeKey cell_key(std::string_view grid, CellAddr addr);

/// Dependency graph over computable nodes. An edge `a -> b` means `a` reads `b`.
struct RefGraph {
    std::set<NodeKey> nodes;        // computable nodes, literal cells read by them, placeholders
    std::set<NodeKey> computable;   // formula cells, formula chunks, assertions
    std::set<NodeKey> placeholders; // unresolved names, valued Error(NAME)
    std::map<NodeKey, std::set<NodeKey>> edges;
    std::vector<Diagnostic> diagnostics;

    bool has_edge(const NodeKey& from, const NodeKey& to) const;
};

struct TopoResult {
    std::vector<NodeKey> order;
    std::vector<std::vector<NodeKey>> cycles; // each closed: first == last
};

struct EvalResult {
    std::map<NodeKey, Value> values;
    std::vector<Diagnostic> diagnostics;
    std::vector<NodeKey> order;

    const Value* find(const NodeKey& key) const {
        auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
};

/// Lookup interface used while evaluating a single expression.
class EvalEnv {
public:
    virtual ~EvalEnv() = default;

    /// Value of a cell; Error(REF) for unknown grids or out-of-bounds cells.
    virtual Value cell(const std::string& grid, CellAddr addr) const = 0;

    /// Bottom-right corner of a grid, {0,0} for an empty grid, nullopt when
    /// `name` is not a grid.
    virtual std::optional<CellAddr> grid_extent(const std::string& name) const = 0;

    /// Value of a formula chunk or assertion; Error(NAME) when unknown.
    virtual Value name(const std::string& name) const = 0;
};

RefGraph build_graph(const Document& doc);

/// Layered Kahn ordering: each round emits every ready node in ascending key
/// order. Nodes on cycles are left out and reported as closed paths.
TopoResult topo_order(const RefGraph& graph);

Value eval_expr(const Expr& e, const std::optional<std::string>& grid_ctx, const EvalEnv& env);

EvalResult evaluate(const Document& doc);

std::vector<Diagnostic> check_assertions(const Document& doc, const EvalResult& result);

/// evaluate() with check_assertions() diagnostics appended.
EvalResult evaluate_checked(const Document& doc);

} // namespace litgrid
