#include "litgrid/engine.hpp"
#include "litgrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace litgrid {

NodeKey cell_key(std::string_view grid, CellAddr addr) {
    return std::string(grid) + "!" + to_string(addr);
}

bool RefGraph::has_edge(const NodeKey& from, const NodeKey& to) const {
    auto it = edges.find(from);
    return it != edges.end() && it->second.count(to) > 0;
}

// ---------------------------------------------------------------------------
// Expression semantics

namespace {

Value number_result(double v) {
    if (!std::isfinite(v))
        return error_value(ErrorKind::Value);
    return v;
}

// Empty -> 0, Boolean -> 1/0, Text -> VALUE.
std::optional<double> to_number(const Value& v) {
    if (auto* d = std::get_if<double>(&v))
        return *d;
    if (std::holds_alternative<Empty>(v))
        return 0.0;
    if (auto* b = std::get_if<bool>(&v))
        return *b ? 1.0 : 0.0;
    return std::nullopt;
}

std::string to_text(const Value& v) { return format_value(v); }

// Condition truth: Boolean, non-zero Number, Empty is false, Text is VALUE.
std::optional<bool> to_truth(const Value& v) {
    if (auto* b = std::get_if<bool>(&v))
        return *b;
    if (auto* d = std::get_if<double>(&v))
        return *d != 0;
    if (std::holds_alternative<Empty>(v))
        return false;
    return std::nullopt;
}

Value compare(BinOp op, const Value& a, const Value& b) {
    Value x = a, y = b;
    bool xe = std::holds_alternative<Empty>(x), ye = std::holds_alternative<Empty>(y);
    if (xe && !ye) {
        if (std::holds_alternative<double>(y)) x = 0.0;
        else if (std::holds_alternative<std::string>(y)) x = std::string();
        else x = false;
    } else if (ye && !xe) {
        if (std::holds_alternative<double>(x)) y = 0.0;
        else if (std::holds_alternative<std::string>(x)) y = std::string();
        else y = false;
    }
    int c = 0;
    if (xe && ye) {
        c = 0;
    } else if (x.index() != y.index()) {
        return error_value(ErrorKind::Value);
    } else if (auto* dx = std::get_if<double>(&x)) {
        double dy = std::get<double>(y);
        c = *dx < dy ? -1 : (*dx > dy ? 1 : 0);
    } else if (auto* sx = std::get_if<std::string>(&x)) {
        int r = sx->compare(std::get<std::string>(y));
        c = r < 0 ? -1 : (r > 0 ? 1 : 0);
    } else {
        bool bx = std::get<bool>(x), by = std::get<bool>(y);
        c = static_cast<int>(bx) - static_cast<int>(by);
    }
    switch (op) {
    case BinOp::Eq: return c == 0;
    case BinOp::Ne: return c != 0;
    case BinOp::Lt: return c < 0;
    case BinOp::Le: return c <= 0;
    case BinOp::Gt: return c > 0;
    default: return c >= 0;
    }
}

double round_half_away(double x, double digits) {
    double d = std::trunc(digits);
    d = std::clamp(d, -15.0, 15.0);
    if (d >= 0) {
        double m = std::pow(10.0, d);
        double scaled = x * m;
        if (!std::isfinite(scaled))
            return x;
        return std::round(scaled) / m;
    }
    double m = std::pow(10.0, -d);
    return std::round(x / m) * m;
}

class Evaluator {
public:
    Evaluator(const std::optional<std::string>& ctx, const EvalEnv& env) : ctx_(ctx), env_(env) {}

    Value scalar(const Expr& e) const {
        return std::visit([&](const auto& n) { return scalar_node(n); }, e.node);
    }

private:
    Value scalar_node(const NumberLit& n) const { return n.value; }
    Value scalar_node(const TextLit& n) const { return n.value; }
    Value scalar_node(const BoolLit& n) const { return n.value; }

    Value scalar_node(const CellRef& n) const {
        auto grid = n.grid ? n.grid : ctx_;
        if (!grid)
            return error_value(ErrorKind::Ref);
        return env_.cell(*grid, n.addr);
    }

    Value scalar_node(const RangeRef&) const { return error_value(ErrorKind::Value); }

    Value scalar_node(const NameRef& n) const {
        if (env_.grid_extent(n.name))
            return error_value(ErrorKind::Value);
        return env_.name(n.name);
    }

    Value scalar_node(const Unary& n) const {
        Value v = scalar(*n.arg);
        if (is_error(v))
            return v;
        auto x = to_number(v);
        if (!x)
            return error_value(ErrorKind::Value);
        return number_result(-*x);
    }

    Value scalar_node(const Binary& n) const {
        Value a = scalar(*n.lhs);
        Value b = scalar(*n.rhs);
        if (is_error(a))
            return a;
        if (is_error(b))
            return b;
        switch (n.op) {
        case BinOp::Concat:
            return to_text(a) + to_text(b);
        case BinOp::Eq: case BinOp::Ne: case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
            return compare(n.op, a, b);
        default:
            break;
        }
        auto x = to_number(a);
        auto y = to_number(b);
        if (!x || !y)
            return error_value(ErrorKind::Value);
        switch (n.op) {
        case BinOp::Add: return number_result(*x + *y);
        case BinOp::Sub: return number_result(*x - *y);
        case BinOp::Mul: return number_result(*x * *y);
        case BinOp::Div:
            if (*y == 0)
                return error_value(ErrorKind::Div0);
            return number_result(*x / *y);
        case BinOp::Pow:
            if (*x == 0 && *y < 0)
                return error_value(ErrorKind::Div0);
            return number_result(std::pow(*x, *y));
        default:
            return error_value(ErrorKind::Value);
        }
    }

    // Aggregate arguments: ranges and whole-grid names expand row-major.
    void expand_range(const std::string& grid, CellAddr from, CellAddr to, std::vector<Value>& out) const {
        auto extent = env_.grid_extent(grid);
        if (!extent) {
            out.push_back(error_value(ErrorKind::Ref));
            return;
        }
        int last_row = std::min(to.row, extent->row);
        int last_col = std::min(to.column, extent->column);
        for (int r = from.row; r <= last_row; ++r)
            for (int c = from.column; c <= last_col; ++c)
                out.push_back(env_.cell(grid, CellAddr{c, r}));
    }

    std::vector<Value> collect(const std::vector<ExprPtr>& args) const {
        std::vector<Value> items;
        for (const auto& arg : args) {
            if (auto* r = std::get_if<RangeRef>(&arg->node)) {
                auto grid = r->grid ? r->grid : ctx_;
                if (!grid)
                    items.push_back(error_value(ErrorKind::Ref));
                else
                    expand_range(*grid, r->from, r->to, items);
            } else if (auto* nm = std::get_if<NameRef>(&arg->node); nm && env_.grid_extent(nm->name)) {
                expand_range(nm->name, CellAddr{1, 1}, *env_.grid_extent(nm->name), items);
            } else {
                items.push_back(scalar(*arg));
            }
        }
        return items;
    }

    Value scalar_node(const Call& n) const {
        switch (n.fn) {
        case Fn::If: {
            Value cond = scalar(*n.args[0]);
            if (is_error(cond))
                return cond;
            auto t = to_truth(cond);
            if (!t)
                return error_value(ErrorKind::Value);
            if (*t)
                return scalar(*n.args[1]);
            return n.args.size() > 2 ? scalar(*n.args[2]) : Value(false);
        }
        case Fn::Not: {
            Value v = scalar(*n.args[0]);
            if (is_error(v))
                return v;
            auto t = to_truth(v);
            if (!t)
                return error_value(ErrorKind::Value);
            return !*t;
        }
        case Fn::Abs: {
            Value v = scalar(*n.args[0]);
            if (is_error(v))
                return v;
            auto x = to_number(v);
            if (!x)
                return error_value(ErrorKind::Value);
            return std::fabs(*x);
        }
        case Fn::Round: {
            Value v = scalar(*n.args[0]);
            Value d = n.args.size() > 1 ? scalar(*n.args[1]) : Value(0.0);
            if (is_error(v))
                return v;
            if (is_error(d))
                return d;
            auto x = to_number(v);
            auto digits = to_number(d);
            if (!x || !digits)
                return error_value(ErrorKind::Value);
            return number_result(round_half_away(*x, *digits));
        }
        default:
            break;
        }

        std::vector<Value> items = collect(n.args);
        for (const auto& v : items)
            if (is_error(v))
                return v;

        if (n.fn == Fn::Concat) {
            std::string out;
            for (const auto& v : items)
                out += to_text(v);
            return out;
        }
        if (n.fn == Fn::And || n.fn == Fn::Or) {
            bool any = false;
            bool acc = n.fn == Fn::And;
            for (const auto& v : items) {
                std::optional<bool> t;
                if (auto* b = std::get_if<bool>(&v))
                    t = *b;
                else if (auto* d = std::get_if<double>(&v))
                    t = *d != 0;
                if (!t)
                    continue;
                any = true;
                acc = n.fn == Fn::And ? (acc && *t) : (acc || *t);
            }
            if (!any)
                return error_value(ErrorKind::Value);
            return acc;
        }

        double sum = 0;
        std::size_t count = 0;
        std::optional<double> lo, hi;
        for (const auto& v : items) {
            auto* d = std::get_if<double>(&v);
            if (!d)
                continue;
            sum += *d;
            ++count;
            lo = lo ? std::min(*lo, *d) : *d;
            hi = hi ? std::max(*hi, *d) : *d;
        }
        switch (n.fn) {
        case Fn::Sum: return number_result(sum);
        case Fn::Count: return static_cast<double>(count);
        case Fn::Average:
            if (count == 0)
                return error_value(ErrorKind::Div0);
            return number_result(sum / static_cast<double>(count));
        case Fn::Min: return lo ? *lo : 0.0;
        case Fn::Max: return hi ? *hi : 0.0;
        default: return error_value(ErrorKind::Value);
        }
    }

    const std::optional<std::string>& ctx_;
    const EvalEnv& env_;
};

} // namespace

Value eval_expr(const Expr& e, const std::optional<std::string>& grid_ctx, const EvalEnv& env) {
    return Evaluator(grid_ctx, env).scalar(e);
}

// ---------------------------------------------------------------------------
// Graph construction

namespace {

struct Computable {
    std::string chunk;
    std::optional<CellAddr> cell;
    std::optional<std::string> ctx;
    ExprPtr expr; // null when the text failed to parse
};

struct Compiled {
    RefGraph graph;
    std::map<NodeKey, Computable> computables;
    std::map<NodeKey, Value> literals;
};

Diagnostic diag(DiagKind kind, Severity sev, const Computable& c, std::string msg) {
    Diagnostic d;
    d.kind = kind;
    d.severity = sev;
    d.chunk = c.chunk;
    d.cell = c.cell;
    d.message = std::move(msg);
    return d;
}

Compiled compile(const Document& doc) {
    Compiled out;
    std::map<std::string, const Chunk*> by_id;
    for (const auto& c : doc.chunks)
        by_id.emplace(c.id, &c);

    std::map<NodeKey, std::string> texts;
    for (const auto& c : doc.chunks) {
        if (auto* g = c.as<Grid>()) {
            for (const auto& [addr, cell] : g->cells) {
                NodeKey key = cell_key(c.id, addr);
                if (auto* f = std::get_if<FormulaCell>(&cell.parsed)) {
                    out.computables[key] = Computable{c.id, addr, c.id, nullptr};
                    texts[key] = f->expr_text;
                } else {
                    out.literals[key] = literal_value(cell.parsed);
                }
            }
        } else if (auto* f = c.as<Formula>()) {
            out.computables[c.id] = Computable{c.id, std::nullopt, std::nullopt, nullptr};
            texts[c.id] = f->expr_text;
        } else if (auto* a = c.as<Assertion>()) {
            out.computables[c.id] = Computable{c.id, std::nullopt, std::nullopt, nullptr};
            texts[c.id] = a->expr_text;
        }
    }

    auto grid_of = [&](const std::string& name) -> const Grid* {
        auto it = by_id.find(name);
        return it == by_id.end() ? nullptr : it->second->as<Grid>();
    };
    auto add_cell_edge = [&](const NodeKey& from, const std::string& grid, const Grid& g, CellAddr addr) {
        if (g.cell(addr)) {
            NodeKey to = cell_key(grid, addr);
            out.graph.nodes.insert(to);
            out.graph.edges[from].insert(to);
        }
    };

    RefGraph& graph = out.graph;
    for (auto& [key, comp] : out.computables) {
        graph.nodes.insert(key);
        graph.computable.insert(key);
        try {
            comp.expr = parse_expr(texts[key], comp.ctx);
        } catch (const Error& e) {
            DiagKind kind = e.code() == ErrorCode::UnknownRef ? DiagKind::UnknownRef : DiagKind::ParseError;
            graph.diagnostics.push_back(diag(kind, Severity::Error, comp, e.what()));
            continue;
        }
        for (const auto& ref : refs_of(*comp.expr, comp.ctx)) {
            switch (ref.kind) {
            case Ref::Kind::Cell: {
                const Grid* g = grid_of(ref.target);
                if (!g) {
                    graph.diagnostics.push_back(diag(DiagKind::UnknownRef, Severity::Error, comp,
                                                     "unknown grid '" + ref.target + "'"));
                } else if (!g->in_bounds(ref.from)) {
                    graph.diagnostics.push_back(diag(DiagKind::UnknownRef, Severity::Error, comp,
                                                     "cell " + to_string(ref) + " is outside the grid"));
                } else {
                    add_cell_edge(key, ref.target, *g, ref.from);
                }
                break;
            }
            case Ref::Kind::Range: {
                const Grid* g = grid_of(ref.target);
                if (!g) {
                    graph.diagnostics.push_back(diag(DiagKind::UnknownRef, Severity::Error, comp,
                                                     "unknown grid '" + ref.target + "'"));
                    break;
                }
                for (const auto& [addr, cell] : g->cells)
                    if (addr.row >= ref.from.row && addr.row <= ref.to.row && addr.column >= ref.from.column &&
                        addr.column <= ref.to.column && g->in_bounds(addr))
                        add_cell_edge(key, ref.target, *g, addr);
                break;
            }
            case Ref::Kind::Name: {
                auto it = by_id.find(ref.target);
                if (it == by_id.end()) {
                    graph.diagnostics.push_back(diag(DiagKind::UnknownRef, Severity::Error, comp,
                                                     "unknown name '" + ref.target + "'"));
                    graph.placeholders.insert(ref.target);
                    graph.nodes.insert(ref.target);
                    graph.edges[key].insert(ref.target);
                } else if (auto* g = it->second->as<Grid>()) {
                    for (const auto& [addr, cell] : g->cells)
                        if (g->in_bounds(addr))
                            add_cell_edge(key, ref.target, *g, addr);
                } else if (it->second->kind() == ChunkKind::Formula ||
                           it->second->kind() == ChunkKind::Assertion) {
                    graph.nodes.insert(ref.target);
                    graph.edges[key].insert(ref.target);
                } else {
                    graph.diagnostics.push_back(diag(DiagKind::UnknownRef, Severity::Error, comp,
                                                     "'" + ref.target + "' does not name a computable chunk"));
                }
                break;
            }
            }
        }
    }
    return out;
}

} // namespace

RefGraph build_graph(const Document& doc) { return compile(doc).graph; }

// ---------------------------------------------------------------------------
// Ordering

namespace {

using Adjacency = std::map<NodeKey, std::vector<NodeKey>>;

// Iterative Tarjan; returns strongly connected components.
std::vector<std::vector<NodeKey>> strongly_connected(const std::set<NodeKey>& nodes, const Adjacency& adj) {
    std::map<NodeKey, int> index, low;
    std::set<NodeKey> on_stack;
    std::vector<NodeKey> stack;
    std::vector<std::vector<NodeKey>> comps;
    int counter = 0;
    static const std::vector<NodeKey> kNone;

    for (const auto& root : nodes) {
        if (index.count(root))
            continue;
        std::vector<std::pair<NodeKey, std::size_t>> work{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack.insert(root);
        while (!work.empty()) {
            auto& [node, next] = work.back();
            auto it = adj.find(node);
            const auto& succ = it == adj.end() ? kNone : it->second;
            if (next < succ.size()) {
                const NodeKey& w = succ[next++];
                if (!index.count(w)) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack.insert(w);
                    work.emplace_back(w, 0);
                } else if (on_stack.count(w)) {
                    low[node] = std::min(low[node], index[w]);
                }
                continue;
            }
            NodeKey done = node;
            work.pop_back();
            if (!work.empty())
                low[work.back().first] = std::min(low[work.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<NodeKey> comp;
                while (true) {
                    NodeKey w = stack.back();
                    stack.pop_back();
                    on_stack.erase(w);
                    comp.push_back(w);
                    if (w == done)
                        break;
                }
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    return comps;
}

// A closed path from the smallest member back to itself, exploring successors
// in ascending order and staying inside the component.
std::vector<NodeKey> cycle_path(const std::vector<NodeKey>& comp, const Adjacency& adj) {
    const NodeKey& start = comp.front();
    std::set<NodeKey> members(comp.begin(), comp.end());
    std::set<NodeKey> visited{start};
    std::vector<std::pair<NodeKey, std::size_t>> work{{start, 0}};
    static const std::vector<NodeKey> kNone;
    while (!work.empty()) {
        auto& [node, next] = work.back();
        auto it = adj.find(node);
        const auto& succ = it == adj.end() ? kNone : it->second;
        if (next >= succ.size()) {
            work.pop_back();
            continue;
        }
        const NodeKey& w = succ[next++];
        if (w == start) {
            std::vector<NodeKey> path;
            for (const auto& [n, _] : work)
                path.push_back(n);
            path.push_back(start);
            return path;
        }
        if (members.count(w) && visited.insert(w).second)
            work.emplace_back(w, 0);
    }
    return {start, start};
}

} // namespace

TopoResult topo_order(const RefGraph& graph) {
    Adjacency adj;
    for (const auto& [from, tos] : graph.edges)
        for (const auto& to : tos)
            if (graph.nodes.count(from) && graph.nodes.count(to))
                adj[from].push_back(to); // std::set iteration keeps these sorted

    TopoResult result;
    std::set<NodeKey> on_cycle;
    for (const auto& comp : strongly_connected(graph.nodes, adj)) {
        bool cyclic = comp.size() > 1 || graph.has_edge(comp.front(), comp.front());
        if (!cyclic)
            continue;
        on_cycle.insert(comp.begin(), comp.end());
        result.cycles.push_back(cycle_path(comp, adj));
    }
    std::sort(result.cycles.begin(), result.cycles.end());

    std::map<NodeKey, std::size_t> pending;
    std::map<NodeKey, std::vector<NodeKey>> dependents;
    for (const auto& n : graph.nodes) {
        if (on_cycle.count(n))
            continue;
        pending[n] = 0;
    }
    for (const auto& [from, tos] : adj) {
        if (on_cycle.count(from))
            continue;
        for (const auto& to : tos) {
            if (on_cycle.count(to))
                continue;
            ++pending[from];
            dependents[to].push_back(from);
        }
    }

    std::vector<NodeKey> ready;
    for (const auto& [n, count] : pending)
        if (count == 0)
            ready.push_back(n);
    while (!ready.empty()) {
        std::sort(ready.begin(), ready.end());
        std::vector<NodeKey> next;
        for (const auto& n : ready) {
            result.order.push_back(n);
            for (const auto& d : dependents[n])
                if (--pending[d] == 0)
                    next.push_back(d);
        }
        ready = std::move(next);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class DocEnv : public EvalEnv {
public:
    DocEnv(const Document& doc, const std::map<NodeKey, Value>& values) : values_(values) {
        for (const auto& c : doc.chunks) {
            if (auto* g = c.as<Grid>())
                grids_.emplace(c.id, g);
            else if (c.kind() == ChunkKind::Formula || c.kind() == ChunkKind::Assertion)
                computable_names_.insert(c.id);
            else
                other_names_.insert(c.id);
        }
    }

    Value cell(const std::string& grid, CellAddr addr) const override {
        auto it = grids_.find(grid);
        if (it == grids_.end() || !it->second->in_bounds(addr))
            return error_value(ErrorKind::Ref);
        auto v = values_.find(cell_key(grid, addr));
        if (v == values_.end())
            return Empty{};
        return v->second;
    }

    std::optional<CellAddr> grid_extent(const std::string& name) const override {
        auto it = grids_.find(name);
        if (it == grids_.end())
            return std::nullopt;
        return CellAddr{it->second->n_cols, it->second->n_rows};
    }

    Value name(const std::string& name) const override {
        if (computable_names_.count(name)) {
            auto v = values_.find(name);
            return v == values_.end() ? error_value(ErrorKind::Name) : v->second;
        }
        if (other_names_.count(name))
            return error_value(ErrorKind::Ref);
        return error_value(ErrorKind::Name);
    }

private:
    const std::map<NodeKey, Value>& values_;
    std::map<std::string, const Grid*> grids_;
    std::set<std::string> computable_names_;
    std::set<std::string> other_names_;
};

} // namespace

EvalResult evaluate(const Document& doc) {
    Compiled compiled = compile(doc);
    TopoResult topo = topo_order(compiled.graph);

    EvalResult result;
    result.values = compiled.literals;
    result.diagnostics = compiled.graph.diagnostics;
    result.order = topo.order;

    for (const auto& path : topo.cycles) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            result.values[path[i]] = error_value(ErrorKind::Cycle);
        Diagnostic d;
        d.kind = DiagKind::CycleError;
        d.severity = Severity::Error;
        d.cycle_path = path;
        auto comp = compiled.computables.find(path.front());
        if (comp != compiled.computables.end()) {
            d.chunk = comp->second.chunk;
            d.cell = comp->second.cell;
        } else {
            d.chunk = path.front();
        }
        d.message = "circular reference through " + std::to_string(path.size() - 1) + " node(s)";
        result.diagnostics.push_back(std::move(d));
    }
    // Every member of a cyclic component, including ones off the reported path.
    std::set<NodeKey> ordered(topo.order.begin(), topo.order.end());
    for (const auto& key : compiled.graph.computable)
        if (!ordered.count(key))
            result.values[key] = error_value(ErrorKind::Cycle);

    DocEnv env(doc, result.values);
    for (const auto& key : topo.order) {
        auto it = compiled.computables.find(key);
        if (it == compiled.computables.end())
            continue;
        const Computable& comp = it->second;
        if (!comp.expr) {
            result.values[key] = error_value(ErrorKind::Parse);
            continue;
        }
        result.values[key] = eval_expr(*comp.expr, comp.ctx, env);
    }
    return result;
}

std::vector<Diagnostic> check_assertions(const Document& doc, const EvalResult& result) {
    std::vector<Diagnostic> out;
    for (const auto& c : doc.chunks) {
        auto* a = c.as<Assertion>();
        if (!a)
            continue;
        const Value* v = result.find(c.id);
        Diagnostic d;
        d.kind = DiagKind::AssertionFailure;
        d.severity = Severity::Error;
        d.chunk = c.id;
        if (v)
            if (auto* b = std::get_if<bool>(v)) {
                if (*b)
                    continue;
                d.message = a->msg.empty() ? "assertion failed: " + a->expr_text : a->msg;
                out.push_back(std::move(d));
                continue;
            }
        d.message = "assertion did not evaluate to a boolean";
        if (v && is_error(*v))
            d.message += " (got #" + std::string(to_string(std::get<ErrorValue>(*v).kind)) + ")";
        out.push_back(std::move(d));
    }
    return out;
}

EvalResult evaluate_checked(const Document& doc) {
    EvalResult r = evaluate(doc);
    auto extra = check_assertions(doc, r);
    r.diagnostics.insert(r.diagnostics.end(), extra.begin(), extra.end());
    return r;
}

} // namespace litgrid
