#include "gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

namespace lgtest {

using namespace litgrid;

namespace {

std::string node_key(const std::string& grid, CellAddr a) { return grid + "!" + to_string(a); }

int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }
template <class T> const T& choose(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(v.size()) - 1))];
}

std::string col_letters(int c) {
    std::string s;
    while (c > 0) {
        int m = (c - 1) % 26;
        s.insert(s.begin(), static_cast<char>('A' + m));
        c = (c - 1) / 26;
    }
    return s;
}

std::string addr_text(CellAddr a) { return col_letters(a.column) + std::to_string(a.row); }

std::string num_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

GPtr node(GExpr::K k) {
    auto e = std::make_shared<GExpr>();
    e->k = k;
    return e;
}

double random_number(std::mt19937_64& rng) {
    switch (pick(rng, 0, 3)) {
    case 0: return pick(rng, 0, 10);
    case 1: return pick(rng, 0, 400) / 4.0;
    case 2: return pick(rng, 1, 999) / 100.0;
    default: return pick(rng, 0, 1000000);
    }
}

} // namespace

std::string render(const GExpr& e) {
    switch (e.k) {
    case GExpr::K::Num: return num_text(e.num);
    case GExpr::K::Text: {
        std::string out = "\"";
        for (char c : e.text) {
            if (c == '"')
                out += '"';
            out += c;
        }
        return out + "\"";
    }
    case GExpr::K::Bool: return e.b ? "TRUE" : "FALSE";
    case GExpr::K::Cell: return (e.grid.empty() ? "" : e.grid + "!") + addr_text(e.from);
    case GExpr::K::Range:
        return (e.grid.empty() ? "" : e.grid + "!") + addr_text(e.from) + ":" + addr_text(e.to);
    case GExpr::K::Name: return e.text;
    case GExpr::K::Neg: return "(-" + render(*e.args[0]) + ")";
    case GExpr::K::Bin: return "(" + render(*e.args[0]) + " " + e.text + " " + render(*e.args[1]) + ")";
    case GExpr::K::Call: {
        std::string out = e.text + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i)
            out += (i ? ", " : "") + render(*e.args[i]);
        return out + ")";
    }
    }
    return "0";
}

// ---------------------------------------------------------------------------
// Computational documents

namespace {

struct GridPlan {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::map<CellAddr, int> formula_rank; // formula cells -> creation rank
};

class CompGen {
public:
    CompGen(std::mt19937_64& rng, const GenOptions& opt) : rng_(rng), opt_(opt) {}

    GenDoc run() {
        static const std::vector<std::string> grid_names = {"data", "rates", "items", "costs"};
        int n_grids = pick(rng_, 1, opt_.max_grids);
        int budget = opt_.max_cells;
        std::vector<std::string> names = grid_names;
        std::shuffle(names.begin(), names.end(), rng_);
        for (int i = 0; i < n_grids; ++i) {
            GridPlan g;
            g.name = names[static_cast<std::size_t>(i)];
            g.cols = pick(rng_, 1, 4);
            int max_rows = std::max(1, std::min(6, budget / g.cols / (n_grids - i)));
            g.rows = pick(rng_, 1, max_rows);
            budget -= g.rows * g.cols;
            grids_.push_back(g);
        }

        // Decide cell kinds; formula cells and chunks are ordered by rank.
        struct Slot {
            int grid = -1; // -1 for chunks
            CellAddr addr;
            std::string id;
            bool assertion = false;
        };
        std::vector<Slot> formula_slots;
        for (std::size_t gi = 0; gi < grids_.size(); ++gi) {
            Grid grid;
            grid.n_rows = grids_[gi].rows;
            grid.n_cols = grids_[gi].cols;
            for (int r = 1; r <= grid.n_rows; ++r) {
                for (int c = 1; c <= grid.n_cols; ++c) {
                    CellAddr a{c, r};
                    int roll = pick(rng_, 0, 9);
                    if (roll < 2)
                        continue; // empty
                    if (roll < 6) {
                        Value v;
                        std::string raw;
                        int kind = pick(rng_, 0, 9);
                        if (kind < 7) {
                            double x = random_number(rng_);
                            if (chance(rng_, 0.2))
                                x = -x;
                            v = x;
                            raw = format_number(x);
                        } else if (kind < 9) {
                            static const std::vector<std::string> words = {"apple", "pear", "x y", "Total", "b"};
                            raw = choose(rng_, words);
                            v = raw;
                        } else {
                            bool b = chance(rng_, 0.5);
                            v = b;
                            raw = b ? "TRUE" : "FALSE";
                        }
                        grid.cells[a] = CellContent::from_raw(raw);
                        out_.literals[node_key(grids_[gi].name, a)] = v;
                    } else {
                        formula_slots.push_back({static_cast<int>(gi), a, {}, false});
                    }
                }
            }
            grid_bodies_.push_back(std::move(grid));
        }
        int n_chunks = pick(rng_, 0, opt_.max_formula_chunks);
        for (int i = 1; i <= n_chunks; ++i)
            formula_slots.push_back({-1, {}, "n_" + std::to_string(i), false});
        int n_asserts = opt_.assertions ? pick(rng_, 0, 2) : 0;
        for (int i = 1; i <= n_asserts; ++i)
            formula_slots.push_back({-1, {}, "chk_" + std::to_string(i), true});
        std::shuffle(formula_slots.begin(), formula_slots.end(), rng_);

        // Ranks first, so range checks can see every formula cell.
        for (std::size_t i = 0; i < formula_slots.size(); ++i)
            if (formula_slots[i].grid >= 0)
                grids_[static_cast<std::size_t>(formula_slots[i].grid)].formula_rank[formula_slots[i].addr] =
                    static_cast<int>(i);

        std::vector<Chunk> computables;
        for (std::size_t i = 0; i < formula_slots.size(); ++i) {
            rank_ = static_cast<int>(i);
            const Slot& s = formula_slots[i];
            if (s.grid >= 0) {
                ctx_ = grids_[static_cast<std::size_t>(s.grid)].name;
                GPtr e = expr(pick(rng_, 0, opt_.max_depth));
                std::string key = node_key(ctx_, s.addr);
                grid_bodies_[static_cast<std::size_t>(s.grid)].cells[s.addr] = CellContent::from_raw("=" + render(*e));
                out_.formulas[key] = e;
                out_.grid_of_node[key] = ctx_;
                ready_cells_.insert(key);
            } else {
                ctx_.clear();
                GPtr e = expr(pick(rng_, 0, opt_.max_depth));
                out_.formulas[s.id] = e;
                if (s.assertion)
                    computables.push_back({s.id, Assertion{render(*e), "check " + s.id}});
                else
                    computables.push_back({s.id, Formula{render(*e), std::nullopt}});
                ready_names_.push_back(s.id);
            }
        }

        out_.doc.meta["title"] = "generated";
        std::vector<Chunk> chunks;
        for (std::size_t gi = 0; gi < grids_.size(); ++gi)
            chunks.push_back({grids_[gi].name, grid_bodies_[gi]});
        for (auto& c : computables)
            chunks.push_back(std::move(c));
        std::shuffle(chunks.begin(), chunks.end(), rng_);
        out_.doc.chunks = std::move(chunks);
        return std::move(out_);
    }

private:
    // A cell is readable when it is literal, empty, out of bounds, or a
    // formula cell created earlier.
    bool cell_ready(const GridPlan& g, CellAddr a) const {
        auto it = g.formula_rank.find(a);
        return it == g.formula_rank.end() || it->second < rank_;
    }

    bool range_ready(const GridPlan& g, CellAddr a, CellAddr b) const {
        for (int r = std::min(a.row, b.row); r <= std::max(a.row, b.row); ++r)
            for (int c = std::min(a.column, b.column); c <= std::max(a.column, b.column); ++c)
                if (!cell_ready(g, {c, r}))
                    return false;
        return true;
    }

    const GridPlan* grid_plan(const std::string& name) const {
        for (const auto& g : grids_)
            if (g.name == name)
                return &g;
        return nullptr;
    }

    CellAddr random_addr(const GridPlan& g) {
        // Mostly in bounds, occasionally one past the edge.
        return {pick(rng_, 1, g.cols + (chance(rng_, 0.1) ? 1 : 0)), pick(rng_, 1, g.rows + (chance(rng_, 0.1) ? 1 : 0))};
    }

    GPtr cell_ref() {
        for (int attempt = 0; attempt < 8; ++attempt) {
            const GridPlan& g = choose(rng_, grids_);
            CellAddr a = random_addr(g);
            if (!cell_ready(g, a))
                continue;
            auto e = node(GExpr::K::Cell);
            e->from = e->to = a;
            e->grid = (g.name == ctx_ && chance(rng_, 0.7)) ? "" : g.name;
            return e;
        }
        return number();
    }

    GPtr range_ref() {
        for (int attempt = 0; attempt < 8; ++attempt) {
            const GridPlan& g = choose(rng_, grids_);
            CellAddr a = random_addr(g), b = random_addr(g);
            if (!range_ready(g, a, b))
                continue;
            auto e = node(GExpr::K::Range);
            e->from = a;
            e->to = b;
            e->grid = (g.name == ctx_ && chance(rng_, 0.7)) ? "" : g.name;
            return e;
        }
        return nullptr;
    }

    GPtr grid_name() {
        const GridPlan& g = choose(rng_, grids_);
        if (!range_ready(g, {1, 1}, {g.cols, g.rows}))
            return nullptr;
        auto e = node(GExpr::K::Name);
        e->text = g.name;
        return e;
    }

    GPtr number() {
        auto e = node(GExpr::K::Num);
        e->num = random_number(rng_);
        return e;
    }

    GPtr leaf() {
        int roll = pick(rng_, 0, 99);
        if (roll < 30)
            return number();
        if (roll < 38) {
            static const std::vector<std::string> texts = {"a", "b", "", "x\"y", "Total", "10"};
            auto e = node(GExpr::K::Text);
            e->text = choose(rng_, texts);
            return e;
        }
        if (roll < 43) {
            auto e = node(GExpr::K::Bool);
            e->b = chance(rng_, 0.5);
            return e;
        }
        if (roll < 80)
            return cell_ref();
        if (roll < 97 && !ready_names_.empty()) {
            auto e = node(GExpr::K::Name);
            e->text = choose(rng_, ready_names_);
            return e;
        }
        if (roll < 98) {
            auto e = node(GExpr::K::Name);
            e->text = "nowhere";
            return e;
        }
        if (auto g = grid_name())
            return g; // scalar use of a grid name
        return number();
    }

    GPtr aggregate_arg(int depth) {
        int roll = pick(rng_, 0, 9);
        if (roll < 5)
            if (auto r = range_ref())
                return r;
        if (roll == 5)
            if (auto g = grid_name())
                return g;
        return expr(depth);
    }

    GPtr expr(int depth) {
        if (depth <= 0 || chance(rng_, 0.25))
            return leaf();
        int roll = pick(rng_, 0, 99);
        if (roll < 10) {
            auto e = node(GExpr::K::Neg);
            e->args.push_back(expr(depth - 1));
            return e;
        }
        if (roll < 60) {
            static const std::vector<std::string> ops = {"+", "-", "*", "/", "^", "&", "=", "<>", "<", "<=", ">", ">=",
                                                         "+", "-", "*", "+"};
            auto e = node(GExpr::K::Bin);
            e->text = choose(rng_, ops);
            e->args.push_back(expr(depth - 1));
            e->args.push_back(expr(depth - 1));
            return e;
        }
        static const std::vector<std::string> fns = {"SUM", "AVERAGE", "MIN", "MAX", "COUNT", "IF",
                                                     "ABS", "ROUND", "AND", "OR", "NOT", "CONCAT"};
        auto e = node(GExpr::K::Call);
        e->text = choose(rng_, fns);
        if (e->text == "IF") {
            int n = pick(rng_, 2, 3);
            for (int i = 0; i < n; ++i)
                e->args.push_back(expr(depth - 1));
        } else if (e->text == "ABS" || e->text == "NOT") {
            e->args.push_back(expr(depth - 1));
        } else if (e->text == "ROUND") {
            e->args.push_back(expr(depth - 1));
            if (chance(rng_, 0.7)) {
                auto d = node(GExpr::K::Num);
                d->num = pick(rng_, 0, 3);
                if (chance(rng_, 0.2)) {
                    auto neg = node(GExpr::K::Neg);
                    neg->args.push_back(d);
                    e->args.push_back(neg);
                } else {
                    e->args.push_back(d);
                }
            }
        } else {
            int n = pick(rng_, 1, 3);
            for (int i = 0; i < n; ++i)
                e->args.push_back(aggregate_arg(depth - 1));
        }
        return e;
    }

    std::mt19937_64& rng_;
    GenOptions opt_;
    GenDoc out_;
    std::vector<GridPlan> grids_;
    std::vector<Grid> grid_bodies_;
    std::set<std::string> ready_cells_;
    std::vector<std::string> ready_names_;
    std::string ctx_;
    int rank_ = 0;
};

} // namespace

GenDoc random_computational_doc(std::mt19937_64& rng, const GenOptions& opt) { return CompGen(rng, opt).run(); }

// ---------------------------------------------------------------------------
// Oracle. Semantics restated independently of the engine's code:
//   arithmetic coerces Empty->0 and Boolean->1/0, Text is #VALUE;
//   errors propagate left operand first; non-finite results are #VALUE;
//   x/0 and 0^negative are #DIV0; comparisons need matching types, with an
//   Empty side taking the other side's type; aggregates skip non-numbers.

namespace {

class Oracle {
public:
    explicit Oracle(const GenDoc& g) : g_(g) {
        for (const auto& c : g.doc.chunks)
            if (auto* grid = c.as<Grid>())
                grids_[c.id] = grid;
    }

    std::map<std::string, Value> all() {
        std::map<std::string, Value> out = g_.literals;
        for (const auto& [key, e] : g_.formulas)
            out[key] = node_value(key);
        return out;
    }

private:
    Value node_value(const std::string& key) {
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        if (active_.count(key))
            return ErrorValue{ErrorKind::Cycle};
        active_.insert(key);
        auto ctx_it = g_.grid_of_node.find(key);
        std::string ctx = ctx_it == g_.grid_of_node.end() ? "" : ctx_it->second;
        Value v = eval(*g_.formulas.at(key), ctx);
        active_.erase(key);
        memo_[key] = v;
        return v;
    }

    static bool err(const Value& v) { return std::holds_alternative<ErrorValue>(v); }
    static Value bad(ErrorKind k) { return ErrorValue{k}; }

    static std::optional<double> num(const Value& v) {
        if (std::holds_alternative<double>(v))
            return std::get<double>(v);
        if (std::holds_alternative<Empty>(v))
            return 0.0;
        if (std::holds_alternative<bool>(v))
            return std::get<bool>(v) ? 1.0 : 0.0;
        return std::nullopt;
    }

    static Value finite(double x) { return std::isfinite(x) ? Value(x) : bad(ErrorKind::Value); }

    Value cell(const std::string& grid, CellAddr a) {
        auto it = grids_.find(grid);
        if (it == grids_.end())
            return bad(ErrorKind::Ref);
        const Grid& gr = *it->second;
        if (a.row < 1 || a.column < 1 || a.row > gr.n_rows || a.column > gr.n_cols)
            return bad(ErrorKind::Ref);
        std::string key = grid + "!" + addr_text(a);
        if (g_.formulas.count(key))
            return node_value(key);
        if (auto lit = g_.literals.find(key); lit != g_.literals.end())
            return lit->second;
        return Empty{};
    }

    void expand(const std::string& grid, CellAddr a, CellAddr b, std::vector<Value>& out) {
        auto it = grids_.find(grid);
        if (it == grids_.end()) {
            out.push_back(bad(ErrorKind::Ref));
            return;
        }
        int r0 = std::min(a.row, b.row), r1 = std::max(a.row, b.row);
        int c0 = std::min(a.column, b.column), c1 = std::max(a.column, b.column);
        r1 = std::min(r1, it->second->n_rows);
        c1 = std::min(c1, it->second->n_cols);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                out.push_back(cell(grid, {c, r}));
    }

    static std::optional<bool> truth(const Value& v) {
        if (std::holds_alternative<bool>(v))
            return std::get<bool>(v);
        if (std::holds_alternative<double>(v))
            return std::get<double>(v) != 0.0;
        if (std::holds_alternative<Empty>(v))
            return false;
        return std::nullopt;
    }

    Value compare(const std::string& op, Value a, Value b) {
        bool ae = std::holds_alternative<Empty>(a), be = std::holds_alternative<Empty>(b);
        int c;
        if (ae && be) {
            c = 0;
        } else {
            auto zero_like = [](const Value& other) -> Value {
                if (std::holds_alternative<double>(other))
                    return 0.0;
                if (std::holds_alternative<std::string>(other))
                    return std::string();
                return false;
            };
            if (ae)
                a = zero_like(b);
            if (be)
                b = zero_like(a);
            if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
                double x = std::get<double>(a), y = std::get<double>(b);
                c = x < y ? -1 : x > y ? 1 : 0;
            } else if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
                const auto& x = std::get<std::string>(a);
                const auto& y = std::get<std::string>(b);
                c = x < y ? -1 : x > y ? 1 : 0;
            } else if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b)) {
                c = int(std::get<bool>(a)) - int(std::get<bool>(b));
            } else {
                return bad(ErrorKind::Value);
            }
        }
        if (op == "=") return c == 0;
        if (op == "<>") return c != 0;
        if (op == "<") return c < 0;
        if (op == "<=") return c <= 0;
        if (op == ">") return c > 0;
        return c >= 0;
    }

    Value eval(const GExpr& e, const std::string& ctx) {
        switch (e.k) {
        case GExpr::K::Num: return e.num;
        case GExpr::K::Text: return e.text;
        case GExpr::K::Bool: return e.b;
        case GExpr::K::Cell: return cell(e.grid.empty() ? ctx : e.grid, e.from);
        case GExpr::K::Range: return bad(ErrorKind::Value);
        case GExpr::K::Name:
            if (grids_.count(e.text))
                return bad(ErrorKind::Value);
            if (g_.formulas.count(e.text))
                return node_value(e.text);
            return bad(ErrorKind::Name);
        case GExpr::K::Neg: {
            Value v = eval(*e.args[0], ctx);
            if (err(v))
                return v;
            auto x = num(v);
            return x ? finite(-*x) : bad(ErrorKind::Value);
        }
        case GExpr::K::Bin: {
            Value a = eval(*e.args[0], ctx);
            Value b = eval(*e.args[1], ctx);
            if (err(a))
                return a;
            if (err(b))
                return b;
            const std::string& op = e.text;
            if (op == "&")
                return format_value(a) + format_value(b);
            if (op == "=" || op == "<>" || op == "<" || op == "<=" || op == ">" || op == ">=")
                return compare(op, a, b);
            auto x = num(a), y = num(b);
            if (!x || !y)
                return bad(ErrorKind::Value);
            if (op == "+") return finite(*x + *y);
            if (op == "-") return finite(*x - *y);
            if (op == "*") return finite(*x * *y);
            if (op == "/") return *y == 0 ? bad(ErrorKind::Div0) : finite(*x / *y);
            if (*x == 0 && *y < 0)
                return bad(ErrorKind::Div0);
            return finite(std::pow(*x, *y));
        }
        case GExpr::K::Call: return call(e, ctx);
        }
        return bad(ErrorKind::Value);
    }

    Value call(const GExpr& e, const std::string& ctx) {
        const std::string& f = e.text;
        if (f == "IF") {
            Value c = eval(*e.args[0], ctx);
            if (err(c))
                return c;
            auto t = truth(c);
            if (!t)
                return bad(ErrorKind::Value);
            if (*t)
                return eval(*e.args[1], ctx);
            if (e.args.size() == 3)
                return eval(*e.args[2], ctx);
            return false;
        }
        if (f == "NOT" || f == "ABS") {
            Value v = eval(*e.args[0], ctx);
            if (err(v))
                return v;
            if (f == "NOT") {
                auto t = truth(v);
                return t ? Value(!*t) : bad(ErrorKind::Value);
            }
            auto x = num(v);
            return x ? Value(std::fabs(*x)) : bad(ErrorKind::Value);
        }
        if (f == "ROUND") {
            Value v = eval(*e.args[0], ctx);
            Value d = e.args.size() > 1 ? eval(*e.args[1], ctx) : Value(0.0);
            if (err(v))
                return v;
            if (err(d))
                return d;
            auto x = num(v), dd = num(d);
            if (!x || !dd)
                return bad(ErrorKind::Value);
            double digits = std::clamp(std::trunc(*dd), -15.0, 15.0);
            double r;
            if (digits >= 0) {
                double scale = std::pow(10.0, digits);
                r = std::isfinite(*x * scale) ? std::round(*x * scale) / scale : *x;
            } else {
                double scale = std::pow(10.0, -digits);
                r = std::round(*x / scale) * scale;
            }
            return finite(r);
        }

        std::vector<Value> items;
        for (const auto& a : e.args) {
            if (a->k == GExpr::K::Range)
                expand(a->grid.empty() ? ctx : a->grid, a->from, a->to, items);
            else if (a->k == GExpr::K::Name && grids_.count(a->text))
                expand(a->text, {1, 1}, {grids_[a->text]->n_cols, grids_[a->text]->n_rows}, items);
            else
                items.push_back(eval(*a, ctx));
        }
        for (const auto& v : items)
            if (err(v))
                return v;
        if (f == "CONCAT") {
            std::string s;
            for (const auto& v : items)
                s += format_value(v);
            return s;
        }
        if (f == "AND" || f == "OR") {
            std::vector<bool> bools;
            for (const auto& v : items) {
                if (std::holds_alternative<bool>(v))
                    bools.push_back(std::get<bool>(v));
                else if (std::holds_alternative<double>(v))
                    bools.push_back(std::get<double>(v) != 0);
            }
            if (bools.empty())
                return bad(ErrorKind::Value);
            if (f == "AND")
                return std::all_of(bools.begin(), bools.end(), [](bool b) { return b; });
            return std::any_of(bools.begin(), bools.end(), [](bool b) { return b; });
        }
        std::vector<double> nums;
        for (const auto& v : items)
            if (std::holds_alternative<double>(v))
                nums.push_back(std::get<double>(v));
        double total = 0;
        for (double x : nums)
            total += x;
        if (f == "SUM")
            return finite(total);
        if (f == "COUNT")
            return static_cast<double>(nums.size());
        if (f == "AVERAGE")
            return nums.empty() ? bad(ErrorKind::Div0) : finite(total / static_cast<double>(nums.size()));
        if (nums.empty())
            return 0.0;
        if (f == "MIN")
            return *std::min_element(nums.begin(), nums.end());
        return *std::max_element(nums.begin(), nums.end());
    }

    const GenDoc& g_;
    std::map<std::string, const Grid*> grids_;
    std::map<std::string, Value> memo_;
    std::set<std::string> active_;
};

} // namespace

std::map<std::string, Value> oracle_values(const GenDoc& g) { return Oracle(g).all(); }

// ---------------------------------------------------------------------------
// Arbitrary documents for format round-trips

namespace {

std::string random_line(std::mt19937_64& rng) {
    static const std::vector<std::string> lines = {
        "Plain words about the model.",
        "# not a heading here",
        "#hashtag",
        "@meta: lookalike",
        "::: formula name=fake",
        ":::",
        "\\# already escaped",
        "\\\\@ two backslashes",
        "See [[total]] and {{total}} for ((net value)).",
        "  indented line",
        "tab\tseparated",
        "unicode caf\xc3\xa9 \xe2\x88\x91",
        "quotes \"inside\" and back\\slash",
        "#### four",
        "trailing space ",
    };
    return choose(rng, lines);
}

std::string random_attr_text(std::mt19937_64& rng) {
    static const std::vector<std::string> texts = {
        "", "simple", "two words", "say \"hi\"", "back\\slash", "a=b", "caf\xc3\xa9", "TODO: check", "x  y",
    };
    return choose(rng, texts);
}

std::string random_cell_raw(std::mt19937_64& rng) {
    static const std::vector<std::string> raws = {
        "1", "-2.5", "1e3", "TRUE", "FALSE", "true", "x", "a, b", "say \"hi\"", "=A1+1", "=SUM(A1:B2)",
        ":::weird", " spaced ", "#hash", "@at", "=1/0", "007", "=", "caf\xc3\xa9", "\"quoted\"",
    };
    return choose(rng, raws);
}

std::string random_id(std::mt19937_64& rng, std::set<std::string>& used, const std::string& prefix) {
    while (true) {
        std::string id = prefix;
        int n = pick(rng, 1, 3);
        for (int i = 0; i < n; ++i)
            id += static_cast<char>('a' + pick(rng, 0, 25));
        if (chance(rng, 0.3))
            id += "_" + std::to_string(pick(rng, 0, 99));
        if (is_valid_chunk_id(id) && used.insert(id).second)
            return id;
    }
}

} // namespace

Document random_any_doc(std::mt19937_64& rng) {
    Document doc;
    if (chance(rng, 0.8))
        doc.meta["title"] = choose(rng, std::vector<std::string>{"Tax model", "untitled", "caf\xc3\xa9 \"q\"", "t"});
    else
        doc.meta["title"] = "untitled";
    if (chance(rng, 0.4))
        doc.meta["author"] = "someone";
    if (chance(rng, 0.2))
        doc.meta["lsheet"] = "1";

    std::set<std::string> used;
    std::map<ChunkKind, int> auto_counter;
    auto auto_or_explicit = [&](ChunkKind k, const std::string& prefix) {
        if (chance(rng, 0.6)) {
            std::string id = std::string(kind_name(k)) + "-" + std::to_string(++auto_counter[k]);
            used.insert(id);
            return id;
        }
        return random_id(rng, used, prefix);
    };

    int n = pick(rng, 0, 14);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        int kind = pick(rng, 0, 7);
        Chunk c;
        switch (kind) {
        case 0: {
            static const std::vector<std::string> titles = {"Overview", "Data", "A title with \"quotes\"", "",
                                                            "Sums & totals", "caf\xc3\xa9"};
            c.body = Heading{pick(rng, 1, 4), choose(rng, titles)};
            c.id = auto_or_explicit(ChunkKind::Heading, "h");
            break;
        }
        case 1:
        case 2: {
            Narrative nb;
            int lines = pick(rng, 0, 3);
            for (int l = 0; l < lines; ++l) {
                if (l)
                    nb.body += "\n";
                nb.body += chance(rng, 0.1) ? std::string(chance(rng, 0.5) ? "" : "   ") : random_line(rng);
            }
            nb.is_stub = chance(rng, 0.2);
            if (nb.is_stub && chance(rng, 0.7))
                nb.body = "TODO: describe something";
            c.body = nb;
            c.id = auto_or_explicit(ChunkKind::Narrative, "n");
            break;
        }
        case 3: {
            Grid g;
            g.n_rows = pick(rng, 0, 4);
            g.n_cols = pick(rng, 0, 3);
            for (int r = 1; r <= g.n_rows; ++r)
                for (int col = 1; col <= g.n_cols; ++col)
                    if (chance(rng, 0.6))
                        g.cells[{col, r}] = CellContent::from_raw(random_cell_raw(rng));
            c.body = g;
            c.id = random_id(rng, used, "g");
            break;
        }
        case 4: {
            auto e = random_ast(rng, 3, false);
            Formula f{format_expr(*e), std::nullopt};
            if (chance(rng, 0.4))
                f.desc = random_attr_text(rng);
            c.body = f;
            c.id = random_id(rng, used, "f");
            break;
        }
        case 5: {
            auto e = random_ast(rng, 3, false);
            c.body = Assertion{format_expr(*e), random_attr_text(rng)};
            c.id = auto_or_explicit(ChunkKind::Assertion, "a");
            break;
        }
        case 6: {
            c.body = Asset{chance(rng, 0.5) ? "img/plot.png" : "path with space.png", random_attr_text(rng)};
            c.id = auto_or_explicit(ChunkKind::Asset, "s");
            break;
        }
        default: {
            ThemeDef t;
            for (const auto& id : ids)
                if (chance(rng, 0.5))
                    t.member_ids.push_back(id);
            std::shuffle(t.member_ids.begin(), t.member_ids.end(), rng);
            c.body = t;
            c.id = random_id(rng, used, "t");
            break;
        }
        }
        ids.push_back(c.id);
        doc.chunks.push_back(std::move(c));
    }
    return doc;
}

ExprPtr random_ast(std::mt19937_64& rng, int depth, bool with_ctx) {
    auto leaf = [&]() -> ExprPtr {
        switch (pick(rng, 0, 6)) {
        case 0: return make_number(random_number(rng));
        case 1: {
            static const std::vector<std::string> texts = {"", "a", "x\"y", "two words", "caf\xc3\xa9", "=1"};
            return make_text(choose(rng, texts));
        }
        case 2: return make_bool(chance(rng, 0.5));
        case 3: {
            CellAddr a{pick(rng, 1, 30), pick(rng, 1, 200)};
            if (with_ctx && chance(rng, 0.5))
                return make_cell(std::nullopt, a);
            return make_cell(std::string("data"), a);
        }
        case 4: {
            CellAddr a{pick(rng, 1, 5), pick(rng, 1, 9)}, b{pick(rng, 1, 5), pick(rng, 1, 9)};
            if (with_ctx && chance(rng, 0.5))
                return make_range(std::nullopt, a, b);
            return make_range(std::string("rates"), a, b);
        }
        case 5: {
            static const std::vector<std::string> names = {"total", "tax_rate", "x1_", "sum_of", "data"};
            return make_name(choose(rng, names));
        }
        default: {
            static const std::vector<double> nums = {0, 0.5, 1e20, 1e-7, 123456789012345.0, 3.14159, 2};
            return make_number(choose(rng, nums));
        }
        }
    };
    if (depth <= 0 || chance(rng, 0.2))
        return leaf();
    int roll = pick(rng, 0, 9);
    if (roll < 2)
        return make_neg(random_ast(rng, depth - 1, with_ctx));
    if (roll < 7) {
        static const std::vector<BinOp> ops = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow, BinOp::Concat,
                                               BinOp::Eq,  BinOp::Ne,  BinOp::Lt,  BinOp::Le,  BinOp::Gt,  BinOp::Ge};
        return make_binary(choose(rng, ops), random_ast(rng, depth - 1, with_ctx), random_ast(rng, depth - 1, with_ctx));
    }
    static const std::vector<Fn> fns = {Fn::Sum, Fn::Average, Fn::Min, Fn::Max, Fn::Count, Fn::If,
                                        Fn::Abs, Fn::Round,   Fn::And, Fn::Or,  Fn::Not,   Fn::Concat};
    Fn fn = choose(rng, fns);
    int nargs;
    switch (fn) {
    case Fn::If: nargs = pick(rng, 2, 3); break;
    case Fn::Abs:
    case Fn::Not: nargs = 1; break;
    case Fn::Round: nargs = pick(rng, 1, 2); break;
    default: nargs = pick(rng, 1, 4);
    }
    std::vector<ExprPtr> args;
    for (int i = 0; i < nargs; ++i)
        args.push_back(random_ast(rng, depth - 1, with_ctx));
    return make_call(fn, std::move(args));
}

} // namespace lgtest
