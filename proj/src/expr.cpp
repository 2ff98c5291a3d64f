#include "litgrid/expr.hpp"
#include "litgrid/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace litgrid {

namespace {

struct FnInfo {
    Fn fn;
    std::string_view name;
    std::size_t min_args;
    std::size_t max_args;
    bool aggregate;
};

constexpr std::size_t kVariadic = std::numeric_limits<std::size_t>::max();

constexpr std::array<FnInfo, 12> kFunctions{{
    {Fn::Sum, "SUM", 1, kVariadic, true},
    {Fn::Average, "AVERAGE", 1, kVariadic, true},
    {Fn::Min, "MIN", 1, kVariadic, true},
    {Fn::Max, "MAX", 1, kVariadic, true},
    {Fn::Count, "COUNT", 1, kVariadic, true},
    {Fn::If, "IF", 2, 3, false},
    {Fn::Abs, "ABS", 1, 1, false},
    {Fn::Round, "ROUND", 1, 2, false},
    {Fn::And, "AND", 1, kVariadic, true},
    {Fn::Or, "OR", 1, kVariadic, true},
    {Fn::Not, "NOT", 1, 1, false},
    {Fn::Concat, "CONCAT", 1, kVariadic, true},
}};

const FnInfo& info(Fn fn) {
    for (const auto& f : kFunctions)
        if (f.fn == fn)
            return f;
    return kFunctions[0];
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

} // namespace

std::string_view op_symbol(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Pow: return "^";
    case BinOp::Concat: return "&";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    }
    return "?";
}

std::string_view fn_name(Fn fn) { return info(fn).name; }

std::optional<Fn> fn_from_name(std::string_view name) {
    for (const auto& f : kFunctions)
        if (iequals(f.name, name))
            return f.fn;
    return std::nullopt;
}

bool is_aggregate(Fn fn) { return info(fn).aggregate; }

ExprPtr make_number(double v) { return std::make_shared<const Expr>(Expr{NumberLit{v}}); }
ExprPtr make_text(std::string v) { return std::make_shared<const Expr>(Expr{TextLit{std::move(v)}}); }
ExprPtr make_bool(bool v) { return std::make_shared<const Expr>(Expr{BoolLit{v}}); }
ExprPtr make_cell(std::optional<std::string> grid, CellAddr addr) {
    return std::make_shared<const Expr>(Expr{CellRef{std::move(grid), addr}});
}
ExprPtr make_range(std::optional<std::string> grid, CellAddr a, CellAddr b) {
    CellAddr from{std::min(a.column, b.column), std::min(a.row, b.row)};
    CellAddr to{std::max(a.column, b.column), std::max(a.row, b.row)};
    return std::make_shared<const Expr>(Expr{RangeRef{std::move(grid), from, to}});
}
ExprPtr make_name(std::string name) { return std::make_shared<const Expr>(Expr{NameRef{std::move(name)}}); }
ExprPtr make_neg(ExprPtr arg) { return std::make_shared<const Expr>(Expr{Unary{std::move(arg)}}); }
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_call(Fn fn, std::vector<ExprPtr> args) {
    return std::make_shared<const Expr>(Expr{Call{fn, std::move(args)}});
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, NumberLit> || std::is_same_v<T, TextLit> ||
                          std::is_same_v<T, BoolLit>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, CellRef>) {
                return x.grid == y.grid && x.addr == y.addr;
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                return x.grid == y.grid && x.from == y.from && x.to == y.to;
            } else if constexpr (std::is_same_v<T, NameRef>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return *x.arg == *y.arg;
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
            } else {
                if (x.fn != y.fn || x.args.size() != y.args.size())
                    return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!(*x.args[i] == *y.args[i]))
                        return false;
                return true;
            }
        },
        a.node);
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Number, String, Ident, Op, LParen, RParen, Comma, Colon, Bang, End };

struct Token {
    Tok kind = Tok::End;
    std::string text; // identifier/op spelling, or decoded string literal
    double number = 0;
    std::size_t offset = 0;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

[[noreturn]] void fail(ErrorCode code, std::size_t offset, const std::string& msg) {
    throw PositionedError(code, msg + " at offset " + std::to_string(offset), offset);
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= src_.size())
            return t;
        char c = src_[pos_];
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1])))
            return number(t);
        if (c == '"')
            return string(t);
        if (is_ident_start(c)) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_ident_char(src_[pos_]))
                ++pos_;
            t.kind = Tok::Ident;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        ++pos_;
        switch (c) {
        case '(': t.kind = Tok::LParen; return t;
        case ')': t.kind = Tok::RParen; return t;
        case ',': t.kind = Tok::Comma; return t;
        case ':': t.kind = Tok::Colon; return t;
        case '!': t.kind = Tok::Bang; return t;
        case '+': case '-': case '*': case '/': case '^': case '&': case '=':
            t.kind = Tok::Op;
            t.text = std::string(1, c);
            return t;
        case '<':
            t.kind = Tok::Op;
            if (pos_ < src_.size() && (src_[pos_] == '=' || src_[pos_] == '>')) {
                t.text = std::string{'<', src_[pos_]};
                ++pos_;
            } else {
                t.text = "<";
            }
            return t;
        case '>':
            t.kind = Tok::Op;
            if (pos_ < src_.size() && src_[pos_] == '=') {
                t.text = ">=";
                ++pos_;
            } else {
                t.text = ">";
            }
            return t;
        default:
            fail(ErrorCode::ParseError, t.offset, std::string("unexpected character '") + c + "'");
        }
    }

private:
    Token number(Token& t) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(src_[pos_]))
            ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_]))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() && is_digit(src_[pos_])) {
                while (pos_ < src_.size() && is_digit(src_[pos_]))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        if (pos_ < src_.size() && is_ident_char(src_[pos_]))
            fail(ErrorCode::ParseError, pos_, "malformed number");
        std::string text(src_.substr(start, pos_ - start));
        if (text.front() == '.')
            text.insert(text.begin(), '0');
        double v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
            fail(ErrorCode::ParseError, start, "number out of range");
        t.kind = Tok::Number;
        t.number = v;
        t.text = std::move(text);
        return t;
    }

    Token string(Token& t) {
        ++pos_;
        std::string out;
        while (true) {
            if (pos_ >= src_.size())
                fail(ErrorCode::ParseError, pos_, "unterminated string, expected '\"'");
            char c = src_[pos_++];
            if (c == '"') {
                if (pos_ < src_.size() && src_[pos_] == '"') {
                    out.push_back('"');
                    ++pos_;
                    continue;
                }
                break;
            }
            out.push_back(c);
        }
        t.kind = Tok::String;
        t.text = std::move(out);
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser: comparison < & < + - < * / < unary - < ^ (right) < atom

class Parser {
public:
    Parser(std::string_view src, const std::optional<std::string>& ctx) : lex_(src), ctx_(ctx) {
        advance();
    }

    ExprPtr parse() {
        if (cur_.kind == Tok::End)
            fail(ErrorCode::ParseError, cur_.offset, "expected expression");
        ExprPtr e = comparison();
        if (cur_.kind != Tok::End)
            fail(ErrorCode::ParseError, cur_.offset, "expected operator or end of input");
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    bool at_op(std::string_view op) const { return cur_.kind == Tok::Op && cur_.text == op; }

    ExprPtr comparison() {
        ExprPtr lhs = concat();
        while (cur_.kind == Tok::Op) {
            std::optional<BinOp> op;
            if (cur_.text == "=") op = BinOp::Eq;
            else if (cur_.text == "<>") op = BinOp::Ne;
            else if (cur_.text == "<") op = BinOp::Lt;
            else if (cur_.text == "<=") op = BinOp::Le;
            else if (cur_.text == ">") op = BinOp::Gt;
            else if (cur_.text == ">=") op = BinOp::Ge;
            if (!op)
                break;
            advance();
            lhs = make_binary(*op, lhs, concat());
        }
        return lhs;
    }

    ExprPtr concat() {
        ExprPtr lhs = additive();
        while (at_op("&")) {
            advance();
            lhs = make_binary(BinOp::Concat, lhs, additive());
        }
        return lhs;
    }

    ExprPtr additive() {
        ExprPtr lhs = multiplicative();
        while (at_op("+") || at_op("-")) {
            BinOp op = cur_.text == "+" ? BinOp::Add : BinOp::Sub;
            advance();
            lhs = make_binary(op, lhs, multiplicative());
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        ExprPtr lhs = unary();
        while (at_op("*") || at_op("/")) {
            BinOp op = cur_.text == "*" ? BinOp::Mul : BinOp::Div;
            advance();
            lhs = make_binary(op, lhs, unary());
        }
        return lhs;
    }

    ExprPtr unary() {
        if (at_op("-")) {
            advance();
            return make_neg(unary());
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (at_op("^")) {
            advance();
            return make_binary(BinOp::Pow, base, unary());
        }
        return base;
    }

    CellAddr expect_cell() {
        if (cur_.kind != Tok::Ident || !looks_like_cell_addr(cur_.text))
            fail(ErrorCode::ParseError, cur_.offset, "expected cell address");
        auto addr = parse_cell_addr(cur_.text);
        if (!addr || addr->column > kMaxColumn)
            fail(ErrorCode::ParseError, cur_.offset, "invalid cell address '" + cur_.text + "'");
        advance();
        return *addr;
    }

    ExprPtr cell_or_range(std::optional<std::string> grid) {
        CellAddr from = expect_cell();
        if (cur_.kind == Tok::Colon) {
            advance();
            CellAddr to = expect_cell();
            return make_range(std::move(grid), from, to);
        }
        return make_cell(std::move(grid), from);
    }

    ExprPtr call(const Token& name_tok) {
        auto fn = fn_from_name(name_tok.text);
        if (!fn)
            fail(ErrorCode::UnknownFunction, name_tok.offset, "unknown function '" + name_tok.text + "'");
        advance(); // name
        advance(); // '('
        std::vector<ExprPtr> args;
        if (cur_.kind != Tok::RParen) {
            while (true) {
                if (cur_.kind == Tok::End)
                    fail(ErrorCode::ParseError, cur_.offset, "expected expression or ')'");
                args.push_back(comparison());
                if (cur_.kind == Tok::Comma) {
                    advance();
                    continue;
                }
                break;
            }
        }
        if (cur_.kind != Tok::RParen)
            fail(ErrorCode::ParseError, cur_.offset, "expected ',' or ')'");
        advance();
        const auto& fi = info(*fn);
        if (args.size() < fi.min_args || args.size() > fi.max_args)
            fail(ErrorCode::ParseError, name_tok.offset,
                 "wrong number of arguments to " + std::string(fi.name));
        return make_call(*fn, std::move(args));
    }

    ExprPtr atom() {
        switch (cur_.kind) {
        case Tok::Number: {
            double v = cur_.number;
            advance();
            return make_number(v);
        }
        case Tok::String: {
            std::string v = cur_.text;
            advance();
            return make_text(std::move(v));
        }
        case Tok::LParen: {
            advance();
            ExprPtr inner = comparison();
            if (cur_.kind != Tok::RParen)
                fail(ErrorCode::ParseError, cur_.offset, "expected ')'");
            advance();
            return inner;
        }
        case Tok::Ident:
            return identifier();
        case Tok::End:
            fail(ErrorCode::ParseError, cur_.offset, "expected expression");
        default:
            fail(ErrorCode::ParseError, cur_.offset, "expected expression");
        }
    }

    ExprPtr identifier() {
        Token tok = cur_;
        // Peek by lexing ahead from a copy.
        Lexer peek_lexer = lex_;
        Token peek = peek_lexer.next();
        if (peek.kind == Tok::LParen)
            return call(tok);
        if (peek.kind == Tok::Bang) {
            if (!is_valid_chunk_id(tok.text))
                fail(ErrorCode::ParseError, tok.offset, "invalid grid name '" + tok.text + "'");
            advance();
            advance();
            return cell_or_range(tok.text);
        }
        if (iequals(tok.text, "TRUE") || iequals(tok.text, "FALSE")) {
            advance();
            return make_bool(iequals(tok.text, "TRUE"));
        }
        if (looks_like_cell_addr(tok.text)) {
            if (!ctx_)
                fail(ErrorCode::UnknownRef, tok.offset,
                     "cell reference '" + tok.text + "' needs a grid qualifier outside a grid");
            return cell_or_range(std::nullopt);
        }
        advance();
        return make_name(tok.text);
    }

    Lexer lex_;
    Token cur_;
    const std::optional<std::string>& ctx_;
};

// ---------------------------------------------------------------------------
// Formatter

constexpr int kAtomPrec = 7;
constexpr int kPowPrec = 6;
constexpr int kUnaryPrec = 5;

int binop_prec(BinOp op) {
    switch (op) {
    case BinOp::Eq: case BinOp::Ne: case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
        return 1;
    case BinOp::Concat: return 2;
    case BinOp::Add: case BinOp::Sub: return 3;
    case BinOp::Mul: case BinOp::Div: return 4;
    case BinOp::Pow: return kPowPrec;
    }
    return 0;
}

int prec(const Expr& e) {
    if (auto* b = std::get_if<Binary>(&e.node))
        return binop_prec(b->op);
    if (std::holds_alternative<Unary>(e.node))
        return kUnaryPrec;
    return kAtomPrec;
}

std::string format_number_literal(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void format_into(const Expr& e, std::string& out);

void format_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap)
        out.push_back('(');
    format_into(e, out);
    if (wrap)
        out.push_back(')');
}

void format_ref_prefix(const std::optional<std::string>& grid, std::string& out) {
    if (grid) {
        out += *grid;
        out.push_back('!');
    }
}

void format_into(const Expr& e, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                out += format_number_literal(n.value);
            } else if constexpr (std::is_same_v<T, TextLit>) {
                out.push_back('"');
                for (char c : n.value) {
                    if (c == '"')
                        out.push_back('"');
                    out.push_back(c);
                }
                out.push_back('"');
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                out += n.value ? "TRUE" : "FALSE";
            } else if constexpr (std::is_same_v<T, CellRef>) {
                format_ref_prefix(n.grid, out);
                out += to_string(n.addr);
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                format_ref_prefix(n.grid, out);
                out += to_string(n.from);
                out.push_back(':');
                out += to_string(n.to);
            } else if constexpr (std::is_same_v<T, NameRef>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                out.push_back('-');
                format_wrapped(*n.arg, prec(*n.arg) < kUnaryPrec, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                int p = binop_prec(n.op);
                if (n.op == BinOp::Pow) {
                    format_wrapped(*n.lhs, prec(*n.lhs) < kAtomPrec, out);
                    out += " ^ ";
                    format_wrapped(*n.rhs, prec(*n.rhs) < kUnaryPrec, out);
                } else {
                    format_wrapped(*n.lhs, prec(*n.lhs) < p, out);
                    out.push_back(' ');
                    out += op_symbol(n.op);
                    out.push_back(' ');
                    format_wrapped(*n.rhs, prec(*n.rhs) <= p, out);
                }
            } else {
                out += fn_name(n.fn);
                out.push_back('(');
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i)
                        out += ", ";
                    format_into(*n.args[i], out);
                }
                out.push_back(')');
            }
        },
        e.node);
}

void collect_refs(const Expr& e, const std::optional<std::string>& ctx, std::set<Ref>& out) {
    auto resolve = [&](const std::optional<std::string>& grid) -> std::string {
        if (grid)
            return *grid;
        if (!ctx)
            throw Error(ErrorCode::UnresolvedContext, "bare cell reference without a grid context");
        return *ctx;
    };
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CellRef>) {
                out.insert(Ref::cell(resolve(n.grid), n.addr));
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                out.insert(Ref::range(resolve(n.grid), n.from, n.to));
            } else if constexpr (std::is_same_v<T, NameRef>) {
                out.insert(Ref::name(n.name));
            } else if constexpr (std::is_same_v<T, Unary>) {
                collect_refs(*n.arg, ctx, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect_refs(*n.lhs, ctx, out);
                collect_refs(*n.rhs, ctx, out);
            } else if constexpr (std::is_same_v<T, Call>) {
                for (const auto& a : n.args)
                    collect_refs(*a, ctx, out);
            }
        },
        e.node);
}

} // namespace

ExprPtr parse_expr(std::string_view text, const std::optional<std::string>& grid_ctx) {
    Parser p(text, grid_ctx);
    return p.parse();
}

std::string format_expr(const Expr& e) {
    std::string out;
    format_into(e, out);
    return out;
}

std::optional<std::string> canonical_expr_text(std::string_view text, const std::optional<std::string>& grid_ctx) {
    try {
        return format_expr(*parse_expr(text, grid_ctx));
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::string to_string(const Ref& ref) {
    switch (ref.kind) {
    case Ref::Kind::Cell: return ref.target + "!" + to_string(ref.from);
    case Ref::Kind::Range: return ref.target + "!" + to_string(ref.from) + ":" + to_string(ref.to);
    case Ref::Kind::Name: return ref.target;
    }
    return ref.target;
}

std::set<Ref> refs_of(const Expr& e, const std::optional<std::string>& grid_ctx) {
    std::set<Ref> out;
    collect_refs(e, grid_ctx, out);
    return out;
}

} // namespace litgrid
