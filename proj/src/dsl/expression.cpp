#include "latsym/dsl/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "latsym/dsl/dual.hpp"

namespace latsym::dsl {

enum class Kind : unsigned char { Number, Ref, Param, Neg, Binary, Call };
enum class BinOp : unsigned char { Add, Sub, Mul, Div, Pow };
enum class Func : unsigned char { Exp, Ln, Sin, Cos, Sqrt, Abs, Pow };

struct Node {
    Kind kind = Kind::Number;
    BinOp op = BinOp::Add;
    Func func = Func::Exp;
    double number = 0.0;
    GridRef ref;
    char letter = 'u';   // spelling of the variable (t vs y)
    bool bare = false;   // written as `u` instead of `u[0,0]`
    std::string name;    // parameter name
    SourcePos pos;
    std::vector<std::shared_ptr<Node>> args;  // Neg: 1, Binary: 2, Call: 1 or 2
    int slot = -1;
    bool ref_dependent = false;
};

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, LBracket, RBracket, Comma, End };

struct Token {
    Tok type = Tok::End;
    std::string text;
    double number = 0.0;
    SourcePos pos;
};

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::End: return "end of input";
    }
    return "?";
}

std::string format_error(const std::string& msg, SourcePos pos, const std::vector<std::string>& expected) {
    std::ostringstream os;
    os << "line " << pos.line << ", column " << pos.column << ": " << msg;
    if (!expected.empty()) {
        os << " (expected ";
        for (std::size_t k = 0; k < expected.size(); ++k) os << (k ? ", " : "") << expected[k];
        os << ")";
    }
    return os.str();
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token tok;
            tok.pos = {line_, col_};
            if (at_ >= text_.size()) {
                tok.type = Tok::End;
                out.push_back(tok);
                return out;
            }
            char c = text_[at_];
            if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && at_ + 1 < text_.size() &&
                                                                std::isdigit(static_cast<unsigned char>(text_[at_ + 1])))) {
                tok.type = Tok::Number;
                tok.number = read_number(tok.pos);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                tok.type = Tok::Ident;
                std::size_t start = at_;
                while (at_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[at_])) || text_[at_] == '_')) {
                    advance();
                }
                tok.text = std::string(text_.substr(start, at_ - start));
            } else {
                switch (c) {
                    case '+': tok.type = Tok::Plus; break;
                    case '-': tok.type = Tok::Minus; break;
                    case '*': tok.type = Tok::Star; break;
                    case '/': tok.type = Tok::Slash; break;
                    case '^': tok.type = Tok::Caret; break;
                    case '(': tok.type = Tok::LParen; break;
                    case ')': tok.type = Tok::RParen; break;
                    case '[': tok.type = Tok::LBracket; break;
                    case ']': tok.type = Tok::RBracket; break;
                    case ',': tok.type = Tok::Comma; break;
                    default:
                        throw ParseError(format_error(std::string("unexpected character '") + c + "'", tok.pos, {}),
                                         tok.pos, {});
                }
                advance();
            }
            out.push_back(std::move(tok));
        }
    }

private:
    void advance() {
        if (text_[at_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++at_;
    }

    void skip_space() {
        while (at_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[at_]))) advance();
    }

    double read_number(SourcePos pos) {
        std::size_t start = at_;
        auto digits = [&] {
            while (at_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at_]))) advance();
        };
        digits();
        if (at_ < text_.size() && text_[at_] == '.') {
            advance();
            digits();
        }
        if (at_ < text_.size() && (text_[at_] == 'e' || text_[at_] == 'E')) {
            std::size_t save_at = at_;
            int save_col = col_;
            advance();
            if (at_ < text_.size() && (text_[at_] == '+' || text_[at_] == '-')) advance();
            if (at_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at_]))) {
                digits();
            } else {
                at_ = save_at;  // `2e` is 2 followed by identifier e
                col_ = save_col;
            }
        }
        std::string s(text_.substr(start, at_ - start));
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ParseError(format_error("malformed number '" + s + "'", pos, {}), pos, {});
        }
        return v;
    }

    std::string_view text_;
    std::size_t at_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Pratt parser

constexpr int kAddPrec = 10;
constexpr int kMulPrec = 20;
constexpr int kNegPrec = 30;
constexpr int kPowPrec = 40;
constexpr int kAtomPrec = 100;

bool lookup_function(const std::string& name, Func& f, int& arity) {
    struct Entry { const char* name; Func f; int arity; };
    static constexpr Entry table[] = {
        {"exp", Func::Exp, 1}, {"ln", Func::Ln, 1},     {"log", Func::Ln, 1}, {"sin", Func::Sin, 1},
        {"cos", Func::Cos, 1}, {"sqrt", Func::Sqrt, 1}, {"abs", Func::Abs, 1}, {"pow", Func::Pow, 2},
    };
    for (const auto& e : table) {
        if (name == e.name) {
            f = e.f;
            arity = e.arity;
            return true;
        }
    }
    return false;
}

const char* function_name(Func f) {
    switch (f) {
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
        case Func::Pow: return "pow";
    }
    return "?";
}

bool is_var_letter(const std::string& s) { return s == "x" || s == "t" || s == "y" || s == "u"; }

Var var_of(char c) {
    switch (c) {
        case 'x': return Var::X;
        case 'u': return Var::U;
        default: return Var::T;
    }
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    std::shared_ptr<Node> parse_all() {
        auto e = parse_expr(0);
        if (peek().type != Tok::End) fail("unexpected " + describe(peek()), {"operator", "end of input"});
        return e;
    }

private:
    const Token& peek() const { return toks_[at_]; }
    const Token& next() { return toks_[at_++]; }

    static std::string describe(const Token& t) {
        if (t.type == Tok::Ident) return "identifier '" + t.text + "'";
        return tok_name(t.type);
    }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
        throw ParseError(format_error(msg, peek().pos, expected), peek().pos, std::move(expected));
    }

    const Token& expect(Tok t) {
        if (peek().type != t) fail("unexpected " + describe(peek()), {tok_name(t)});
        return next();
    }

    static int infix_prec(Tok t) {
        switch (t) {
            case Tok::Plus:
            case Tok::Minus: return kAddPrec;
            case Tok::Star:
            case Tok::Slash: return kMulPrec;
            default: return -1;  // ^ binds inside parse_prefix
        }
    }

    std::shared_ptr<Node> parse_expr(int min_prec) {
        auto lhs = parse_prefix();
        for (;;) {
            const Token& op = peek();
            int prec = infix_prec(op.type);
            if (prec <= min_prec) break;
            next();
            auto node = std::make_shared<Node>();
            node->kind = Kind::Binary;
            node->pos = op.pos;
            switch (op.type) {
                case Tok::Plus: node->op = BinOp::Add; break;
                case Tok::Minus: node->op = BinOp::Sub; break;
                case Tok::Star: node->op = BinOp::Mul; break;
                default: node->op = BinOp::Div; break;
            }
            auto rhs = parse_expr(prec);
            node->args = {std::move(lhs), std::move(rhs)};
            lhs = std::move(node);
        }
        return lhs;
    }

    std::shared_ptr<Node> parse_pow_rhs() {
        if (peek().type == Tok::Minus || peek().type == Tok::Plus) {
            const Token& op = next();
            auto operand = parse_pow_rhs();
            if (op.type == Tok::Plus) return operand;
            auto neg = std::make_shared<Node>();
            neg->kind = Kind::Neg;
            neg->pos = op.pos;
            neg->args = {std::move(operand)};
            return neg;
        }
        auto base = parse_atom();
        if (peek().type == Tok::Caret) {
            const Token& op = next();
            auto node = std::make_shared<Node>();
            node->kind = Kind::Binary;
            node->op = BinOp::Pow;
            node->pos = op.pos;
            node->args = {std::move(base), parse_pow_rhs()};
            return node;
        }
        return base;
    }

    std::shared_ptr<Node> parse_prefix() {
        if (peek().type == Tok::Minus || peek().type == Tok::Plus) {
            const Token& op = next();
            auto operand = parse_expr(kNegPrec);
            if (op.type == Tok::Plus) return operand;
            auto neg = std::make_shared<Node>();
            neg->kind = Kind::Neg;
            neg->pos = op.pos;
            neg->args = {std::move(operand)};
            return neg;
        }
        auto atom = parse_atom();
        if (peek().type == Tok::Caret) {
            const Token& op = next();
            auto node = std::make_shared<Node>();
            node->kind = Kind::Binary;
            node->op = BinOp::Pow;
            node->pos = op.pos;
            node->args = {std::move(atom), parse_pow_rhs()};
            return node;
        }
        return atom;
    }

    int parse_offset() {
        int sign = 1;
        if (peek().type == Tok::Minus || peek().type == Tok::Plus) {
            if (next().type == Tok::Minus) sign = -1;
        }
        const Token& t = peek();
        if (t.type != Tok::Number) fail("malformed grid reference: unexpected " + describe(t), {"integer offset"});
        if (t.number != std::floor(t.number) || std::abs(t.number) > 1000) {
            fail("malformed grid reference: offset must be an integer", {"integer offset"});
        }
        next();
        return sign * static_cast<int>(t.number);
    }

    std::shared_ptr<Node> parse_atom() {
        const Token& t = peek();
        auto node = std::make_shared<Node>();
        node->pos = t.pos;
        switch (t.type) {
            case Tok::Number:
                node->kind = Kind::Number;
                node->number = next().number;
                return node;
            case Tok::LParen: {
                next();
                auto inner = parse_expr(0);
                expect(Tok::RParen);
                return inner;
            }
            case Tok::Ident: {
                std::string name = next().text;
                if (peek().type == Tok::LBracket) {
                    if (!is_var_letter(name)) {
                        fail("malformed grid reference: '" + name + "' is not one of x, t, y, u", {"x", "t", "y", "u"});
                    }
                    next();
                    node->kind = Kind::Ref;
                    node->letter = name[0];
                    node->ref.var = var_of(name[0]);
                    node->ref.at.i = parse_offset();
                    expect(Tok::Comma);
                    node->ref.at.j = parse_offset();
                    expect(Tok::RBracket);
                    return node;
                }
                if (peek().type == Tok::LParen) {
                    int arity = 0;
                    if (!lookup_function(name, node->func, arity)) {
                        throw ParseError(format_error("unknown function '" + name + "'", node->pos,
                                                      {"exp", "ln", "sin", "cos", "sqrt", "abs", "pow"}),
                                         node->pos, {"exp", "ln", "sin", "cos", "sqrt", "abs", "pow"});
                    }
                    next();
                    node->kind = Kind::Call;
                    node->args.push_back(parse_expr(0));
                    if (arity == 2) {
                        expect(Tok::Comma);
                        node->args.push_back(parse_expr(0));
                    }
                    expect(Tok::RParen);
                    return node;
                }
                if (is_var_letter(name)) {
                    node->kind = Kind::Ref;
                    node->letter = name[0];
                    node->ref.var = var_of(name[0]);
                    node->bare = true;
                    return node;
                }
                if (name == "pi") {
                    node->kind = Kind::Number;
                    node->number = std::numbers::pi;
                    node->name = "pi";
                    return node;
                }
                node->kind = Kind::Param;
                node->name = name;
                return node;
            }
            default:
                fail("unexpected " + describe(t), {"number", "identifier", "'('", "'-'"});
        }
    }

    std::vector<Token> toks_;
    std::size_t at_ = 0;
};

// ---------------------------------------------------------------------------
// Serialization

int node_prec(const Node& n) {
    switch (n.kind) {
        case Kind::Neg: return kNegPrec;
        case Kind::Binary:
            switch (n.op) {
                case BinOp::Add:
                case BinOp::Sub: return kAddPrec;
                case BinOp::Mul:
                case BinOp::Div: return kMulPrec;
                case BinOp::Pow: return kPowPrec;
            }
            break;
        default: break;
    }
    return kAtomPrec;
}

std::string format_number(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write(const Node& n, std::string& out);

void write_child(const Node& child, bool parens, std::string& out) {
    if (parens) out += '(';
    write(child, out);
    if (parens) out += ')';
}

void write(const Node& n, std::string& out) {
    switch (n.kind) {
        case Kind::Number:
            out += n.name == "pi" ? std::string("pi") : format_number(n.number);
            return;
        case Kind::Ref:
            out += n.letter;
            if (!n.bare) out += "[" + std::to_string(n.ref.at.i) + "," + std::to_string(n.ref.at.j) + "]";
            return;
        case Kind::Param: out += n.name; return;
        case Kind::Neg: {
            out += '-';
            const Node& c = *n.args[0];
            write_child(c, node_prec(c) < kNegPrec || c.kind == Kind::Neg, out);
            return;
        }
        case Kind::Call:
            out += function_name(n.func);
            out += '(';
            write(*n.args[0], out);
            if (n.args.size() > 1) {
                out += ", ";
                write(*n.args[1], out);
            }
            out += ')';
            return;
        case Kind::Binary: {
            const Node& l = *n.args[0];
            const Node& r = *n.args[1];
            int p = node_prec(n);
            if (n.op == BinOp::Pow) {
                write_child(l, node_prec(l) <= p, out);
                out += '^';
                write_child(r, node_prec(r) < p, out);
                return;
            }
            write_child(l, node_prec(l) < p, out);
            switch (n.op) {
                case BinOp::Add: out += " + "; break;
                case BinOp::Sub: out += " - "; break;
                case BinOp::Mul: out += "*"; break;
                default: out += "/"; break;
            }
            write_child(r, node_prec(r) <= p, out);
            return;
        }
    }
}

bool same(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
        case Kind::Number:
            if (a.number != b.number) return false;
            break;
        case Kind::Ref:
            if (a.ref != b.ref || a.letter != b.letter || a.bare != b.bare) return false;
            break;
        case Kind::Param:
            if (a.name != b.name) return false;
            break;
        case Kind::Binary:
            if (a.op != b.op) return false;
            break;
        case Kind::Call:
            if (a.func != b.func) return false;
            break;
        case Kind::Neg: break;
    }
    for (std::size_t k = 0; k < a.args.size(); ++k) {
        if (!same(*a.args[k], *b.args[k])) return false;
    }
    return true;
}

void collect(const Node& n, std::vector<GridRef>& refs, std::vector<std::string>& params) {
    if (n.kind == Kind::Ref) refs.push_back(n.ref);
    if (n.kind == Kind::Param) params.push_back(n.name);
    for (const auto& c : n.args) collect(*c, refs, params);
}

bool assign_slots(Node& n, const std::vector<GridRef>& refs, const std::vector<std::string>& params) {
    bool dep = false;
    if (n.kind == Kind::Ref) {
        n.slot = static_cast<int>(std::lower_bound(refs.begin(), refs.end(), n.ref) - refs.begin());
        dep = true;
    } else if (n.kind == Kind::Param) {
        n.slot = static_cast<int>(std::lower_bound(params.begin(), params.end(), n.name) - params.begin());
    }
    for (auto& c : n.args) dep = assign_slots(*c, refs, params) || dep;
    n.ref_dependent = dep;
    return dep;
}

std::shared_ptr<Node> clone_bound(const Node& n, const std::map<std::string, double>& values) {
    auto out = std::make_shared<Node>(n);
    if (n.kind == Kind::Param) {
        if (auto it = values.find(n.name); it != values.end()) {
            out->kind = Kind::Number;
            out->number = std::abs(it->second);
            out->name.clear();
            if (it->second < 0.0) {
                auto neg = std::make_shared<Node>();
                neg->kind = Kind::Neg;
                neg->pos = n.pos;
                neg->args = {out};
                return neg;
            }
        }
    }
    for (auto& c : out->args) c = clone_bound(*c, values);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

template <class T>
T eval_node(const Node& n, std::span<const T> refs, std::span<const T> params) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    switch (n.kind) {
        case Kind::Number: return T(n.number);
        case Kind::Ref: return refs[static_cast<std::size_t>(n.slot)];
        case Kind::Param: return params[static_cast<std::size_t>(n.slot)];
        case Kind::Neg: return -eval_node(*n.args[0], refs, params);
        case Kind::Binary: {
            T a = eval_node(*n.args[0], refs, params);
            if (n.op == BinOp::Pow) {
                const Node& rhs = *n.args[1];
                T b = eval_node(rhs, refs, params);
                double base = primal(a);
                double ex = primal(b);
                if (!rhs.ref_dependent) {
                    if (base == 0.0 && ex < 0.0) throw EvalError("0 raised to a negative power", n.pos);
                    if (base < 0.0 && ex != std::floor(ex)) {
                        throw EvalError("negative base raised to a non-integer power", n.pos);
                    }
                    return pow_const(a, ex);
                }
                if (base <= 0.0) throw EvalError("non-positive base raised to a variable power", n.pos);
                return exp(b * log(a));
            }
            T b = eval_node(*n.args[1], refs, params);
            switch (n.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                default:
                    if (primal(b) == 0.0) throw EvalError("division by zero", n.pos);
                    return a / b;
            }
        }
        case Kind::Call: {
            T a = eval_node(*n.args[0], refs, params);
            double v = primal(a);
            switch (n.func) {
                case Func::Exp: return exp(a);
                case Func::Ln:
                    if (v <= 0.0) throw EvalError("ln of non-positive value", n.pos);
                    return log(a);
                case Func::Sin: return sin(a);
                case Func::Cos: return cos(a);
                case Func::Sqrt:
                    if (v < 0.0) throw EvalError("sqrt of negative value", n.pos);
                    return sqrt(a);
                case Func::Abs: return abs(a);
                case Func::Pow: {
                    const Node& rhs = *n.args[1];
                    T b = eval_node(rhs, refs, params);
                    double ex = primal(b);
                    if (!rhs.ref_dependent) {
                        if (v == 0.0 && ex < 0.0) throw EvalError("0 raised to a negative power", n.pos);
                        if (v < 0.0 && ex != std::floor(ex)) {
                            throw EvalError("negative base raised to a non-integer power", n.pos);
                        }
                        return pow_const(a, ex);
                    }
                    if (v <= 0.0) throw EvalError("non-positive base raised to a variable power", n.pos);
                    return exp(b * log(a));
                }
            }
        }
    }
    return T(0.0);
}

}  // namespace

// ---------------------------------------------------------------------------

char var_letter(Var v) {
    switch (v) {
        case Var::X: return 'x';
        case Var::T: return 't';
        case Var::U: return 'u';
    }
    return '?';
}

std::string to_string(GridRef ref) {
    return std::string(1, var_letter(ref.var)) + "[" + std::to_string(ref.at.i) + "," + std::to_string(ref.at.j) + "]";
}

ParseError::ParseError(const std::string& what, SourcePos pos, std::vector<std::string> expected)
    : std::runtime_error(what), pos_(pos), expected_(std::move(expected)) {}

EvalError::EvalError(const std::string& what, SourcePos pos)
    : std::runtime_error("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " + what),
      pos_(pos) {}

Expression::Expression() : Expression(std::make_shared<Node>()) {}

Expression::Expression(std::shared_ptr<Node> root) {
    collect(*root, refs_, params_);
    std::sort(refs_.begin(), refs_.end());
    refs_.erase(std::unique(refs_.begin(), refs_.end()), refs_.end());
    std::sort(params_.begin(), params_.end());
    params_.erase(std::unique(params_.begin(), params_.end()), params_.end());
    assign_slots(*root, refs_, params_);
    root_ = std::move(root);
}

Expression Expression::parse(std::string_view text) {
    Parser p(Lexer(text).run());
    return Expression(p.parse_all());
}

Expression Expression::constant(double value) {
    auto n = std::make_shared<Node>();
    n->number = value;
    if (value < 0.0) {
        n->number = -value;
        auto neg = std::make_shared<Node>();
        neg->kind = Kind::Neg;
        neg->args = {n};
        return Expression(neg);
    }
    return Expression(n);
}

std::string Expression::to_string() const {
    std::string out;
    write(*root_, out);
    return out;
}

bool Expression::operator==(const Expression& other) const { return same(*root_, *other.root_); }

Expression Expression::bind(const std::map<std::string, double>& values) const {
    return Expression(clone_bound(*root_, values));
}

template <class T>
T Expression::evaluate(std::span<const T> ref_values, std::span<const T> param_values) const {
    return eval_node<T>(*root_, ref_values, param_values);
}

template double Expression::evaluate<double>(std::span<const double>, std::span<const double>) const;
template Dual<double> Expression::evaluate<Dual<double>>(std::span<const Dual<double>>,
                                                         std::span<const Dual<double>>) const;
template Dual<Dual<double>> Expression::evaluate<Dual<Dual<double>>>(std::span<const Dual<Dual<double>>>,
                                                                     std::span<const Dual<Dual<double>>>) const;

double Expression::value_and_gradient(std::span<const double> ref_values, std::span<const double> param_values,
                                      std::span<double> gradient) const {
    const std::size_t n = refs_.size();
    if (n == 0) return evaluate<double>(ref_values, param_values);
    std::vector<Dual<double>> r(n);
    std::vector<Dual<double>> p(param_values.size());
    for (std::size_t k = 0; k < n; ++k) r[k] = Dual<double>(ref_values[k], 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = Dual<double>(param_values[k], 0.0);
    double value = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        r[k].d = 1.0;
        Dual<double> out = evaluate<Dual<double>>(r, p);
        r[k].d = 0.0;
        value = out.v;
        gradient[k] = out.d;
    }
    return value;
}

namespace {

void gather(const Expression& e, const Environment& env, std::vector<double>& refs, std::vector<double>& params) {
    refs.clear();
    params.clear();
    for (const auto& r : e.refs()) {
        auto it = env.refs.find(r);
        if (it == env.refs.end()) throw std::invalid_argument("unbound grid reference " + to_string(r));
        refs.push_back(it->second);
    }
    for (const auto& name : e.parameters()) {
        auto it = env.params.find(name);
        if (it == env.params.end()) throw std::invalid_argument("unbound parameter '" + name + "'");
        params.push_back(it->second);
    }
}

}  // namespace

double eval(const Expression& e, const Environment& env) {
    std::vector<double> refs;
    std::vector<double> params;
    gather(e, env, refs, params);
    return e.evaluate<double>(refs, params);
}

ValueGradient eval_with_gradient(const Expression& e, const Environment& env) {
    std::vector<double> refs;
    std::vector<double> params;
    gather(e, env, refs, params);
    std::vector<double> grad(refs.size());
    ValueGradient out;
    out.value = e.value_and_gradient(refs, params, grad);
    for (std::size_t k = 0; k < refs.size(); ++k) out.gradient[e.refs()[k]] = grad[k];
    return out;
}

}  // namespace latsym::dsl
