#include "displace/expr.hpp"

#include "displace/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace displace {

namespace {

enum class Op { Number, Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Ln, Sin, Cos, Sqrt, Abs, Min, Max };

struct FuncInfo {
    std::string_view name;
    Func func;
    int arity;
};

constexpr std::array<FuncInfo, 8> kFunctions{{
    {"exp", Func::Exp, 1},
    {"ln", Func::Ln, 1},
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
}};

std::string_view func_name(Func f) {
    for (const auto& info : kFunctions)
        if (info.func == f) return info.name;
    return "?";
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

struct Expr::Node {
    Op op;
    double value = 0.0;     // Number, Constant
    std::size_t index = 0;  // Variable slot
    Func func = Func::Exp;  // Call
    std::string name;       // Constant or Variable name
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_leaf(Op op, double value, std::size_t index, std::string name) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->value = value;
    n->index = index;
    n->name = std::move(name);
    return n;
}

NodePtr make_op(Op op, std::vector<NodePtr> args, Func func = Func::Exp) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->func = func;
    n->args = std::move(args);
    return n;
}

int precedence_char(Op op) {
    switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
    case Op::Pow: return '^';
    default: return '?';
    }
}

void print(const Expr::Node& n, const std::map<std::string, std::string>* rename, std::string& out) {
    switch (n.op) {
    case Op::Number:
        out += format_number(n.value);
        return;
    case Op::Constant:
        out += n.name;
        return;
    case Op::Variable:
        if (rename) {
            if (auto it = rename->find(n.name); it != rename->end()) {
                out += it->second;
                return;
            }
        }
        out += n.name;
        return;
    case Op::Neg:
        out += "(-";
        print(*n.args[0], rename, out);
        out += ')';
        return;
    case Op::Call:
        out += func_name(n.func);
        out += '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            print(*n.args[i], rename, out);
        }
        out += ')';
        return;
    default:
        out += '(';
        print(*n.args[0], rename, out);
        out += ' ';
        out += static_cast<char>(precedence_char(n.op));
        out += ' ';
        print(*n.args[1], rename, out);
        out += ')';
        return;
    }
}

std::string node_text(const Expr::Node& n) {
    std::string s;
    print(n, nullptr, s);
    return s;
}

[[noreturn]] void domain_error(const Expr::Node& n, const char* reason) {
    auto text = node_text(n);
    throw DomainError(text, std::string(reason) + " in '" + text + "'");
}

double evaluate(const Expr::Node& n, std::span<const double> vars) {
    double r = 0.0;
    switch (n.op) {
    case Op::Number:
    case Op::Constant:
        return n.value;
    case Op::Variable:
        return vars[n.index];
    case Op::Neg:
        r = -evaluate(*n.args[0], vars);
        break;
    case Op::Add:
        r = evaluate(*n.args[0], vars) + evaluate(*n.args[1], vars);
        break;
    case Op::Sub:
        r = evaluate(*n.args[0], vars) - evaluate(*n.args[1], vars);
        break;
    case Op::Mul:
        r = evaluate(*n.args[0], vars) * evaluate(*n.args[1], vars);
        break;
    case Op::Div: {
        double num = evaluate(*n.args[0], vars);
        double den = evaluate(*n.args[1], vars);
        if (den == 0.0) domain_error(n, "division by zero");
        r = num / den;
        break;
    }
    case Op::Pow: {
        double base = evaluate(*n.args[0], vars);
        double expo = evaluate(*n.args[1], vars);
        if (base == 0.0 && expo < 0.0) domain_error(n, "zero raised to a negative power");
        r = std::pow(base, expo);
        if (std::isnan(r)) domain_error(n, "negative base with non-integer exponent");
        break;
    }
    case Op::Call: {
        double a = evaluate(*n.args[0], vars);
        switch (n.func) {
        case Func::Exp: r = std::exp(a); break;
        case Func::Ln:
            if (!(a > 0.0)) domain_error(n, "logarithm of a non-positive value");
            r = std::log(a);
            break;
        case Func::Sin: r = std::sin(a); break;
        case Func::Cos: r = std::cos(a); break;
        case Func::Sqrt:
            if (a < 0.0) domain_error(n, "square root of a negative value");
            r = std::sqrt(a);
            break;
        case Func::Abs: r = std::fabs(a); break;
        case Func::Min: r = std::min(a, evaluate(*n.args[1], vars)); break;
        case Func::Max: r = std::max(a, evaluate(*n.args[1], vars)); break;
        }
        break;
    }
    }
    if (std::isnan(r)) domain_error(n, "undefined result");
    return r;
}

bool equal_trees(const Expr::Node& a, const Expr::Node& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
    case Op::Number:
        return a.value == b.value;
    case Op::Constant:
    case Op::Variable:
        return a.name == b.name;
    case Op::Call:
        if (a.func != b.func) return false;
        break;
    default:
        break;
    }
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!equal_trees(*a.args[i], *b.args[i])) return false;
    return true;
}

void mark_used(const Expr::Node& n, std::vector<bool>& used) {
    if (n.op == Op::Variable) used[n.index] = true;
    for (const auto& c : n.args) mark_used(*c, used);
}

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse() {
        skip_space();
        if (pos_ >= src_.size()) fail({"expression"}, "empty expression");
        auto root = parse_sum();
        skip_space();
        if (pos_ < src_.size()) fail({"operator", "end of input"}, "unexpected character");
        return root;
    }

private:
    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) {
        fail_at(pos_, ParseError::Kind::Syntax, std::move(expected), what);
    }

    [[noreturn]] void fail_at(std::size_t at, ParseError::Kind kind, std::vector<std::string> expected,
                              const std::string& what) {
        std::string msg = what + " at position " + std::to_string(at);
        if (!expected.empty()) {
            msg += "; expected ";
            for (std::size_t i = 0; i < expected.size(); ++i) {
                if (i) msg += ", ";
                msg += expected[i];
            }
        }
        throw ParseError(kind, at, std::move(expected), msg);
    }

    NodePtr parse_sum() {
        auto lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = make_op(Op::Add, {lhs, parse_product()});
            else if (accept('-'))
                lhs = make_op(Op::Sub, {lhs, parse_product()});
            else
                return lhs;
        }
    }

    NodePtr parse_product() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_op(Op::Mul, {lhs, parse_unary()});
            else if (accept('/'))
                lhs = make_op(Op::Div, {lhs, parse_unary()});
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_op(Op::Neg, {parse_unary()});
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_primary();
        if (accept('^')) return make_op(Op::Pow, {base, parse_unary()});
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ >= src_.size()) fail({"number", "identifier", "(", "-"}, "unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_sum();
            if (!accept(')')) fail({")"}, "unbalanced parenthesis");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail({"number", "identifier", "(", "-"}, std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) fail_at(start, ParseError::Kind::Syntax, {"digit"}, "malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            // no implicit multiplication: "2e" is malformed, "2*e" is not
            if (digits() == 0) {
                pos_ = save;
                fail({"exponent digits"}, "malformed exponent");
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || ptr != src_.data() + pos_)
            fail_at(start, ParseError::Kind::Syntax, {"number"}, "number out of range");
        return make_leaf(Op::Number, v, 0, {});
    }

    NodePtr parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            auto it = std::find_if(kFunctions.begin(), kFunctions.end(),
                                   [&](const FuncInfo& f) { return f.name == name; });
            if (it == kFunctions.end())
                fail_at(start, ParseError::Kind::UnknownIdentifier, {}, "unknown function '" + name + "'");
            ++pos_;
            std::vector<NodePtr> args;
            if (!accept(')')) {
                args.push_back(parse_sum());
                while (accept(',')) args.push_back(parse_sum());
                if (!accept(')')) fail({",", ")"}, "unterminated argument list");
            }
            if (static_cast<int>(args.size()) != it->arity)
                fail_at(start, ParseError::Kind::Arity, {},
                        "function '" + name + "' takes " + std::to_string(it->arity) + " argument(s), got " +
                            std::to_string(args.size()));
            return make_op(Op::Call, std::move(args), it->func);
        }
        if (name == "pi") return make_leaf(Op::Constant, std::numbers::pi, 0, name);
        if (name == "e") return make_leaf(Op::Constant, std::numbers::e, 0, name);
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return make_leaf(Op::Variable, 0.0, i, name);
        if (std::any_of(kFunctions.begin(), kFunctions.end(), [&](const FuncInfo& f) { return f.name == name; }))
            fail_at(pos_, ParseError::Kind::Syntax, {"("}, "function '" + name + "' requires arguments");
        fail_at(start, ParseError::Kind::UnknownIdentifier, {}, "unknown identifier '" + name + "'");
    }
};

} // namespace

Expr parse(std::string_view source, std::vector<std::string> allowed_vars) {
    for (const auto& v : allowed_vars)
        if (v == "pi" || v == "e")
            throw InvalidArgument("variable name '" + v + "' collides with a named constant");
    Expr e;
    e.root_ = Parser(source, allowed_vars).parse();
    e.used_.assign(allowed_vars.size(), false);
    mark_used(*e.root_, e.used_);
    e.variables_ = std::move(allowed_vars);
    e.source_ = std::string(source);
    return e;
}

double Expr::eval(std::span<const double> values) const {
    if (!root_) throw InvalidArgument("evaluating an empty expression");
    if (values.size() < variables_.size())
        throw MissingBinding("expected " + std::to_string(variables_.size()) + " values, got " +
                             std::to_string(values.size()));
    return evaluate(*root_, values);
}

double Expr::eval(const Bindings& bindings) const {
    std::vector<double> values(variables_.size(), 0.0);
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        auto it = bindings.find(variables_[i]);
        if (it != bindings.end())
            values[i] = it->second;
        else if (used_[i])
            throw MissingBinding("no binding for variable '" + variables_[i] + "'");
    }
    return eval(values);
}

std::vector<std::string> Expr::free_variables() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (used_[i]) out.push_back(variables_[i]);
    return out;
}

bool Expr::uses(std::string_view variable) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (used_[i] && variables_[i] == variable) return true;
    return false;
}

std::string Expr::to_string() const {
    std::string s;
    if (root_) print(*root_, nullptr, s);
    return s;
}

std::string Expr::to_string(const std::map<std::string, std::string>& rename) const {
    std::string s;
    if (root_) print(*root_, &rename, s);
    return s;
}

bool Expr::same_tree(const Expr& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return equal_trees(*root_, *other.root_);
}

} // namespace displace
