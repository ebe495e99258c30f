#include "thermorel/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <functional>
#include <vector>

namespace thermorel {

namespace {

enum class Op { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

using UnaryFn = double (*)(double);

}  // namespace

struct Expression::Node {
    Op op;
    double number = 0.0;
    int var = 0;  // 0=x 1=y 2=z
    UnaryFn fn = nullptr;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

NodePtr make_number(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Number;
    n->number = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : src_(s) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& src_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("expression error at column " + std::to_string(pos_ + 1) +
                              ": " + what + " in \"" + src_ + "\"");
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(Op::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = make_node(Op::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(Op::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = make_node(Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(Op::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make_node(Op::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        if (accept('(')) {
            NodePtr e = parse_expr();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<size_t>(end - begin);
        return make_number(v);
    }

    NodePtr parse_ident() {
        const size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);

        if (name == "x" || name == "y" || name == "z") {
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Var;
            n->var = name == "x" ? 0 : (name == "y" ? 1 : 2);
            return n;
        }
        if (name == "pi") {
            return make_number(3.14159265358979323846);
        }

        static const struct {
            const char* name;
            UnaryFn fn;
        } kFunctions[] = {
            {"sin", [](double v) { return std::sin(v); }},
            {"cos", [](double v) { return std::cos(v); }},
            {"tan", [](double v) { return std::tan(v); }},
            {"exp", [](double v) { return std::exp(v); }},
            {"log", [](double v) { return std::log(v); }},
            {"sqrt", [](double v) { return std::sqrt(v); }},
            {"abs", [](double v) { return std::fabs(v); }},
        };
        for (const auto& f : kFunctions) {
            if (name == f.name) {
                if (!accept('(')) fail("expected '(' after function name '" + name + "'");
                NodePtr arg = parse_expr();
                if (!accept(')')) fail("missing ')' after function argument");
                auto n = std::make_shared<Expression::Node>();
                n->op = Op::Call;
                n->lhs = arg;
                n->fn = f.fn;
                return n;
            }
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

double eval_node(const Expression::Node& n, const Vec3& p) {
    switch (n.op) {
        case Op::Number: return n.number;
        case Op::Var: return p[n.var];
        case Op::Add: return eval_node(*n.lhs, p) + eval_node(*n.rhs, p);
        case Op::Sub: return eval_node(*n.lhs, p) - eval_node(*n.rhs, p);
        case Op::Mul: return eval_node(*n.lhs, p) * eval_node(*n.rhs, p);
        case Op::Div: return eval_node(*n.lhs, p) / eval_node(*n.rhs, p);
        case Op::Pow: return std::pow(eval_node(*n.lhs, p), eval_node(*n.rhs, p));
        case Op::Neg: return -eval_node(*n.lhs, p);
        case Op::Call: return n.fn(eval_node(*n.lhs, p));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& source) {
    Parser parser(source);
    Expression e;
    e.root_ = parser.run();
    e.source_ = source;
    return e;
}

double Expression::eval(const Vec3& p) const {
    if (!root_) throw ValidationError("evaluating empty expression");
    return eval_node(*root_, p);
}

}  // namespace thermorel
