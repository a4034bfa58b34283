#include "sps/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

/*
Expr    ::= Term (("+" | "-") Term)*
Term    ::= Unary (("*" | "/") Unary)*
Unary   ::= "-" Unary | Power
Power   ::= Primary ("^" Exponent)?
Primary ::= Number | Ident | Ident "(" Expr ")" | "(" Expr ")"

Exponent is parsed at Unary level and must fold to a numeric constant.
*/

namespace sps {

namespace {

NodePtr make_const(double v)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Constant;
    n->value = v;
    return n;
}

NodePtr make_var(const std::string& name, int slot)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->name = name;
    n->slot = slot;
    return n;
}

NodePtr make_unary(UnaryOp op, NodePtr arg)
{
    // Fold negation of literals so that "-1" round-trips as a constant.
    if (op == UnaryOp::Neg && arg->kind == ExprNode::Kind::Constant)
        return make_const(-arg->value);
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->uop = op;
    n->a = std::move(arg);
    return n;
}

bool is_const(const NodePtr& n, double v)
{
    return n->kind == ExprNode::Kind::Constant && n->value == v;
}

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs)
{
    // 0/1 folding keeps derivative trees readable.
    switch (op) {
        case BinaryOp::Add:
            if (is_const(lhs, 0.0)) return rhs;
            if (is_const(rhs, 0.0)) return lhs;
            break;
        case BinaryOp::Sub:
            if (is_const(rhs, 0.0)) return lhs;
            if (is_const(lhs, 0.0)) return make_unary(UnaryOp::Neg, rhs);
            break;
        case BinaryOp::Mul:
            if (is_const(lhs, 0.0) || is_const(rhs, 0.0)) return make_const(0.0);
            if (is_const(lhs, 1.0)) return rhs;
            if (is_const(rhs, 1.0)) return lhs;
            break;
        case BinaryOp::Div:
            if (is_const(lhs, 0.0)) return make_const(0.0);
            if (is_const(rhs, 1.0)) return lhs;
            break;
        case BinaryOp::Pow:
            if (is_const(rhs, 1.0)) return lhs;
            if (is_const(rhs, 0.0)) return make_const(1.0);
            break;
    }
    if (lhs->kind == ExprNode::Kind::Constant && rhs->kind == ExprNode::Kind::Constant) {
        switch (op) {
            case BinaryOp::Add: return make_const(lhs->value + rhs->value);
            case BinaryOp::Sub: return make_const(lhs->value - rhs->value);
            case BinaryOp::Mul: return make_const(lhs->value * rhs->value);
            case BinaryOp::Div: break; // keep, may be division by zero
            case BinaryOp::Pow: break;
        }
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->bop = op;
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return n;
}

struct FunctionName {
    const char* name;
    UnaryOp op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos},   {"exp", UnaryOp::Exp},
    {"ln", UnaryOp::Ln},   {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs},
};

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr run()
    {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek()
    {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr parse_sum()
    {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(BinaryOp::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = make_binary(BinaryOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term()
    {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(BinaryOp::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = make_binary(BinaryOp::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary()
    {
        if (accept('-')) return make_unary(UnaryOp::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power()
    {
        NodePtr base = parse_primary();
        skip_ws();
        if (accept('^')) {
            std::size_t at = pos_;
            NodePtr exponent = parse_unary(); // allows "y^-2"
            if (exponent->kind != ExprNode::Kind::Constant)
                throw ParseError("exponent must be a numeric constant", at);
            return make_binary(BinaryOp::Pow, base, exponent);
        }
        return base;
    }

    NodePtr parse_primary()
    {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number()
    {
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        // src_ views a NUL-terminated buffer (see parse_expr).
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("invalid number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return make_const(v);
    }

    NodePtr parse_ident()
    {
        std::size_t at = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(at, pos_ - at));
        for (const auto& fn : kFunctions) {
            if (name == fn.name) {
                if (!accept('(')) throw ParseError("expected '(' after function name", pos_);
                NodePtr arg = parse_sum();
                if (!accept(')')) throw ParseError("expected ')'", pos_);
                return make_unary(fn.op, arg);
            }
        }
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) throw ParseError("unknown identifier '" + name + "'", at);
        return make_var(name, static_cast<int>(it - vars_.begin()));
    }
};

double eval_node(const ExprNode& n, std::span<const double> values)
{
    switch (n.kind) {
        case ExprNode::Kind::Constant:
            return n.value;
        case ExprNode::Kind::Variable:
            if (n.slot < 0 || static_cast<std::size_t>(n.slot) >= values.size())
                throw EvalError("unbound variable '" + n.name + "'");
            return values[static_cast<std::size_t>(n.slot)];
        case ExprNode::Kind::Unary: {
            double a = eval_node(*n.a, values);
            switch (n.uop) {
                case UnaryOp::Neg: return -a;
                case UnaryOp::Sin: return std::sin(a);
                case UnaryOp::Cos: return std::cos(a);
                case UnaryOp::Exp: {
                    double r = std::exp(a);
                    if (!std::isfinite(r)) throw EvalError("exp overflow");
                    return r;
                }
                case UnaryOp::Ln:
                    if (!(a > 0.0)) throw EvalError("ln of non-positive value");
                    return std::log(a);
                case UnaryOp::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of negative value");
                    return std::sqrt(a);
                case UnaryOp::Abs: return std::fabs(a);
            }
            break;
        }
        case ExprNode::Kind::Binary: {
            double a = eval_node(*n.a, values);
            double b = eval_node(*n.b, values);
            switch (n.bop) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw EvalError("division by zero");
                    return a / b;
                case BinaryOp::Pow: {
                    double r = std::pow(a, b);
                    if (!std::isfinite(r)) throw EvalError("pow produced a non-finite value");
                    return r;
                }
            }
            break;
        }
    }
    throw EvalError("malformed expression node");
}

NodePtr diff_node(const NodePtr& n, const std::string& var)
{
    switch (n->kind) {
        case ExprNode::Kind::Constant:
            return make_const(0.0);
        case ExprNode::Kind::Variable:
            return make_const(n->name == var ? 1.0 : 0.0);
        case ExprNode::Kind::Unary: {
            NodePtr da = diff_node(n->a, var);
            switch (n->uop) {
                case UnaryOp::Neg:
                    return make_unary(UnaryOp::Neg, da);
                case UnaryOp::Sin:
                    return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Cos, n->a), da);
                case UnaryOp::Cos:
                    return make_binary(BinaryOp::Mul,
                                       make_unary(UnaryOp::Neg, make_unary(UnaryOp::Sin, n->a)), da);
                case UnaryOp::Exp:
                    return make_binary(BinaryOp::Mul, make_unary(UnaryOp::Exp, n->a), da);
                case UnaryOp::Ln:
                    return make_binary(BinaryOp::Div, da, n->a);
                case UnaryOp::Sqrt:
                    return make_binary(BinaryOp::Div, da,
                                       make_binary(BinaryOp::Mul, make_const(2.0),
                                                   make_unary(UnaryOp::Sqrt, n->a)));
                case UnaryOp::Abs:
                    // d|u| = u/|u| * u'; undefined at u = 0 (eval reports it).
                    return make_binary(
                        BinaryOp::Mul,
                        make_binary(BinaryOp::Div, n->a, make_unary(UnaryOp::Abs, n->a)), da);
            }
            break;
        }
        case ExprNode::Kind::Binary: {
            switch (n->bop) {
                case BinaryOp::Add:
                    return make_binary(BinaryOp::Add, diff_node(n->a, var), diff_node(n->b, var));
                case BinaryOp::Sub:
                    return make_binary(BinaryOp::Sub, diff_node(n->a, var), diff_node(n->b, var));
                case BinaryOp::Mul:
                    return make_binary(
                        BinaryOp::Add, make_binary(BinaryOp::Mul, diff_node(n->a, var), n->b),
                        make_binary(BinaryOp::Mul, n->a, diff_node(n->b, var)));
                case BinaryOp::Div:
                    return make_binary(
                        BinaryOp::Div,
                        make_binary(BinaryOp::Sub,
                                    make_binary(BinaryOp::Mul, diff_node(n->a, var), n->b),
                                    make_binary(BinaryOp::Mul, n->a, diff_node(n->b, var))),
                        make_binary(BinaryOp::Pow, n->b, make_const(2.0)));
                case BinaryOp::Pow: {
                    // Exponent is a constant by construction.
                    double c = n->b->value;
                    return make_binary(
                        BinaryOp::Mul,
                        make_binary(BinaryOp::Mul, make_const(c),
                                    make_binary(BinaryOp::Pow, n->a, make_const(c - 1.0))),
                        diff_node(n->a, var));
                }
            }
            break;
        }
    }
    throw EvalError("malformed expression node");
}

// Printer precedence levels; a child is parenthesized when it binds looser
// than its context requires.
int level_of(const ExprNode& n)
{
    switch (n.kind) {
        case ExprNode::Kind::Constant: return n.value < 0.0 ? 3 : 5;
        case ExprNode::Kind::Variable: return 5;
        case ExprNode::Kind::Unary: return n.uop == UnaryOp::Neg ? 3 : 5;
        case ExprNode::Kind::Binary:
            switch (n.bop) {
                case BinaryOp::Add:
                case BinaryOp::Sub: return 1;
                case BinaryOp::Mul:
                case BinaryOp::Div: return 2;
                case BinaryOp::Pow: return 4;
            }
    }
    return 5;
}

void print_node(const ExprNode& n, std::string& out, int min_level);

void print_child(const ExprNode& n, std::string& out, int min_level)
{
    if (level_of(n) < min_level) {
        out += '(';
        print_node(n, out, 0);
        out += ')';
    } else {
        print_node(n, out, 0);
    }
}

void print_node(const ExprNode& n, std::string& out, int)
{
    switch (n.kind) {
        case ExprNode::Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case ExprNode::Kind::Variable:
            out += n.name;
            return;
        case ExprNode::Kind::Unary: {
            if (n.uop == UnaryOp::Neg) {
                out += '-';
                print_child(*n.a, out, 3);
                return;
            }
            switch (n.uop) {
                case UnaryOp::Sin: out += "sin"; break;
                case UnaryOp::Cos: out += "cos"; break;
                case UnaryOp::Exp: out += "exp"; break;
                case UnaryOp::Ln: out += "ln"; break;
                case UnaryOp::Sqrt: out += "sqrt"; break;
                case UnaryOp::Abs: out += "abs"; break;
                case UnaryOp::Neg: break;
            }
            out += '(';
            print_node(*n.a, out, 0);
            out += ')';
            return;
        }
        case ExprNode::Kind::Binary: {
            int lvl = level_of(n);
            const char* op = nullptr;
            switch (n.bop) {
                case BinaryOp::Add: op = " + "; break;
                case BinaryOp::Sub: op = " - "; break;
                case BinaryOp::Mul: op = "*"; break;
                case BinaryOp::Div: op = "/"; break;
                case BinaryOp::Pow: op = "^"; break;
            }
            if (n.bop == BinaryOp::Pow) {
                print_child(*n.a, out, 5);
                out += op;
                print_child(*n.b, out, 5);
            } else {
                print_child(*n.a, out, lvl);
                out += op;
                print_child(*n.b, out, lvl + 1);
            }
            return;
        }
    }
}

NodePtr substitute_node(const NodePtr& n, const std::string& var, const NodePtr& repl,
                        const std::vector<std::string>& new_vars)
{
    switch (n->kind) {
        case ExprNode::Kind::Constant:
            return n;
        case ExprNode::Kind::Variable: {
            if (n->name == var) return repl;
            auto it = std::find(new_vars.begin(), new_vars.end(), n->name);
            if (it == new_vars.end())
                throw EvalError("variable '" + n->name + "' missing from substitution binding set");
            return make_var(n->name, static_cast<int>(it - new_vars.begin()));
        }
        case ExprNode::Kind::Unary:
            return make_unary(n->uop, substitute_node(n->a, var, repl, new_vars));
        case ExprNode::Kind::Binary:
            return make_binary(n->bop, substitute_node(n->a, var, repl, new_vars),
                               substitute_node(n->b, var, repl, new_vars));
    }
    throw EvalError("malformed expression node");
}

NodePtr reslot_node(const NodePtr& n, const std::vector<std::string>& new_vars)
{
    switch (n->kind) {
        case ExprNode::Kind::Constant:
            return n;
        case ExprNode::Kind::Variable: {
            auto it = std::find(new_vars.begin(), new_vars.end(), n->name);
            if (it == new_vars.end())
                throw EvalError("variable '" + n->name + "' missing from substitution binding set");
            return make_var(n->name, static_cast<int>(it - new_vars.begin()));
        }
        case ExprNode::Kind::Unary:
            return make_unary(n->uop, reslot_node(n->a, new_vars));
        case ExprNode::Kind::Binary:
            return make_binary(n->bop, reslot_node(n->a, new_vars), reslot_node(n->b, new_vars));
    }
    throw EvalError("malformed expression node");
}

bool same_node(const ExprNode& x, const ExprNode& y)
{
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case ExprNode::Kind::Constant: return x.value == y.value;
        case ExprNode::Kind::Variable: return x.name == y.name;
        case ExprNode::Kind::Unary: return x.uop == y.uop && same_node(*x.a, *y.a);
        case ExprNode::Kind::Binary:
            return x.bop == y.bop && same_node(*x.a, *y.a) && same_node(*x.b, *y.b);
    }
    return false;
}

} // namespace

double Expr::operator()(std::span<const double> values) const
{
    if (!root_) throw EvalError("empty expression");
    if (values.size() != vars_->size()) throw EvalError("binding count mismatch");
    return eval_node(*root_, values);
}

Expr parse_expr(std::string_view src, std::vector<std::string> variables)
{
    std::string buf(src); // guarantee NUL termination for strtod
    Parser parser(buf, variables);
    NodePtr root = parser.run();
    return Expr(std::move(root), std::move(variables));
}

double eval(const Expr& e, std::span<const double> values) { return e(values); }

Expr diff(const Expr& e, const std::string& var)
{
    if (!e.valid()) throw EvalError("empty expression");
    return Expr(diff_node(e.root(), var), e.vars());
}

std::string to_string(const Expr& e)
{
    if (!e.valid()) return {};
    std::string out;
    print_node(*e.root(), out, 0);
    return out;
}

Expr substitute(const Expr& e, const std::string& var, const Expr& replacement,
                std::vector<std::string> new_vars)
{
    if (!e.valid() || !replacement.valid()) throw EvalError("empty expression");
    NodePtr repl = reslot_node(replacement.root(), new_vars);
    NodePtr root = substitute_node(e.root(), var, repl, new_vars);
    return Expr(std::move(root), std::move(new_vars));
}

bool same_tree(const Expr& lhs, const Expr& rhs)
{
    if (!lhs.valid() || !rhs.valid()) return lhs.valid() == rhs.valid();
    return same_node(*lhs.root(), *rhs.root());
}

} // namespace sps
