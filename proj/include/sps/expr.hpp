#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sps {

// Thrown by parse_expr; `pos` is the byte offset into the source string.
struct ParseError : std::runtime_error {
    std::size_t pos;
    ParseError(const std::string& msg, std::size_t p) : std::runtime_error(msg), pos(p) {}
};

// Thrown by eval on unbound variables and domain violations (ln/sqrt of a
// negative number, division by zero, non-finite intermediate).
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class UnaryOp { Neg, Sin, Cos, Exp, Ln, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Constant, Variable, Unary, Binary } kind;
    double value = 0.0;   // Constant
    int slot = -1;        // Variable: index into the declared variable list
    std::string name;     // Variable
    UnaryOp uop{};
    BinaryOp bop{};
    NodePtr a, b;         // operands (b unused for Unary)
};

// Immutable expression over a fixed, ordered set of variables. Values are
// bound positionally at eval time, so evaluation is pure and reentrant.
class Expr {
public:
    Expr() = default;
    Expr(NodePtr root, std::vector<std::string> vars)
        : root_(std::move(root)), vars_(std::make_shared<std::vector<std::string>>(std::move(vars))) {}

    const NodePtr& root() const { return root_; }
    const std::vector<std::string>& vars() const { return *vars_; }
    bool valid() const { return root_ != nullptr; }

    double operator()(std::span<const double> values) const;
    double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }
    double operator()(double x, double y) const
    {
        const double v[2] = {x, y};
        return (*this)(std::span<const double>(v, 2));
    }

private:
    NodePtr root_;
    std::shared_ptr<const std::vector<std::string>> vars_ = std::make_shared<std::vector<std::string>>();
};

// Parses `src` over the declared variable set. Standard precedence
// (^  >  unary -  >  * /  >  + -), left-associative except ^.
// Exponents must reduce to numeric constants.
Expr parse_expr(std::string_view src, std::vector<std::string> variables);

double eval(const Expr& e, std::span<const double> values);

// Exact symbolic derivative with 0/1 folding.
Expr diff(const Expr& e, const std::string& var);

// Serialization; parse_expr(to_string(e), e.vars()) reproduces the tree.
std::string to_string(const Expr& e);

// Replaces every occurrence of `var` by `replacement`, re-binding the result
// over `new_vars` (all surviving variable names must appear there).
Expr substitute(const Expr& e, const std::string& var, const Expr& replacement,
                std::vector<std::string> new_vars);

bool same_tree(const Expr& lhs, const Expr& rhs);

} // namespace sps
