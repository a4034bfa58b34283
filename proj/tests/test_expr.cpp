#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sps/expr.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace sps;

TEST_CASE("parse builds the expected trees")
{
    Expr e = parse_expr("y^2 + u", {"u", "y"});
    CHECK(e.root()->kind == ExprNode::Kind::Binary);
    CHECK(e.root()->bop == BinaryOp::Add);
    CHECK(e.root()->a->bop == BinaryOp::Pow);
    CHECK(e.root()->a->a->name == "y");
    CHECK(e.root()->a->b->value == 2.0);
    CHECK(e.root()->b->name == "u");

    Expr f = parse_expr("-1 + sqrt(1 - t)", {"t"});
    CHECK(f(0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("parse reports positions for syntax errors")
{
    CHECK_THROWS_AS(parse_expr("y + ", {"y"}), ParseError);
    try {
        parse_expr("y + ", {"y"});
    } catch (const ParseError& e) {
        CHECK(e.pos == 4);
    }
    CHECK_THROWS_AS(parse_expr("", {"y"}), ParseError);
    CHECK_THROWS_AS(parse_expr("x + q", {"x"}), ParseError);
    CHECK_THROWS_AS(parse_expr("y^u", {"u", "y"}), ParseError);  // non-constant exponent
    CHECK_THROWS_AS(parse_expr("2 t", {"t"}), ParseError);       // no implicit multiplication
}

TEST_CASE("eval matches hand values and reports domain errors")
{
    Expr e = parse_expr("y^2 + u", {"y", "u"});
    CHECK(e(2.0, 3.0) == 7.0);

    Expr f = parse_expr("-1 + sqrt(1 - t)", {"t"});
    CHECK(f(0.75) == doctest::Approx(-0.5).epsilon(1e-15));

    Expr g = parse_expr("ln(t)", {"t"});
    CHECK_THROWS_AS(g(-1.0), EvalError);
    CHECK_THROWS_AS(parse_expr("1/t", {"t"})(0.0), EvalError);
    CHECK_THROWS_AS(parse_expr("sqrt(t)", {"t"})(-2.0), EvalError);
}

TEST_CASE("eval is pure: identical bindings give bit-identical results")
{
    Expr e = parse_expr("sin(t)*exp(t/3) - t^2", {"t"});
    double first = e(0.7381);
    for (int i = 0; i < 10; ++i) CHECK(e(0.7381) == first);
}

TEST_CASE("diff produces the expected closed forms")
{
    Expr e = parse_expr("y^2 + u", {"u", "y"});
    Expr de = diff(e, "y");
    CHECK(to_string(de) == "2*y");
    CHECK(same_tree(de, parse_expr("2*y", {"u", "y"})));

    Expr f = parse_expr("sqrt(1 - t)", {"t"});
    Expr df = diff(f, "t");
    CHECK(same_tree(df, parse_expr("-1/(2*sqrt(1 - t))", {"t"})));

    Expr g = parse_expr("exp(y)", {"y"});
    CHECK(same_tree(diff(g, "y"), g));
}

TEST_CASE("substitute composes expressions")
{
    Expr f = parse_expr("0.5*sin(y) + y^2", {"y"});
    Expr repl = parse_expr("t^2", {"t"});
    Expr composed = substitute(f, "y", repl, {"t"});
    double t = 0.37;
    CHECK(composed(t) == doctest::Approx(0.5 * std::sin(t * t) + std::pow(t, 4)).epsilon(1e-15));
}

namespace {

// Random expression generator over the variable "x"; constant exponents only.
struct Generator {
    std::mt19937 rng;
    explicit Generator(unsigned seed) : rng(seed) {}

    double constant()
    {
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        return dist(rng);
    }

    std::string make(int depth)
    {
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
        char buf[64];
        switch (pick(rng)) {
            case 0:
                std::snprintf(buf, sizeof buf, "%.17g", constant());
                return buf;
            case 1: return "x";
            case 2: return "(" + make(depth - 1) + " + " + make(depth - 1) + ")";
            case 3: return "(" + make(depth - 1) + " - " + make(depth - 1) + ")";
            case 4: return "(" + make(depth - 1) + ")*(" + make(depth - 1) + ")";
            case 5: return "(" + make(depth - 1) + ")/(2 + abs(" + make(depth - 1) + "))";
            case 6: return "sin(" + make(depth - 1) + ")";
            case 7: return "cos(" + make(depth - 1) + ")";
            case 8: return "exp((" + make(depth - 1) + ")/4)";
            default: {
                std::uniform_int_distribution<int> p(2, 3);
                return "(" + make(depth - 1) + ")^" + std::to_string(p(rng));
            }
        }
    }
};

} // namespace

TEST_CASE("property: symbolic derivative agrees with central differences")
{
    Generator gen(20240521);
    std::uniform_real_distribution<double> xs(-1.5, 1.5);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Expr e = parse_expr(gen.make(3), {"x"});
        Expr de = diff(e, "x");
        double x = xs(gen.rng);
        double h = 1e-3 * (1.0 + std::fabs(x));
        double fd1, fd2, exact;
        try {
            auto f = [&](double z) { return e(z); };
            fd1 = oracle::fd_derivative(f, x, h);
            fd2 = oracle::fd_derivative(f, x, 0.5 * h);
            exact = de(x);
        } catch (const EvalError&) {
            continue;  // domain edge; resample
        }
        if (!std::isfinite(fd1) || !std::isfinite(fd2) || !std::isfinite(exact)) continue;
        // Self-validating oracle: skip non-smooth sample points (abs kinks).
        if (std::fabs(fd1 - fd2) > 1e-9 * (1.0 + std::fabs(fd1))) continue;
        ++checked;
        CHECK(std::fabs(exact - fd2) <= 1e-6 * (1.0 + std::fabs(exact)));
    }
    CHECK(checked > 700);
}

TEST_CASE("property: parse-serialize-parse is the identity on the tree")
{
    Generator gen(987654321);
    for (int trial = 0; trial < 1000; ++trial) {
        Expr e = parse_expr(gen.make(3), {"x"});
        std::string text = to_string(e);
        Expr reparsed = parse_expr(text, {"x"});
        CHECK(same_tree(e, reparsed));
        CHECK(to_string(reparsed) == text);
    }
}
