#pragma once

#include "sps/expr.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sps {

// Invalid input: bad ordering, sign constraints, missing keys.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// One instance of  eps*y'' + k*y = f(u(t), y)  with  y(a) = y(gamma) = y(b).
// The reduced solution eta solves  k*eta = f(u(t), eta); it is either supplied
// as an expression or resolved by Newton continuation from eta_seed.
struct Problem {
    double k = -1.0;
    double a = 0.0, gamma = 0.5, b = 1.0;
    Expr f;                        // in (u, y)
    Expr u;                        // in (t)
    Expr g;                        // in (y), monotone output map
    std::optional<Expr> eta;       // in (t)
    std::optional<double> eta_seed;
    double lambda = 0.5;           // Lipschitz bound for |df/dy| on the tube
    double delta = 0.05;           // tube width parameter
    double epsilon = 1e-2;

    double m() const { return -k - lambda; }
};

Problem load_problem(const nlohmann::json& doc);
Problem load_problem_file(const std::string& path);

// Reduced solution at a single point; Newton-resolved roots are continued
// from eta_seed along [a, t] so multi-root problems stay on one branch.
double resolve_eta(const Problem& p, double t);

struct ReducedPath {
    std::function<double(double)> eta;
    std::function<double(double)> eta_d;
    std::function<double(double)> eta_dd;
    double max_abs_eta_dd = 0.0;
};

// Resolves eta and its derivatives on [a, b]. Derivatives come from symbolic
// differentiation when eta is an expression, otherwise from implicit
// differentiation of the reduced equation (central differences as fallback).
// Validates the reduced residual on a 2001-point grid.
ReducedPath build_reduced_path(const Problem& p);

struct FeasibilityTube {
    double delta = 0.0;
    std::function<double(double)> d;   // half-width, positive and continuous
    std::vector<double> grid_t;
    std::vector<double> eta_values;
};

FeasibilityTube feasibility_tube(const Problem& p, const ReducedPath& path);

struct A2Report {
    double lambda = 0.0;
    double max_abs_df_dy = 0.0;
    double argmax_t = 0.0;
    double argmax_y = 0.0;
    bool pass = false;
};

// Samples |df/dy| over the tube (2001 x 201 grid). Failure is an outcome,
// not an exception.
A2Report verify_A2(const Problem& p, const ReducedPath& path);

} // namespace sps
