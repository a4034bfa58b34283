#pragma once

#include "sps/expr.hpp"
#include "sps/problem.hpp"

#include <array>
#include <optional>
#include <utility>

namespace sps {

// Feasibility analysis for the quadratic nonlinearity
//   eps*y'' + k*y = y^2 + u(t),
// whose reduced solution is eta = (k + iota)/2 with iota = sqrt(k^2 - 4u).
struct QuadraticInstance {
    double k = -1.0;
    Expr u;  // in (t)
    double a = 0.0, gamma = 0.5, b = 1.0;
};

QuadraticInstance make_quadratic(double k, Expr u, double a, double gamma, double b);

// Accepts a Problem whose f is literally y^2 + u (either operand order).
QuadraticInstance make_quadratic(const Problem& p);

double iota(const QuadraticInstance& inst, double t);

// Reduced solution branch eta(t) = (k + iota(t))/2.
double quadratic_eta(const QuadraticInstance& inst, double t);

// The five conditions equivalent to A1/A2 for the quadratic case. All are
// strict inequalities; margins report (rhs - lhs), negative on failure.
struct ConditionsReport {
    std::array<bool, 5> pass{};
    std::array<double, 5> margin{};
    bool all_pass = false;
};

ConditionsReport check_conditions(const QuadraticInstance& inst, double lambda);

// Largest interval of lambda in (0, -k) on which all five conditions hold,
// located by a dense scan with bisection-refined endpoints (1e-6 resolution).
std::optional<std::pair<double, double>> lambda_interval(const QuadraticInstance& inst);

} // namespace sps
