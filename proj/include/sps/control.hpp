#pragma once

#include "sps/expr.hpp"
#include "sps/problem.hpp"

#include <functional>
#include <optional>

#include <nlohmann/json_fwd.hpp>

namespace sps {

// Semilinear plant  eps*w' = -k*y + f(y) + u,  v = g(y)  with |f'| <= lambda < -k.
struct SemilinearPlant {
    double k = -1.0;
    Expr f;                      // in (y)
    Expr g;                      // in (y), strictly monotone
    std::optional<Expr> g_inv;   // in (v)
    double lambda = 0.5;
    double a = 0.0, gamma = 0.5, b = 1.0;
    double delta = 0.05;

    double m() const { return -k - lambda; }
};

// Validates monotonicity of g and the |f'| <= lambda bound by sampling
// (y in [-50, 50]; non-exhaustive).
SemilinearPlant load_plant(const nlohmann::json& doc);
SemilinearPlant load_plant_file(const std::string& path);

// Inverse output map: symbolic when g_inv is given or g is the identity,
// otherwise a bracketed bisection/Newton solve of g(y) = v.
double g_inverse(const SemilinearPlant& plant, double v, double bracket_lo = -1e3,
                 double bracket_hi = 1e3);

// Open-loop input for a desired output v0:
//   eta0 = g^{-1}(v0),   u0 = k*eta0 - f(eta0).
struct InputSynthesis {
    std::function<double(double)> u0;
    std::function<double(double)> eta0;
    std::function<double(double)> eta0_dd;
    std::optional<Expr> u0_expr;    // present on the symbolic path
    std::optional<Expr> eta0_expr;
    double max_abs_eta0_dd = 0.0;   // grid max over [a, b]
};

InputSynthesis synthesize_input(const SemilinearPlant& plant, const Expr& v0);

struct OutputBound {
    double mu = 0.0;              // max |g'| over the tube around eta0
    double m = 0.0;
    double max_abs_eta0_dd = 0.0;
    double bound = 0.0;           // mu * (eps/m) * max|eta0''|
};

OutputBound output_error_bound(const SemilinearPlant& plant, const InputSynthesis& synth,
                               double epsilon);

} // namespace sps
