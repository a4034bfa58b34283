#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sps {

// Thrown when an iteration or quadrature fails to converge.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mantissa of sinh/cosh under the factoring sinh(x) = m * e^x (x >= 0).
// Both mantissas live in (0, 1], so products of layer-function terms never
// overflow; the common exponential factors are recombined algebraically by
// the caller.
inline double sinh_mant(double x) { return -0.5 * std::expm1(-2.0 * x); }
inline double cosh_mant(double x) { return 0.5 * (1.0 + std::exp(-2.0 * x)); }

struct RootResult {
    double x = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Plain Newton iteration; stops when |f| <= tol * (1 + |x|). Reports
// non-convergence instead of throwing so callers can phrase the error.
RootResult newton_root(const std::function<double(double)>& f,
                       const std::function<double(double)>& df, double x0, double tol,
                       int max_iter = 50);

// Bisection on a bracketed sign change, followed by a Newton polish when a
// derivative is supplied. Requires f(lo) and f(hi) of opposite sign.
RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          double tol, const std::function<double(double)>* df = nullptr,
                          int max_iter = 200);

// Adaptive Gauss-Kronrod integration; throws NumericError when the error
// estimate exceeds the requested relative tolerance by a wide margin.
double integrate_gk(const std::function<double(double)>& f, double a, double b, double rel_tol);

// Classical fixed-step RK4 for  y' = w,  w' = accel(t, y).
struct Trajectory {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> w;
};

Trajectory integrate_rk4(const std::function<double(double, double)>& accel, double t0, double t1,
                         double y0, double w0, int steps);

// First sign change of w along a trajectory, refined by a secant step.
std::optional<double> first_turning(const Trajectory& traj);

} // namespace sps
