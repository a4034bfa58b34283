#pragma once

// Test-only oracles, kept independent of the library's evaluation paths.
// The layer oracles follow the raw exponential displays in long double and
// are valid wherever s*(b-a) stays below the long-double overflow threshold.

#include <cmath>
#include <functional>

namespace oracle {

struct LayerParams {
    long double a, gamma, b, m, eps, A, B, lambda;
};

inline long double s_of(const LayerParams& p) { return std::sqrt(p.m / p.eps); }

inline long double naive_D(const LayerParams& p)
{
    long double s = s_of(p);
    return (std::exp(s * (p.b - p.a)) + std::exp(s * (p.gamma - p.b)) +
            std::exp(s * (p.a - p.gamma))) -
           (std::exp(s * (p.a - p.b)) + std::exp(s * (p.b - p.gamma)) +
            std::exp(s * (p.gamma - p.a)));
}

inline long double naive_zeta(const LayerParams& p, long double t)
{
    long double s = s_of(p);
    return p.A / naive_D(p) *
           (std::exp(s * (p.b - t)) - std::exp(s * (t - p.b)) + std::exp(s * (t - p.gamma)) -
            std::exp(s * (p.gamma - t)));
}

inline long double naive_zeta_hat(const LayerParams& p, long double t)
{
    long double s = s_of(p);
    return p.B / naive_D(p) *
           (std::exp(s * (t - p.a)) - std::exp(s * (p.a - t)) + std::exp(s * (p.gamma - t)) -
            std::exp(s * (t - p.gamma)));
}

inline long double naive_zeta_d(const LayerParams& p, long double t)
{
    long double s = s_of(p);
    return p.A / naive_D(p) * s *
           (-std::exp(s * (p.b - t)) - std::exp(s * (t - p.b)) + std::exp(s * (t - p.gamma)) +
            std::exp(s * (p.gamma - t)));
}

inline long double naive_zeta_hat_d(const LayerParams& p, long double t)
{
    long double s = s_of(p);
    return p.B / naive_D(p) * s *
           (std::exp(s * (t - p.a)) + std::exp(s * (p.a - t)) - std::exp(s * (p.gamma - t)) -
            std::exp(s * (t - p.gamma)));
}

inline long double naive_psi(const LayerParams& p, long double t)
{
    long double s = s_of(p);
    return p.lambda * std::fabs(p.A) / (naive_D(p) * std::sqrt(p.m * p.eps)) * t *
           (std::exp(s * (p.b - t)) + std::exp(s * (t - p.b)) - std::exp(s * (p.gamma - t)) -
            std::exp(s * (t - p.gamma)));
}

inline long double naive_v(const LayerParams& p, long double t)
{
    long double psi_a = naive_psi(p, p.a);
    long double psi_g = naive_psi(p, p.gamma);
    long double psi_b = naive_psi(p, p.b);
    long double v = naive_psi(p, t);
    if (p.A != 0.0L) v += -(psi_a - psi_g) / p.A * naive_zeta(p, t);
    if (p.B != 0.0L) v += (psi_g - psi_b) / p.B * naive_zeta_hat(p, t);
    return v;
}

// Five-point central first derivative.
inline double fd_derivative(const std::function<double(double)>& f, double x, double h)
{
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// Five-point central second derivative.
inline double fd_second(const std::function<double(double)>& f, double x, double h)
{
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) /
           (12 * h * h);
}

// Plain bisection root on a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200)
{
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace oracle
