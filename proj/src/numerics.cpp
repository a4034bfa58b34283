#include "sps/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <limits>

namespace sps {

RootResult newton_root(const std::function<double(double)>& f,
                       const std::function<double(double)>& df, double x0, double tol,
                       int max_iter)
{
    double x = x0;
    double last_step = std::numeric_limits<double>::infinity();
    for (int i = 0; i < max_iter; ++i) {
        double fx = f(x);
        if (!std::isfinite(fx) || std::fabs(x) > 1e12) return {x, i, false};
        // A small residual alone is not enough: an equation with an
        // asymptotic zero (e.g. e^y as y -> -inf) drives |f| below any
        // tolerance while the iterates run away with non-shrinking steps.
        if (std::fabs(fx) <= tol * (1.0 + std::fabs(x)) &&
            (i == 0 || last_step <= 1e-6 * (1.0 + std::fabs(x))))
            return {x, i, true};
        double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) return {x, i, false};
        double step = fx / d;
        x -= step;
        last_step = std::fabs(step);
    }
    return {x, max_iter, false};
}

RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                          const std::function<double(double)>* df, int max_iter)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0, true};
    if (fhi == 0.0) return {hi, 0, true};
    if ((flo < 0.0) == (fhi < 0.0))
        throw NumericError("bracketed_root: endpoints do not bracket a sign change");
    int it = 0;
    while (hi - lo > tol * (1.0 + std::fabs(lo)) && it < max_iter) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        ++it;
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    if (df) {
        auto polish = newton_root(f, *df, x, tol, 8);
        if (polish.converged && polish.x >= lo - (hi - lo) && polish.x <= hi + (hi - lo))
            x = polish.x;
    }
    return {x, it, true};
}

double integrate_gk(const std::function<double(double)>& f, double a, double b, double rel_tol)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double error = 0.0;
    double l1 = 0.0;
    double value = GK::integrate(f, a, b, 15, rel_tol, &error, &l1);
    if (!std::isfinite(value))
        throw NumericError("quadrature produced a non-finite value");
    // The reported error estimate is noisy on short intervals (absolute
    // spikes near 1e-10 even for exactly integrated constants); only flag
    // errors above both the relative target and that floor.
    double scale = std::max(std::fabs(value), l1);
    if (error > 1e4 * rel_tol * scale && error > 1e-9 * (1.0 + scale))
        throw NumericError("quadrature failed to reach the requested tolerance");
    return value;
}

Trajectory integrate_rk4(const std::function<double(double, double)>& accel, double t0, double t1,
                         double y0, double w0, int steps)
{
    Trajectory traj;
    traj.t.reserve(static_cast<std::size_t>(steps) + 1);
    traj.y.reserve(static_cast<std::size_t>(steps) + 1);
    traj.w.reserve(static_cast<std::size_t>(steps) + 1);
    double h = (t1 - t0) / steps;
    double t = t0, y = y0, w = w0;
    traj.t.push_back(t);
    traj.y.push_back(y);
    traj.w.push_back(w);
    for (int i = 0; i < steps; ++i) {
        double k1y = w, k1w = accel(t, y);
        double k2y = w + 0.5 * h * k1w, k2w = accel(t + 0.5 * h, y + 0.5 * h * k1y);
        double k3y = w + 0.5 * h * k2w, k3w = accel(t + 0.5 * h, y + 0.5 * h * k2y);
        double k4y = w + h * k3w, k4w = accel(t + h, y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        t = t0 + (i + 1) * h;
        if (!std::isfinite(y) || !std::isfinite(w)) {
            // Trajectory escaped (finite-time blowup); truncate here.
            break;
        }
        traj.t.push_back(t);
        traj.y.push_back(y);
        traj.w.push_back(w);
    }
    return traj;
}

std::optional<double> first_turning(const Trajectory& traj)
{
    for (std::size_t i = 1; i < traj.w.size(); ++i) {
        if (traj.w[i - 1] > 0.0 && traj.w[i] <= 0.0) {
            double w0 = traj.w[i - 1], w1 = traj.w[i];
            if (w1 == w0) return traj.t[i];
            // Secant zero of w; w''(t*) = 0 for these systems, so the linear
            // model is third-order accurate in the step.
            return traj.t[i - 1] + (traj.t[i] - traj.t[i - 1]) * (w0 / (w0 - w1));
        }
    }
    return std::nullopt;
}

} // namespace sps
