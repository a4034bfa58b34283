#include "sps/autonomous.hpp"

#include "sps/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sps {

namespace {

double ln_cosh(double x)
{
    double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

int rk4_steps(const AutonomousProblem& ap, double t_end)
{
    double h = std::min(std::sqrt(ap.epsilon), ap.gamma) / 200.0;
    return std::max(16, static_cast<int>(std::ceil(t_end / h)));
}

// Generic slope shoot: bisect phi(y1) = y(gamma; y1) - y0 over a doubling
// bracket. phi < 0 for small slopes (the turn happens too early) and
// phi > 0 once t* exceeds gamma/2.
double shoot_slope(const std::function<double(double)>& phi, int* iterations)
{
    double lo = 1e-8, flo = phi(lo);
    if (flo > 0.0) throw NumericError("no bracketing slope found (phi > 0 at tiny slope)");
    double hi = lo;
    bool bracketed = false;
    for (int i = 0; i < 60; ++i) {
        hi *= 2.0;
        double fhi = phi(hi);
        if (fhi > 0.0) {
            bracketed = true;
            break;
        }
        lo = hi;
        flo = fhi;
    }
    if (!bracketed) throw NumericError("no bracketing slope found");
    auto res = bracketed_root(phi, lo, hi, 1e-13);
    if (iterations) *iterations = res.iterations;
    return res.x;
}

} // namespace

AutonomousProblem make_autonomous(Expr f_tilde, double y0, double y1, double gamma, double b,
                                  double epsilon)
{
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(gamma > 0.0 && gamma < b)) throw ValidationError("require 0 < gamma < b");
    AutonomousProblem ap;
    ap.exp_form = same_tree(f_tilde, parse_expr("exp(y)", {"y"}));
    ap.f_tilde = std::move(f_tilde);
    ap.y0 = y0;
    ap.y1 = y1;
    ap.gamma = gamma;
    ap.b = b;
    ap.epsilon = epsilon;
    for (int i = 0; i <= 200; ++i) {
        double y = y0 - 5.0 + 10.0 * i / 200;
        if (!(ap.f_tilde(y) > 0.0))
            throw ValidationError("f~ must be positive (sampled around y0)");
    }
    return ap;
}

EnergyFunctional make_energy(const AutonomousProblem& ap)
{
    EnergyFunctional energy;
    energy.exp_form = ap.exp_form;
    if (ap.exp_form) {
        energy.F = [](double y) { return std::exp(y); };
        energy.F_inv = [](double w) {
            if (!(w > 0.0)) throw NumericError("F_inv argument out of range");
            return std::log(w);
        };
        energy.c1 = ap.epsilon * ap.y1 * ap.y1 + std::exp(ap.y0);
        return energy;
    }
    Expr f = ap.f_tilde;
    double y0 = ap.y0;
    auto F = [f, y0](double y) {
        if (y == y0) return 0.0;
        return integrate_gk([&f](double s) { return f(s); }, y0, y, 1e-12);
    };
    energy.F = F;
    energy.F_inv = [F, f, y0](double w) {
        // F is strictly increasing (f~ > 0); expand a bracket around y0.
        double lo = y0, hi = y0, step = 1.0;
        for (int i = 0; i < 200 && F(hi) < w; ++i) {
            lo = hi;
            hi += step;
            step *= 2.0;
        }
        step = 1.0;
        for (int i = 0; i < 200 && F(lo) > w; ++i) {
            hi = lo;
            lo -= step;
            step *= 2.0;
        }
        if (lo == hi) return lo;
        auto fn = [&](double z) { return F(z) - w; };
        std::function<double(double)> dfn = [&f](double z) { return f(z); };
        return bracketed_root(fn, lo, hi, 1e-13, &dfn).x;
    };
    energy.c1 = ap.epsilon * ap.y1 * ap.y1;
    return energy;
}

double first_integral(const AutonomousProblem& ap, const EnergyFunctional& energy, double y,
                      double yp)
{
    return ap.epsilon * yp * yp + energy.F(y);
}

double turning_time(const AutonomousProblem& ap, const EnergyFunctional& energy)
{
    double sq_eps = std::sqrt(ap.epsilon);
    double upper = sq_eps * ap.y1;
    double f_y0 = energy.F(ap.y0);
    double c1 = f_y0 + ap.epsilon * ap.y1 * ap.y1;
    Expr f = ap.f_tilde;
    auto integrand = [&](double z) {
        double y = energy.F_inv(c1 - z * z);
        double fv = f(y);
        if (!(fv > 0.0)) throw NumericError("f~ nonpositive encountered in quadrature");
        return 1.0 / fv;
    };
    return 2.0 * sq_eps * integrate_gk(integrand, 0.0, upper, 1e-10);
}

double exp_turning_time(const AutonomousProblem& ap)
{
    if (!ap.exp_form) throw ValidationError("closed form requires f~ = exp(y)");
    double c1 = ap.epsilon * ap.y1 * ap.y1 + std::exp(ap.y0);
    double r = std::sqrt(ap.epsilon) * ap.y1;
    return std::sqrt(ap.epsilon / c1) * std::log((std::sqrt(c1) + r) / (std::sqrt(c1) - r));
}

double exp_exact_solution(const AutonomousProblem& ap, double t)
{
    if (!ap.exp_form) throw ValidationError("closed form requires f~ = exp(y)");
    double c1 = ap.epsilon * ap.y1 * ap.y1 + std::exp(ap.y0);
    double c2 = -exp_turning_time(ap);
    double theta = std::sqrt(c1 / ap.epsilon) * (t + c2);
    return std::log(c1) - 2.0 * ln_cosh(0.5 * theta);
}

Trajectory integrate_autonomous(const AutonomousProblem& ap, double t_end)
{
    Expr f = ap.f_tilde;
    double eps = ap.epsilon;
    auto accel = [f, eps](double, double y) { return -f(y) / (2.0 * eps); };
    return integrate_rk4(accel, 0.0, t_end, ap.y0, ap.y1, rk4_steps(ap, t_end));
}

ShootResult shoot_bc(const AutonomousProblem& ap_template, double gamma)
{
    AutonomousProblem ap = ap_template;
    ap.gamma = gamma;
    auto phi = [&](double y1) -> double {
        ap.y1 = y1;
        if (ap.exp_form) return exp_exact_solution(ap, gamma) - ap.y0;
        Trajectory traj = integrate_autonomous(ap, gamma);
        if (traj.t.back() < gamma) return -1e300;  // escaped before gamma
        return traj.y.back() - ap.y0;
    };
    ShootResult result;
    result.y1 = shoot_slope(phi, &result.iterations);
    ap.y1 = result.y1;
    result.t_star = turning_time(ap, make_energy(ap));
    return result;
}

std::vector<ScanRow> turning_scan(const Expr& f_uy, const std::vector<Expr>& controls,
                                  const std::vector<double>& eps_ladder, double y0, double gamma,
                                  double b)
{
    std::vector<ScanRow> rows;
    for (const Expr& u : controls) {
        for (double eps : eps_ladder) {
            ScanRow row;
            row.control = to_string(u);
            row.epsilon = eps;
            try {
                Expr f = f_uy, uc = u;
                auto accel = [f, uc, eps](double t, double y) {
                    double fv = f(uc(t), y);
                    if (!(fv > 0.0)) throw NumericError("f~ nonpositive along trajectory");
                    return -fv / (2.0 * eps);
                };
                double h = std::min(std::sqrt(eps), gamma) / 200.0;
                int steps = std::max(16, static_cast<int>(std::ceil(gamma / h)));
                auto phi = [&](double y1) -> double {
                    Trajectory traj = integrate_rk4(accel, 0.0, gamma, y0, y1, steps);
                    if (traj.t.back() < gamma) return -1e300;
                    return traj.y.back() - y0;
                };
                row.y1 = shoot_slope(phi, nullptr);
                row.trajectory = integrate_rk4(accel, 0.0, gamma, y0, row.y1, steps);
                auto turn = first_turning(row.trajectory);
                if (!turn) throw NumericError("no turning point inside (0, gamma)");
                row.t_star = *turn;
                row.drift_from_half_gamma = row.t_star - 0.5 * gamma;
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    (void)b;
    return rows;
}

} // namespace sps
