#include "sps/problem.hpp"

#include "sps/numerics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sps {

namespace {

constexpr int kGridPoints = 2001;
constexpr double kEtaTol = 1e-12;

Expr parse_field(const nlohmann::json& doc, const char* key, std::vector<std::string> vars)
{
    if (!doc.contains(key) || !doc[key].is_string())
        throw ValidationError(std::string("missing expression field '") + key + "'");
    return parse_expr(doc[key].get<std::string>(), std::move(vars));
}

double num_field(const nlohmann::json& doc, const char* key)
{
    if (!doc.contains(key) || !doc[key].is_number())
        throw ValidationError(std::string("missing numeric field '") + key + "'");
    return doc[key].get<double>();
}

// Newton root of k*y - f(u(t), y) = 0 near `seed`. A root is accepted only
// when the reduced equation is nondegenerate there: A2 forces
// |k - df/dy| >= m > 0, while the spurious "roots" of rootless instances
// (residual driven to zero asymptotically or by cancellation) sit where
// k - df/dy vanishes as well.
RootResult reduced_root(const Problem& p, const Expr& f_y, double t, double seed)
{
    double uval = p.u(t);
    auto fn = [&](double y) { return p.k * y - p.f(uval, y); };
    auto dfn = [&](double y) { return p.k - f_y(uval, y); };
    RootResult r = newton_root(fn, dfn, seed, kEtaTol, 50);
    if (r.converged && std::fabs(dfn(r.x)) <= 1e-8 * (1.0 + std::fabs(p.k))) r.converged = false;
    return r;
}

std::vector<double> continuation_grid(const Problem& p, const Expr& f_y, int n)
{
    std::vector<double> values(static_cast<std::size_t>(n));
    double seed = p.eta_seed.value();
    for (int i = 0; i < n; ++i) {
        double t = p.a + (p.b - p.a) * i / (n - 1);
        auto r = reduced_root(p, f_y, t, seed);
        if (!r.converged)
            throw ValidationError("reduced problem has no solution");
        values[static_cast<std::size_t>(i)] = r.x;
        seed = r.x;
    }
    return values;
}

} // namespace

Problem load_problem(const nlohmann::json& doc)
{
    Problem p;
    p.k = num_field(doc, "k");
    p.a = num_field(doc, "a");
    p.gamma = num_field(doc, "gamma");
    p.b = num_field(doc, "b");
    p.lambda = num_field(doc, "lambda");
    p.f = parse_field(doc, "f", {"u", "y"});
    p.u = parse_field(doc, "u", {"t"});
    p.g = doc.contains("g") ? parse_field(doc, "g", {"y"}) : parse_expr("y", {"y"});
    if (doc.contains("eta")) p.eta = parse_field(doc, "eta", {"t"});
    if (doc.contains("eta_seed")) p.eta_seed = num_field(doc, "eta_seed");
    if (doc.contains("delta")) p.delta = num_field(doc, "delta");
    if (doc.contains("epsilon")) p.epsilon = num_field(doc, "epsilon");

    if (!(p.a < p.gamma && p.gamma < p.b))
        throw ValidationError("interval ordering violated: require a < gamma < b");
    if (!(p.k < 0.0)) throw ValidationError("k must be negative");
    if (!(p.lambda > 0.0 && p.lambda < -p.k))
        throw ValidationError("lambda must lie in (0, -k)");
    if (!(p.delta > 0.0)) throw ValidationError("delta must be positive");
    if (!(p.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!p.eta && !p.eta_seed)
        throw ValidationError("either 'eta' or 'eta_seed' must be given");
    return p;
}

Problem load_problem_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open problem file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid JSON in '" + path + "': " + e.what());
    }
    return load_problem(doc);
}

double resolve_eta(const Problem& p, double t)
{
    if (p.eta) return (*p.eta)(t);
    if (!p.eta_seed) throw ValidationError("no eta expression and no eta_seed");
    Expr f_y = diff(p.f, "y");
    // March from a to t so the root stays on the branch selected by the seed.
    const int steps = 64;
    double seed = *p.eta_seed;
    for (int i = 1; i <= steps; ++i) {
        double ti = p.a + (t - p.a) * i / steps;
        auto r = reduced_root(p, f_y, ti, seed);
        if (!r.converged) throw ValidationError("reduced problem has no solution");
        seed = r.x;
    }
    return seed;
}

ReducedPath build_reduced_path(const Problem& p)
{
    ReducedPath path;
    Expr f_y = diff(p.f, "y");

    if (p.eta) {
        Expr eta = *p.eta;
        Expr eta_d = diff(eta, "t");
        Expr eta_dd = diff(eta_d, "t");
        path.eta = [eta](double t) { return eta(t); };
        path.eta_d = [eta_d](double t) { return eta_d(t); };
        path.eta_dd = [eta_dd](double t) { return eta_dd(t); };
    } else {
        auto grid = std::make_shared<std::vector<double>>(continuation_grid(p, f_y, kGridPoints));
        Problem pc = p;
        double a = p.a, b = p.b;
        auto eta_fn = [pc, f_y, grid, a, b](double t) {
            double pos = (t - a) / (b - a) * (kGridPoints - 1);
            int i = std::clamp(static_cast<int>(pos), 0, kGridPoints - 2);
            double frac = pos - i;
            double seed = (*grid)[static_cast<std::size_t>(i)] * (1.0 - frac) +
                          (*grid)[static_cast<std::size_t>(i) + 1] * frac;
            auto r = reduced_root(pc, f_y, t, seed);
            if (!r.converged) throw NumericError("reduced root lost during evaluation");
            return r.x;
        };
        path.eta = eta_fn;

        // Implicit differentiation of k*eta = f(u, eta).
        Expr f_u = diff(p.f, "u");
        Expr f_uu = diff(f_u, "u");
        Expr f_uy = diff(f_u, "y");
        Expr f_yy = diff(f_y, "y");
        Expr u_d = diff(p.u, "t");
        Expr u_dd = diff(u_d, "t");
        double k = p.k;
        Expr u_expr = p.u;
        auto eta_d_fn = [=](double t) {
            double uv = u_expr(t);
            double ev = eta_fn(t);
            double denom = k - f_y(uv, ev);
            if (std::fabs(denom) < 1e-14)
                throw ValidationError("k - df/dy vanishes on the reduced path");
            return f_u(uv, ev) * u_d(t) / denom;
        };
        auto eta_dd_fn = [=](double t) -> double {
            try {
                double uv = u_expr(t);
                double ev = eta_fn(t);
                double denom = k - f_y(uv, ev);
                if (std::fabs(denom) < 1e-14)
                    throw ValidationError("k - df/dy vanishes on the reduced path");
                double ud = u_d(t);
                double ed = f_u(uv, ev) * ud / denom;
                return (f_uu(uv, ev) * ud * ud + 2.0 * f_uy(uv, ev) * ud * ed +
                        f_yy(uv, ev) * ed * ed + f_u(uv, ev) * u_dd(t)) /
                       denom;
            } catch (const EvalError&) {
                // Central-difference fallback for expressions whose second
                // partials hit a domain edge.
                double h = 1e-5 * (1.0 + std::fabs(t));
                return (eta_fn(t + h) - 2.0 * eta_fn(t) + eta_fn(t - h)) / (h * h);
            }
        };
        path.eta_d = eta_d_fn;
        path.eta_dd = eta_dd_fn;
    }

    // Validate the reduced residual and take the grid max of |eta''|.
    double max_dd = 0.0;
    for (int i = 0; i < kGridPoints; ++i) {
        double t = p.a + (p.b - p.a) * i / (kGridPoints - 1);
        double ev = path.eta(t);
        double residual = p.k * ev - p.f(p.u(t), ev);
        if (std::fabs(residual) > 1e-10 * (1.0 + std::fabs(ev)))
            throw ValidationError("reduced equation residual too large; eta does not solve it");
        max_dd = std::max(max_dd, std::fabs(path.eta_dd(t)));
    }
    path.max_abs_eta_dd = max_dd;
    return path;
}

FeasibilityTube feasibility_tube(const Problem& p, const ReducedPath& path)
{
    FeasibilityTube tube;
    tube.delta = p.delta;
    double a = p.a, b = p.b, delta = p.delta;
    double wl = std::fabs(path.eta(p.gamma) - path.eta(p.a)) + delta;
    double wr = std::fabs(path.eta(p.b) - path.eta(p.gamma)) + delta;
    // Endpoint plateaus with linear bridges down to the interior width delta;
    // max() keeps d continuous when delta is large and the pieces overlap.
    tube.d = [a, b, delta, wl, wr](double t) {
        auto ramp = [delta](double w, double dist) {
            if (dist <= 0.5 * delta) return w;
            if (dist >= delta) return delta;
            return w + (delta - w) * (dist - 0.5 * delta) / (0.5 * delta);
        };
        return std::max({delta, ramp(wl, t - a), ramp(wr, b - t)});
    };
    tube.grid_t.resize(kGridPoints);
    tube.eta_values.resize(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) {
        double t = p.a + (p.b - p.a) * i / (kGridPoints - 1);
        tube.grid_t[static_cast<std::size_t>(i)] = t;
        tube.eta_values[static_cast<std::size_t>(i)] = path.eta(t);
    }
    return tube;
}

A2Report verify_A2(const Problem& p, const ReducedPath& path)
{
    A2Report report;
    report.lambda = p.lambda;
    Expr f_y = diff(p.f, "y");
    FeasibilityTube tube = feasibility_tube(p, path);
    const int ny = 201;
    for (int i = 0; i < kGridPoints; ++i) {
        double t = tube.grid_t[static_cast<std::size_t>(i)];
        double ev = tube.eta_values[static_cast<std::size_t>(i)];
        double width = tube.d(t);
        double uv = p.u(t);
        for (int j = 0; j < ny; ++j) {
            double y = ev - width + 2.0 * width * j / (ny - 1);
            double df = std::fabs(f_y(uv, y));
            if (df > report.max_abs_df_dy) {
                report.max_abs_df_dy = df;
                report.argmax_t = t;
                report.argmax_y = y;
            }
        }
    }
    report.pass = report.max_abs_df_dy <= p.lambda;
    return report;
}

} // namespace sps
