#include "sps/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sps {

namespace {

constexpr int kGridPoints = 2001;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct UProfile {
    double u_a, u_g, u_b;
    double min_u, max_u;
    double iota_a, iota_g, iota_b;  // NaN when the discriminant is negative
};

double iota_or_nan(double k, double uv)
{
    double disc = k * k - 4.0 * uv;
    return disc >= 0.0 ? std::sqrt(disc) : std::numeric_limits<double>::quiet_NaN();
}

UProfile profile(const QuadraticInstance& inst)
{
    UProfile pr{};
    pr.u_a = inst.u(inst.a);
    pr.u_g = inst.u(inst.gamma);
    pr.u_b = inst.u(inst.b);
    pr.min_u = kInf;
    pr.max_u = -kInf;
    for (int i = 0; i < kGridPoints; ++i) {
        double t = inst.a + (inst.b - inst.a) * i / (kGridPoints - 1);
        double uv = inst.u(t);
        pr.min_u = std::min(pr.min_u, uv);
        pr.max_u = std::max(pr.max_u, uv);
    }
    pr.iota_a = iota_or_nan(inst.k, pr.u_a);
    pr.iota_g = iota_or_nan(inst.k, pr.u_g);
    pr.iota_b = iota_or_nan(inst.k, pr.u_b);
    return pr;
}

ConditionsReport check_with_profile(const QuadraticInstance& inst, const UProfile& pr,
                                    double lambda)
{
    ConditionsReport rep;
    double k = inst.k;
    double lower = 0.25 * (k * k - (lambda - k) * (lambda - k));
    double upper = 0.25 * (k * k - (lambda + k) * (lambda + k));
    rep.margin[0] = std::min(pr.min_u - lower, upper - pr.max_u);

    double lhs_left = std::fabs(pr.u_g - pr.u_a);
    double lhs_right = std::fabs(pr.u_b - pr.u_g);
    if (std::isnan(pr.iota_a) || std::isnan(pr.iota_g) || std::isnan(pr.iota_b)) {
        rep.margin[1] = rep.margin[2] = rep.margin[3] = rep.margin[4] = -kInf;
    } else {
        rep.margin[1] = 0.125 * (lambda - k - pr.iota_a) * (pr.iota_a + pr.iota_g) - lhs_left;
        rep.margin[2] = 0.125 * (lambda - k - pr.iota_b) * (pr.iota_b + pr.iota_g) - lhs_right;
        rep.margin[3] = 0.125 * (lambda + k + pr.iota_a) * (pr.iota_a + pr.iota_g) - lhs_left;
        rep.margin[4] = 0.125 * (lambda + k + pr.iota_b) * (pr.iota_b + pr.iota_g) - lhs_right;
    }
    rep.all_pass = true;
    for (int i = 0; i < 5; ++i) {
        rep.pass[static_cast<std::size_t>(i)] = rep.margin[static_cast<std::size_t>(i)] > 0.0;
        rep.all_pass = rep.all_pass && rep.pass[static_cast<std::size_t>(i)];
    }
    return rep;
}

} // namespace

QuadraticInstance make_quadratic(double k, Expr u, double a, double gamma, double b)
{
    if (!(k < 0.0)) throw ValidationError("k must be negative");
    if (!(a < gamma && gamma < b))
        throw ValidationError("interval ordering violated: require a < gamma < b");
    return {k, std::move(u), a, gamma, b};
}

QuadraticInstance make_quadratic(const Problem& p)
{
    Expr canonical1 = parse_expr("y^2 + u", {"u", "y"});
    Expr canonical2 = parse_expr("u + y^2", {"u", "y"});
    if (!same_tree(p.f, canonical1) && !same_tree(p.f, canonical2))
        throw ValidationError("feasibility conditions require f = y^2 + u");
    return make_quadratic(p.k, p.u, p.a, p.gamma, p.b);
}

double iota(const QuadraticInstance& inst, double t)
{
    double disc = inst.k * inst.k - 4.0 * inst.u(t);
    if (disc < 0.0) throw ValidationError("negative discriminant: no real reduced solution");
    return std::sqrt(disc);
}

double quadratic_eta(const QuadraticInstance& inst, double t)
{
    return 0.5 * (inst.k + iota(inst, t));
}

ConditionsReport check_conditions(const QuadraticInstance& inst, double lambda)
{
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    return check_with_profile(inst, profile(inst), lambda);
}

std::optional<std::pair<double, double>> lambda_interval(const QuadraticInstance& inst)
{
    const UProfile pr = profile(inst);
    const double hi_bound = -inst.k;
    const int n = 4096;
    const double resolution = 1e-6;
    auto passes = [&](double lambda) { return check_with_profile(inst, pr, lambda).all_pass; };

    // Dense scan for passing runs; keep the longest.
    int best_begin = -1, best_len = 0, run_begin = -1;
    std::vector<bool> ok(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
        double lambda = hi_bound * i / n;
        ok[static_cast<std::size_t>(i)] = lambda > 0.0 && lambda < hi_bound && passes(lambda);
        if (ok[static_cast<std::size_t>(i)]) {
            if (run_begin < 0) run_begin = i;
            if (i - run_begin + 1 > best_len) {
                best_len = i - run_begin + 1;
                best_begin = run_begin;
            }
        } else {
            run_begin = -1;
        }
    }
    if (best_begin < 0) return std::nullopt;

    auto refine = [&](double fail, double good) {
        while (std::fabs(good - fail) > resolution) {
            double mid = 0.5 * (fail + good);
            (passes(mid) ? good : fail) = mid;
        }
        return good;
    };

    double lo = hi_bound * best_begin / n;
    if (best_begin > 0) lo = refine(hi_bound * (best_begin - 1) / n, lo);
    int end = best_begin + best_len - 1;  // end < n: the bound itself is excluded
    double hi = refine(hi_bound * (end + 1) / n, hi_bound * end / n);
    return std::make_pair(lo, hi);
}

} // namespace sps
