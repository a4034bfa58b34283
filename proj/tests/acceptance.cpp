// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code is the number of failures.

#include "sps/approximation.hpp"
#include "sps/autonomous.hpp"
#include "sps/control.hpp"
#include "sps/layers.hpp"
#include "sps/numerics.hpp"
#include "sps/problem.hpp"
#include "sps/quadratic.hpp"
#include "sps/solver.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace sps;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, ...)
{
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

Problem p1_problem(double eps)
{
    json doc{{"k", -2.0},      {"a", 0.0},
             {"gamma", 0.25},  {"b", 0.5},
             {"f", "y^2 + u"}, {"u", "t"},
             {"g", "y"},       {"eta", "-1 + sqrt(1 - t)"},
             {"lambda", 1.6},  {"delta", 0.05},
             {"epsilon", eps}};
    return load_problem(doc);
}

struct RandomFamily {
    LayerFamily fam;
    double lambda;
};

RandomFamily random_family(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> a_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> x_dist(0.3, 2.0);
    std::uniform_real_distribution<double> split(0.2, 0.8);
    std::uniform_real_distribution<double> m_dist(0.2, 3.0);
    std::uniform_real_distribution<double> log_eps(std::log(1e-8), std::log(1.0));
    std::uniform_real_distribution<double> amp(-3.0, 3.0);
    std::uniform_real_distribution<double> lam(0.1, 3.0);
    double a = a_dist(rng);
    double X = x_dist(rng);
    double Z = split(rng) * X;
    return {make_layer_family(a, a + Z, a + X, m_dist(rng), std::exp(log_eps(rng)), amp(rng),
                              std::fabs(amp(rng))),
            lam(rng)};
}

// ---- Criterion 1: exact layer identities --------------------------------

Outcome layer_identities()
{
    std::mt19937_64 rng(1234321);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto [fam, lambda] = random_family(rng);
        if (!(big_d(fam).scaled > 0.0)) return {false, "D <= 0"};
        double za = zeta(fam, fam.a), zg = zeta(fam, fam.gamma), zb = zeta(fam, fam.b);
        double dev = std::fabs((zg - za) + fam.A) / (std::fabs(fam.A) + 1e-300);
        dev = std::max(dev, std::fabs(zb - zg) / (std::fabs(fam.A) + 1e-300));
        double ha = zeta_hat(fam, fam.a), hg = zeta_hat(fam, fam.gamma),
               hb = zeta_hat(fam, fam.b);
        dev = std::max(dev, std::fabs(hg - ha) / (fam.B + 1e-300));
        dev = std::max(dev, std::fabs((hb - hg) - fam.B) / (fam.B + 1e-300));
        double va = v_corr(fam, lambda, fam.a);
        double vg = v_corr(fam, lambda, fam.gamma);
        double vb = v_corr(fam, lambda, fam.b);
        // Relative to the psi-term scale: v at these points is a cancellation
        // of psi-sized terms (see notes in the repository tests).
        double scale = std::max({std::fabs(va), std::fabs(vg), std::fabs(vb),
                                 std::fabs(psi(fam, lambda, fam.a)),
                                 std::fabs(psi(fam, lambda, fam.gamma)),
                                 std::fabs(psi(fam, lambda, fam.b)), 1e-300});
        dev = std::max(dev, std::fabs(vg - va) / scale);
        dev = std::max(dev, std::fabs(vb - vg) / scale);
        worst = std::max(worst, dev);
        if (dev > 1e-12) return {false, fmt("identity deviation %.3g at tuple %d", dev, i)};
    }
    // Overflow spot check at eps = 1e-12.
    LayerFamily tiny = make_layer_family(0.0, 0.25, 0.5, 0.4, 1e-12, -0.134, 0.159);
    for (int i = 0; i <= 10; ++i) {
        double t = 0.5 * i / 10;
        if (!std::isfinite(zeta(tiny, t)) || !std::isfinite(zeta_hat(tiny, t)) ||
            !std::isfinite(v_corr(tiny, 1.6, t)))
            return {false, "non-finite value at eps = 1e-12"};
    }
    if (!(big_d(tiny).scaled > 0.0)) return {false, "scaled D <= 0 at eps = 1e-12"};
    return {true, fmt("max identity deviation %.2e", worst)};
}

// ---- Criterion 2: layer ODE residuals ------------------------------------

Outcome layer_residuals()
{
    std::mt19937_64 rng(555);
    double worst = 0.0;
    auto check = [&worst](const LayerFamily& fam) {
        for (int i = 0; i <= 100; ++i) {
            double t = fam.a + (fam.b - fam.a) * i / 100;
            double rz = std::fabs(fam.epsilon * zeta_dd(fam, t) - fam.m * zeta(fam, t)) /
                        (std::fabs(fam.A) + std::fabs(fam.m * zeta(fam, t)) + 1e-300);
            double rh = std::fabs(fam.epsilon * zeta_hat_dd(fam, t) - fam.m * zeta_hat(fam, t)) /
                        (fam.B + std::fabs(fam.m * zeta_hat(fam, t)) + 1e-300);
            worst = std::max({worst, rz, rh});
        }
    };
    check(make_layer_family(0.0, 0.25, 0.5, 0.4, 1e-3, -0.134, 0.159));
    check(make_layer_family(0.0, 0.25, 0.5, 0.4, 1e-4, -0.134, 0.159));
    for (int i = 0; i < 20; ++i) check(random_family(rng).fam);
    return {worst <= 1e-9, fmt("max relative residual %.2e", worst)};
}

// ---- Criterion 3: the plotted experiment ---------------------------------

Outcome figure_reproduction()
{
    Problem p = p1_problem(1e-4);
    ProblemSolve run = solve_problem(p, 512);
    if (run.sol.bc_residual > run.sol.tolerance)
        return {false, fmt("nonlocal constraint residual %.2e", run.sol.bc_residual)};
    ReducedPath path = build_reduced_path(p);
    double dev = 0.0;
    for (std::size_t i = 0; i < run.sol.mesh.nodes.size(); ++i) {
        double t = run.sol.mesh.nodes[i];
        if (t >= 0.05 && t <= 0.45) dev = std::max(dev, std::fabs(run.sol.y[i] - path.eta(t)));
    }
    double w0 = std::fabs(run.sol.w.front());
    double wb = std::fabs(run.sol.w.back());
    bool pass = dev <= 5.0 * p.epsilon && w0 >= 10.0 && wb >= 10.0;
    return {pass, fmt("max|y-eta| on [0.05,0.45] = %.3g (<= %.3g), |w(a)| = %.1f, |w(b)| = %.1f",
                      dev, 5.0 * p.epsilon, w0, wb)};
}

// ---- Criterion 4: O(eps) accuracy ladder ----------------------------------

Outcome accuracy_ladder()
{
    double errs[3];
    int violations[3];
    int idx = 0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        Problem p = p1_problem(eps);
        ProblemSolve run = solve_problem(p, 512);
        double slack = 1e-8 + 10.0 * run.sol.tolerance;
        CompareMetrics metrics = compare(run.sol, run.appr, slack);
        errs[idx] = metrics.max_err;
        violations[idx] = metrics.envelope_violations;
        ++idx;
    }
    double r1 = errs[1] / errs[0];
    double r2 = errs[2] / errs[1];
    bool ratios_ok = r1 <= 0.3 && r2 <= 0.3;
    bool envelopes_ok = violations[0] == 0 && violations[1] == 0 && violations[2] == 0;
    return {ratios_ok && envelopes_ok,
            fmt("E = {%.3g, %.3g, %.3g}, ratios %.3f/%.3f (need <= 0.3), envelope violations "
                "%d/%d/%d",
                errs[0], errs[1], errs[2], r1, r2, violations[0], violations[1], violations[2])};
}

// ---- Criterion 5: admissible lambda interval ------------------------------

Outcome lambda_endpoints()
{
    QuadraticInstance inst = make_quadratic(-2.0, parse_expr("t", {"t"}), 0.0, 0.25, 0.5);
    auto interval = lambda_interval(inst);
    if (!interval) return {false, "empty interval"};
    double lo_expected = 2.0 / (std::sqrt(2.0) + std::sqrt(3.0)) + 2.0 - std::sqrt(2.0);
    double dlo = std::fabs(interval->first - lo_expected);
    double dhi = std::fabs(interval->second - 2.0);
    return {dlo <= 1e-4 && dhi <= 1e-4,
            fmt("interval (%.6f, %.6f), endpoint gaps %.2e / %.2e", interval->first,
                interval->second, dlo, dhi)};
}

// ---- Criterion 6: manufactured-solution convergence -----------------------

Outcome manufactured_convergence()
{
    const double eps = 1e-3;
    const double k = -2.0;
    const double w = 8.0 * 3.14159265358979323846;
    char ubuf[128];
    std::snprintf(ubuf, sizeof ubuf, "%.17g*cos(%.17g*t) - cos(%.17g*t)^2",
                  -(w * w * eps + 2.0), w, w);
    Expr u = parse_expr(ubuf, {"t"});
    Bvp3System sys;
    sys.a = 0.0;
    sys.gamma = 0.25;
    sys.b = 0.5;
    sys.k = k;
    sys.epsilon = eps;
    sys.rhs = [u](double t, double y) { return y * y + u(t); };
    sys.rhs_dy = [](double, double y) { return 2.0 * y; };
    auto exact = [w](double t) { return std::cos(w * t); };

    double errs[3];
    int idx = 0;
    for (int N : {64, 128, 256}) {
        LayerMesh mesh = shishkin_mesh(sys.a, sys.gamma, sys.b, eps, 0.4, N);
        DiscreteSolution sol = solve_bvp3(sys, mesh, exact);
        double err = 0.0;
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
            err = std::max(err, std::fabs(sol.y[i] - exact(mesh.nodes[i])));
        errs[idx++] = err;
    }
    double order1 = std::log2(errs[0] / errs[1]);
    double order2 = std::log2(errs[1] / errs[2]);
    return {order1 >= 1.5 && order2 >= 1.5,
            fmt("errors {%.3g, %.3g, %.3g}, observed orders %.2f / %.2f", errs[0], errs[1],
                errs[2], order1, order2)};
}

// ---- Criterion 7: turning points ------------------------------------------

Outcome turning_points()
{
    std::string detail;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        AutonomousProblem ap =
            make_autonomous(parse_expr("exp(y)", {"y"}), -8.0, 1.0, 0.25, 0.5, eps);
        ShootResult shot = shoot_bc(ap, 0.25);
        if (std::fabs(shot.t_star - 0.125) > 1e-6)
            return {false, fmt("shoot t* = %.9f at eps = %.0e", shot.t_star, eps)};
        ap.y1 = shot.y1;
        double closed = exp_turning_time(ap);
        double quad = turning_time(ap, make_energy(ap));
        if (std::fabs(closed - quad) > 1e-7)
            return {false, fmt("closed form vs quadrature gap %.2e at eps = %.0e",
                               std::fabs(closed - quad), eps)};
    }
    // Constant nonlinearity: the parabola gives t* = 2 eps y1 / c.
    AutonomousProblem pc =
        make_autonomous(parse_expr("2.5 + 0*y", {"y"}), 0.0, 1.0, 0.25, 0.5, 0.01);
    double expected = 2.0 * 0.01 * 1.0 / 2.5;
    double got = turning_time(pc, make_energy(pc));
    double rel = std::fabs(got - expected) / expected;
    if (rel > 1e-10) return {false, fmt("parabola t* off by %.2e relative", rel)};
    return {true, fmt("t* = 0.125 across the ladder; parabola deviation %.1e", rel)};
}

// ---- Criterion 8: energy conservation -------------------------------------

Outcome energy_conservation()
{
    struct Instance {
        const char* f;
        double t_end;
    };
    double worst = 0.0;
    for (const Instance& inst :
         {Instance{"exp(y)", 0.25}, Instance{"1 + y^2", 0.039}, Instance{"2 + 0*y", 0.25}}) {
        AutonomousProblem ap =
            make_autonomous(parse_expr(inst.f, {"y"}), 0.0, 1.0, 0.25, 0.5, 1e-2);
        EnergyFunctional energy = make_energy(ap);
        Trajectory traj = integrate_autonomous(ap, inst.t_end);
        for (std::size_t i = 0; i < traj.t.size(); ++i) {
            double drift =
                std::fabs(first_integral(ap, energy, traj.y[i], traj.w[i]) - energy.c1) /
                energy.c1;
            worst = std::max(worst, drift);
        }
    }
    return {worst <= 1e-8, fmt("max energy drift %.2e relative to c1", worst)};
}

// ---- Criterion 9: control synthesis ----------------------------------------

Outcome control_synthesis()
{
    json pdoc{{"k", -2.0},   {"f", "0.5*sin(y)"}, {"g", "y"},  {"lambda", 0.6},
              {"a", 0.0},    {"gamma", 0.25},     {"b", 0.5},  {"delta", 0.05}};
    SemilinearPlant plant = load_plant(pdoc);
    Expr v0 = parse_expr("t^2", {"t"});
    InputSynthesis synth = synthesize_input(plant, v0);
    if (!synth.u0_expr) return {false, "expected a symbolic input"};
    OutputBound bound = output_error_bound(plant, synth, 1e-4);

    json doc{{"k", -2.0},
             {"a", 0.0},
             {"gamma", 0.25},
             {"b", 0.5},
             {"f", "0.5*sin(y) + u"},
             {"u", to_string(*synth.u0_expr)},
             {"g", "y"},
             {"eta", "t^2"},
             {"lambda", 0.6},
             {"delta", 0.05},
             {"epsilon", 1e-4}};
    Problem closed = load_problem(doc);
    ProblemSolve run = solve_problem(closed, 512);
    double allowed = bound.bound + 2.0 * run.appr.C * closed.epsilon + 1e-6;
    Expr g = plant.g;
    double worst = 0.0;
    for (std::size_t i = 0; i < run.sol.mesh.nodes.size(); ++i) {
        double t = run.sol.mesh.nodes[i];
        if (t < 0.1 || t > 0.4) continue;
        worst = std::max(worst, std::fabs(g(run.sol.y[i]) - v0(t)));
    }
    return {worst <= allowed,
            fmt("max tracking error %.3g on [0.1, 0.4], allowance %.3g", worst, allowed)};
}

// ---- Criterion 10: parser properties ---------------------------------------

struct ExprGen {
    std::mt19937 rng;
    explicit ExprGen(unsigned seed) : rng(seed) {}

    std::string make(int depth)
    {
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
        switch (pick(rng)) {
            case 0: {
                std::uniform_real_distribution<double> dist(-2.0, 2.0);
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", dist(rng));
                return buf;
            }
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

Outcome parser_properties()
{
    ExprGen gen(777001);
    std::uniform_real_distribution<double> xs(-1.5, 1.5);
    auto fd5 = [](const std::function<double(double)>& f, double x, double h) {
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
    };
    int checked = 0;
    int attempts = 0;
    double worst = 0.0;
    while (checked < 1000 && attempts < 6000) {
        ++attempts;
        Expr e = parse_expr(gen.make(3), {"x"});
        std::string text = to_string(e);
        if (!same_tree(e, parse_expr(text, {"x"})))
            return {false, "serialization round trip changed the tree"};
        Expr de = diff(e, "x");
        double x = xs(gen.rng);
        double h = 1e-3 * (1.0 + std::fabs(x));
        double fd1, fd2, exact;
        try {
            auto f = [&](double z) { return e(z); };
            fd1 = fd5(f, x, h);
            fd2 = fd5(f, x, 0.5 * h);
            exact = de(x);
        } catch (const EvalError&) {
            continue;
        }
        if (!std::isfinite(fd1) || !std::isfinite(fd2) || !std::isfinite(exact)) continue;
        if (std::fabs(fd1 - fd2) > 1e-9 * (1.0 + std::fabs(fd1))) continue;  // abs kink
        double dev = std::fabs(exact - fd2) / (1.0 + std::fabs(exact));
        worst = std::max(worst, dev);
        if (dev > 1e-6) return {false, fmt("derivative deviation %.3g", dev)};
        ++checked;
    }
    if (checked < 1000) return {false, fmt("only %d valid sample pairs", checked)};
    return {true, fmt("1000 pairs, max derivative deviation %.2e", worst)};
}

} // namespace

int main()
{
    struct Criterion {
        const char* id;
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"C01", "layer-identities", 1.0, layer_identities},
        {"C02", "layer-ode-residuals", 1.0, layer_residuals},
        {"C03", "figure-reproduction", 10.0, figure_reproduction},
        {"C04", "o-eps-accuracy-ladder", 30.0, accuracy_ladder},
        {"C05", "lambda-interval", 5.0, lambda_endpoints},
        {"C06", "manufactured-convergence", 10.0, manufactured_convergence},
        {"C07", "turning-points", 10.0, turning_points},
        {"C08", "energy-conservation", 5.0, energy_conservation},
        {"C09", "control-synthesis", 10.0, control_synthesis},
        {"C10", "parser-properties", 2.0, parser_properties},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_budget = seconds <= c.budget_seconds;
        bool pass = outcome.pass && in_budget;
        if (!pass) ++failures;
        std::printf("%s %-26s %s  [%6.2fs/%gs]  %s%s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    seconds, c.budget_seconds, outcome.detail.c_str(),
                    !in_budget ? " (over budget)" : "");
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
