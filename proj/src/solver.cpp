#include "sps/solver.hpp"

#include "sps/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace sps {

namespace {

bool verbose()
{
    const char* env = std::getenv("SPS_LOG");
    return env && *env;
}

// Residual of the discrete system; rows 0 and N are the nonlocal constraints.
void residual(const Bvp3System& sys, const LayerMesh& mesh, const Eigen::VectorXd& y,
              Eigen::VectorXd& F)
{
    const auto& t = mesh.nodes;
    const int n = static_cast<int>(t.size()) - 1;
    const int gi = mesh.gamma_index;
    F(0) = y(0) - y(gi);
    for (int i = 1; i < n; ++i) {
        double hl = t[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(i) - 1];
        double hr = t[static_cast<std::size_t>(i) + 1] - t[static_cast<std::size_t>(i)];
        double d2 = 2.0 * ((y(i + 1) - y(i)) / hr - (y(i) - y(i - 1)) / hl) / (hl + hr);
        F(i) = sys.epsilon * d2 + sys.k * y(i) -
               sys.rhs(t[static_cast<std::size_t>(i)], y(i));
    }
    F(n) = y(gi) - y(n);
}

void jacobian(const Bvp3System& sys, const LayerMesh& mesh, const Eigen::VectorXd& y,
              Eigen::MatrixXd& J)
{
    const auto& t = mesh.nodes;
    const int n = static_cast<int>(t.size()) - 1;
    const int gi = mesh.gamma_index;
    J.setZero();
    J(0, 0) = 1.0;
    J(0, gi) = -1.0;
    for (int i = 1; i < n; ++i) {
        double hl = t[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(i) - 1];
        double hr = t[static_cast<std::size_t>(i) + 1] - t[static_cast<std::size_t>(i)];
        J(i, i - 1) = 2.0 * sys.epsilon / (hl * (hl + hr));
        J(i, i + 1) = 2.0 * sys.epsilon / (hr * (hl + hr));
        J(i, i) = -2.0 * sys.epsilon / (hl * hr) + sys.k -
                  sys.rhs_dy(t[static_cast<std::size_t>(i)], y(i));
    }
    J(n, gi) = 1.0;
    J(n, n) = -1.0;
}

// Three-point derivative estimates, exact on quadratics.
std::vector<double> derivative_estimates(const std::vector<double>& t,
                                         const std::vector<double>& y)
{
    const std::size_t n = t.size() - 1;
    std::vector<double> w(t.size());
    for (std::size_t i = 1; i < n; ++i) {
        double hl = t[i] - t[i - 1];
        double hr = t[i + 1] - t[i];
        w[i] = -hr / (hl * (hl + hr)) * y[i - 1] + (hr - hl) / (hl * hr) * y[i] +
               hl / (hr * (hl + hr)) * y[i + 1];
    }
    {
        double h1 = t[1] - t[0], h2 = t[2] - t[1];
        w[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
               h1 / (h2 * (h1 + h2)) * y[2];
    }
    {
        double g1 = t[n] - t[n - 1], g2 = t[n - 1] - t[n - 2];
        w[n] = (2.0 * g1 + g2) / (g1 * (g1 + g2)) * y[n] - (g1 + g2) / (g1 * g2) * y[n - 1] +
               g1 / (g2 * (g1 + g2)) * y[n - 2];
    }
    return w;
}

} // namespace

LayerMesh shishkin_mesh(double a, double gamma, double b, double epsilon, double m, int N)
{
    if (!(a < gamma && gamma < b)) throw ValidationError("degenerate geometry");
    if (N < 64 || N % 4 != 0) throw ValidationError("mesh size N must be >= 64 and divisible by 4");
    if (!(epsilon > 0.0) || !(m > 0.0)) throw ValidationError("epsilon and m must be positive");

    LayerMesh mesh;
    double tau = std::min(0.25 * (b - a), 2.0 * std::sqrt(epsilon / m) * std::log(double(N)));
    mesh.tau_a = mesh.tau_b = tau;
    mesh.nodes.reserve(static_cast<std::size_t>(N) + 1);
    int quarter = N / 4;
    for (int i = 0; i <= quarter; ++i) mesh.nodes.push_back(a + tau * i / quarter);
    double mid_lo = a + tau, mid_hi = b - tau;
    for (int i = 1; i <= 2 * quarter; ++i)
        mesh.nodes.push_back(mid_lo + (mid_hi - mid_lo) * i / (2 * quarter));
    for (int i = 1; i <= quarter; ++i) mesh.nodes.push_back(mid_hi + tau * i / quarter);
    mesh.nodes.front() = a;
    mesh.nodes.back() = b;

    // Snap gamma in as a node.
    int nearest = 1;
    double best = std::fabs(mesh.nodes[1] - gamma);
    for (int i = 2; i < N; ++i) {
        double d = std::fabs(mesh.nodes[static_cast<std::size_t>(i)] - gamma);
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    mesh.nodes[static_cast<std::size_t>(nearest)] = gamma;
    mesh.gamma_index = nearest;
    for (std::size_t i = 1; i < mesh.nodes.size(); ++i)
        if (!(mesh.nodes[i] > mesh.nodes[i - 1])) throw ValidationError("degenerate geometry");
    return mesh;
}

Bvp3System make_system(const Problem& p)
{
    Bvp3System sys;
    sys.a = p.a;
    sys.gamma = p.gamma;
    sys.b = p.b;
    sys.k = p.k;
    sys.epsilon = p.epsilon;
    Expr f = p.f, u = p.u, f_y = diff(p.f, "y");
    sys.rhs = [f, u](double t, double y) { return f(u(t), y); };
    sys.rhs_dy = [f_y, u](double t, double y) { return f_y(u(t), y); };
    return sys;
}

DiscreteSolution solve_bvp3(const Bvp3System& sys, const LayerMesh& mesh,
                            const std::function<double(double)>& initial_guess,
                            const SolverOptions& opts)
{
    const int n = static_cast<int>(mesh.nodes.size()) - 1;
    Eigen::VectorXd y(n + 1), F(n + 1), Fnew(n + 1);
    for (int i = 0; i <= n; ++i) y(i) = initial_guess(mesh.nodes[static_cast<std::size_t>(i)]);

    DiscreteSolution out;
    out.mesh = mesh;

    auto check_tube = [&](const Eigen::VectorXd& v) {
        if (!opts.tube_eta || !opts.tube_d) return;
        for (int i = 0; i <= n; ++i) {
            double t = mesh.nodes[static_cast<std::size_t>(i)];
            if (std::fabs(v(i) - opts.tube_eta(t)) >= opts.tube_d(t)) {
                out.left_tube = true;
                return;
            }
        }
    };

    Eigen::MatrixXd J(n + 1, n + 1);
    residual(sys, mesh, y, F);
    double fnorm = F.lpNorm<Eigen::Infinity>();
    check_tube(y);

    int iter = 0;
    for (; iter < opts.max_newton; ++iter) {
        double tol = opts.tol * (1.0 + y.lpNorm<Eigen::Infinity>());
        if (fnorm <= tol) break;
        jacobian(sys, mesh, y, J);
        Eigen::VectorXd step = J.partialPivLu().solve(-F);
        if (!step.allFinite()) throw NumericError("Newton step is not finite");

        double alpha = 1.0;
        bool improved = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            Eigen::VectorXd trial = y + alpha * step;
            residual(sys, mesh, trial, Fnew);
            double fn = Fnew.lpNorm<Eigen::Infinity>();
            if (std::isfinite(fn) && fn < fnorm) {
                y = trial;
                F = Fnew;
                fnorm = fn;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) throw NumericError("Newton failed to reduce the residual");
        if (!y.allFinite()) throw NumericError("Newton iterate diverged");
        check_tube(y);
        if (verbose())
            std::fprintf(stderr, "newton iter %d residual %.3e step %.3e\n", iter + 1, fnorm,
                         alpha);
    }
    double tol = opts.tol * (1.0 + y.lpNorm<Eigen::Infinity>());
    if (fnorm > tol) throw NumericError("Newton did not converge within the iteration budget");

    out.y.assign(y.data(), y.data() + n + 1);
    out.w = derivative_estimates(mesh.nodes, out.y);
    out.newton_iters = iter;
    out.residual_norm = fnorm;
    out.tolerance = tol;
    out.bc_residual = std::max(std::fabs(out.y.front() - out.y[static_cast<std::size_t>(mesh.gamma_index)]),
                               std::fabs(out.y[static_cast<std::size_t>(mesh.gamma_index)] - out.y.back()));
    return out;
}

ProblemSolve solve_problem(const Problem& p, int N)
{
    ReducedPath path = build_reduced_path(p);
    Approximation appr = make_approximation(p, path);
    LayerMesh mesh = shishkin_mesh(p.a, p.gamma, p.b, p.epsilon, p.m(), N);
    Bvp3System sys = make_system(p);
    FeasibilityTube tube = feasibility_tube(p, path);
    SolverOptions opts;
    opts.tube_eta = path.eta;
    opts.tube_d = tube.d;
    auto guess = [&appr](double t) { return y_tilde(appr, t); };
    DiscreteSolution sol = solve_bvp3(sys, mesh, guess, opts);
    return {std::move(sol), std::move(appr)};
}

double default_envelope_slack(const DiscreteSolution& sol)
{
    return 1e-8 + 10.0 * sol.tolerance;
}

CompareMetrics compare(const DiscreteSolution& sol, const Approximation& appr, double slack)
{
    CompareMetrics metrics;
    metrics.case_id = appr.case_id;
    const auto& t = sol.mesh.nodes;
    double a = appr.fam.a, b = appr.fam.b;
    double lo_win = a + 0.1 * (b - a), hi_win = b - 0.1 * (b - a);
    for (std::size_t i = 0; i < t.size(); ++i) {
        double approx = y_tilde(appr, t[i]);
        double err = std::fabs(sol.y[i] - approx);
        metrics.max_err = std::max(metrics.max_err, err);
        if (t[i] >= lo_win && t[i] <= hi_win)
            metrics.interior_max_err = std::max(metrics.interior_max_err, err);
        Envelope env = envelope(appr, t[i]);
        double diff = approx - sol.y[i];
        if (diff < env.lo - slack || diff > env.hi + slack) ++metrics.envelope_violations;
    }
    metrics.err_over_eps = metrics.max_err / appr.fam.epsilon;
    return metrics;
}

} // namespace sps
