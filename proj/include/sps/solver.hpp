#pragma once

#include "sps/approximation.hpp"
#include "sps/problem.hpp"

#include <functional>
#include <vector>

namespace sps {

// Piecewise-uniform mesh with N/4 cells in each layer region of width
// tau = min((b-a)/4, 2 sqrt(eps/m) ln N) and N/2 cells across the middle.
// gamma is snapped in as a node (nearest interior node replaced).
struct LayerMesh {
    std::vector<double> nodes;
    double tau_a = 0.0;
    double tau_b = 0.0;
    int gamma_index = -1;
};

LayerMesh shishkin_mesh(double a, double gamma, double b, double epsilon, double m, int N);

// Discretized instance of  eps*y'' + k*y = rhs(t, y),  y(a) = y(gamma) = y(b).
struct Bvp3System {
    double a = 0.0, gamma = 0.5, b = 1.0;
    double k = -1.0;
    double epsilon = 1e-2;
    std::function<double(double, double)> rhs;
    std::function<double(double, double)> rhs_dy;
};

Bvp3System make_system(const Problem& p);

struct SolverOptions {
    int max_newton = 50;
    int max_halvings = 30;
    double tol = 1e-10;  // converged when max|F| <= tol * (1 + max|y|)
    std::function<double(double)> tube_eta;  // optional tube membership check
    std::function<double(double)> tube_d;
};

struct DiscreteSolution {
    LayerMesh mesh;
    std::vector<double> y;
    std::vector<double> w;       // derivative estimates, second order
    int newton_iters = 0;
    double residual_norm = 0.0;
    double bc_residual = 0.0;
    double tolerance = 0.0;      // realized convergence threshold
    bool left_tube = false;      // some iterate strayed outside H(eta)
};

// Damped Newton on the (N+1)-unknown system: second-difference rows at the
// interior nodes plus the two constraint rows y_0 = y_gamma = y_N.
// Throws NumericError on divergence.
DiscreteSolution solve_bvp3(const Bvp3System& sys, const LayerMesh& mesh,
                            const std::function<double(double)>& initial_guess,
                            const SolverOptions& opts = {});

struct ProblemSolve {
    DiscreteSolution sol;
    Approximation appr;
};

// Full pipeline: reduced path, approximation (initial iterate), mesh, solve.
ProblemSolve solve_problem(const Problem& p, int N);

struct CompareMetrics {
    double max_err = 0.0;
    double interior_max_err = 0.0;  // on [a + 0.1(b-a), b - 0.1(b-a)]
    double err_over_eps = 0.0;
    int envelope_violations = 0;
    int case_id = 0;
};

double default_envelope_slack(const DiscreteSolution& sol);

CompareMetrics compare(const DiscreteSolution& sol, const Approximation& appr, double slack);

} // namespace sps
