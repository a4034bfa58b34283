#pragma once

#include "sps/expr.hpp"
#include "sps/numerics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sps {

// Autonomous problem  eps*y'' + f~(y)/2 = 0,  y(0) = y0,  y'(0) = y1 > 0,
// with f~ > 0 (the reduced equation is rootless). The trajectory rises to a
// single turning point t* and falls back; y(0) = y(gamma) forces t* = gamma/2.
struct AutonomousProblem {
    Expr f_tilde;          // in (y)
    bool exp_form = false; // f~ is literally exp(y)
    double y0 = 0.0;
    double y1 = 1.0;
    double gamma = 0.25;
    double b = 0.5;
    double epsilon = 1e-2;
};

AutonomousProblem make_autonomous(Expr f_tilde, double y0, double y1, double gamma, double b,
                                  double epsilon);

// Energy machinery: F is the antiderivative of f~ anchored at F(y0) = 0
// (exact form e^y when f~ = exp(y)); F_inv the monotone inverse;
// c1 = eps*y1^2 + F(y0).
struct EnergyFunctional {
    std::function<double(double)> F;
    std::function<double(double)> F_inv;
    double c1 = 0.0;
    bool exp_form = false;
};

EnergyFunctional make_energy(const AutonomousProblem& ap);

// eps*yp^2 + F(y); constant (= c1) along trajectories.
double first_integral(const AutonomousProblem& ap, const EnergyFunctional& energy, double y,
                      double yp);

// t* = 2 sqrt(eps) * int_0^{sqrt(eps) y1} dz / f~(F^-1(F(y0) + eps y1^2 - z^2))
// by adaptive Gauss-Kronrod quadrature (rel tol 1e-10).
double turning_time(const AutonomousProblem& ap, const EnergyFunctional& energy);

// Closed forms for f~ = exp(y):
//   y(t) = ln c1 - 2 ln cosh( sqrt(c1/eps) (t + c2) / 2 ),
//   c2 = -sqrt(eps/c1) ln( (sqrt(c1) + sqrt(eps) y1) / (sqrt(c1) - sqrt(eps) y1) ),
//   t* = -c2.
double exp_turning_time(const AutonomousProblem& ap);
double exp_exact_solution(const AutonomousProblem& ap, double t);

// Fixed-step RK4 of the IVP up to t_end (h = min(sqrt(eps), gamma)/200).
Trajectory integrate_autonomous(const AutonomousProblem& ap, double t_end);

struct ShootResult {
    double y1 = 0.0;     // slope achieving y(0) = y(gamma)
    double t_star = 0.0; // turning time for that slope
    int iterations = 0;
};

// Finds y1 > 0 with y(0) = y(gamma) by bracketed bisection on the slope
// (closed-form trajectory for the exp case, RK4 otherwise).
ShootResult shoot_bc(const AutonomousProblem& ap_template, double gamma);

// Exploratory harness for nonautonomous f~(u(t), y): records where the
// turning point lands for each control and epsilon. Draws no conclusions.
struct ScanRow {
    std::string control;
    double epsilon = 0.0;
    bool ok = false;
    std::string error;
    double y1 = 0.0;
    double t_star = 0.0;
    double drift_from_half_gamma = 0.0;
    Trajectory trajectory;  // the shot trajectory on [0, gamma]
};

std::vector<ScanRow> turning_scan(const Expr& f_uy, const std::vector<Expr>& controls,
                                  const std::vector<double>& eps_ladder, double y0, double gamma,
                                  double b);

} // namespace sps
