#pragma once

#include "sps/layers.hpp"

namespace sps {

// Closed-form approximate realization
//   y~ = eta + zeta + zeta_hat + C*eps    (eta(b) - eta(gamma) <= 0)
//   y~ = eta + zeta - zeta_hat - C*eps    (eta(b) - eta(gamma) >  0)
// with C = max|eta''| / m. Satisfies y~(a) = y~(gamma) = y~(b) for every eps.
struct Approximation {
    LayerFamily fam;
    double lambda = 0.0;
    double C = 0.0;
    double branch = 0.0;  // sign source: eta(b) - eta(gamma)
    int case_id = 1;      // sign pattern of (eta(b)-eta(gamma), eta(gamma)-eta(a))
    std::function<double(double)> eta;
    std::function<double(double)> eta_d;

    bool plus_branch() const { return branch <= 0.0; }
};

Approximation make_approximation(const Problem& p, const ReducedPath& path);

double y_tilde(const Approximation& appr, double t);
double w_tilde(const Approximation& appr, double t);

// Bounds on  y~(t) - y(t)  for the exact realization y, by sign case:
//   case 1 (<=, <=):  -v           <= y~ - y <= 2 zeta_hat + 2 C eps
//   case 2 (>=, >=):  -(2zh+2Ceps) <= y~ - y <= v
//   case 3 (<=, >=):   0           <= y~ - y <= v + 2 zeta_hat + 2 C eps
//   case 4 (>=, <=):  -(v+2zh+2Ce) <= y~ - y <= 0
struct Envelope {
    double lo = 0.0;
    double hi = 0.0;
};

Envelope envelope(const Approximation& appr, double t);

} // namespace sps
