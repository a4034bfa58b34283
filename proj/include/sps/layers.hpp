#pragma once

#include "sps/problem.hpp"

namespace sps {

// Boundary layer functions for  eps*z'' - m*z = 0  carrying the three-point
// boundary mismatch. All evaluators factor every sinh/cosh into a mantissa
// in (0,1] and a common exponential shift; the shifts cancel algebraically,
// so nothing overflows even at eps = 1e-14 and the boundary identities
// (zeta(gamma)-zeta(a) = -A, zeta(b) = zeta(gamma), ...) hold to rounding.
struct LayerFamily {
    double a = 0.0, gamma = 0.5, b = 1.0;
    double m = 1.0;
    double epsilon = 1e-2;
    double s = 0.0;       // sqrt(m/epsilon), inverse layer width
    double A = 0.0;       // eta(gamma) - eta(a), signed
    double B = 0.0;       // |eta(b) - eta(gamma)|, nonnegative
    double X = 0.0;       // Y + Z
    double Y = 0.0;       // b - gamma
    double Z = 0.0;       // gamma - a
    double mid_right = 0.0;  // (b+gamma)/2, stationary point of zeta
    double mid_left = 0.0;   // (a+gamma)/2, stationary point of zeta_hat
    double mant_x2 = 0.0;    // sinh mantissas of s*X/2, s*Y/2, s*Z/2
    double mant_y2 = 0.0;
    double mant_z2 = 0.0;
};

LayerFamily make_layer_family(double a, double gamma, double b, double m, double epsilon,
                              double A, double B);
LayerFamily make_layer_family(const Problem& p, const ReducedPath& path);

struct BigD {
    double raw = 0.0;     // 8 sinh(sX/2) sinh(sY/2) sinh(sZ/2); +inf for large s
    double scaled = 0.0;  // D * exp(-s X), always finite and positive
};

BigD big_d(const LayerFamily& fam);

double zeta(const LayerFamily& fam, double t);
double zeta_d(const LayerFamily& fam, double t);
double zeta_dd(const LayerFamily& fam, double t);

double zeta_hat(const LayerFamily& fam, double t);
double zeta_hat_d(const LayerFamily& fam, double t);
double zeta_hat_dd(const LayerFamily& fam, double t);

double psi(const LayerFamily& fam, double lambda, double t);

// v(t) = -(psi(a)-psi(gamma))/A * zeta + (psi(gamma)-psi(b))/B * zeta_hat + psi.
// Terms with a vanishing amplitude (A = 0 or B = 0) are dropped.
double v_corr(const LayerFamily& fam, double lambda, double t);

// Piecewise-linear decay exponents; negative away from the owning endpoint.
double chi(const LayerFamily& fam, double t);
double chi_hat(const LayerFamily& fam, double t);

inline constexpr double kDecayEnvelopeK = 4.0;  // dominates O(1) factors for s(b-gamma) >= 1

struct DecayBound {
    double bound_zeta = 0.0;      // K |A| exp(s chi)
    double bound_zeta_hat = 0.0;  // K  B  exp(s chi_hat)
};

DecayBound decay_bound(const LayerFamily& fam, double t);

} // namespace sps
