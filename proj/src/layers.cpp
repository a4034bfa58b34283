#include "sps/layers.hpp"

#include "sps/numerics.hpp"

#include <cmath>

namespace sps {

namespace {

// zeta and psi share the exponential decay chi; zeta_hat uses chi_hat.
// The product forms below follow from
//   zeta     = 4A sinh(sY/2) cosh(s(t - (b+gamma)/2)) / D
//   zeta_hat = 4B sinh(sZ/2) cosh(s(t - (a+gamma)/2)) / D
//   D        = 8 sinh(sX/2) sinh(sY/2) sinh(sZ/2)
// after cancelling the common sinh factor.

double zeta_mantissa(const LayerFamily& fam, double t, bool derivative)
{
    double arg = fam.s * std::fabs(t - fam.mid_right);
    double mant = derivative ? sinh_mant(arg) : cosh_mant(arg);
    return 0.5 * mant / (fam.mant_x2 * fam.mant_z2);
}

double zeta_hat_mantissa(const LayerFamily& fam, double t, bool derivative)
{
    double arg = fam.s * std::fabs(t - fam.mid_left);
    double mant = derivative ? sinh_mant(arg) : cosh_mant(arg);
    return 0.5 * mant / (fam.mant_x2 * fam.mant_y2);
}

} // namespace

LayerFamily make_layer_family(double a, double gamma, double b, double m, double epsilon,
                              double A, double B)
{
    if (!(a < gamma && gamma < b))
        throw ValidationError("layer geometry requires a < gamma < b");
    if (!(m > 0.0)) throw ValidationError("m must be positive");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (B < 0.0) throw ValidationError("B must be nonnegative");
    LayerFamily fam;
    fam.a = a;
    fam.gamma = gamma;
    fam.b = b;
    fam.m = m;
    fam.epsilon = epsilon;
    fam.s = std::sqrt(m / epsilon);
    fam.A = A;
    fam.B = B;
    fam.Y = b - gamma;
    fam.Z = gamma - a;
    fam.X = fam.Y + fam.Z;
    fam.mid_right = 0.5 * (b + gamma);
    fam.mid_left = 0.5 * (a + gamma);
    fam.mant_x2 = sinh_mant(0.5 * fam.s * fam.X);
    fam.mant_y2 = sinh_mant(0.5 * fam.s * fam.Y);
    fam.mant_z2 = sinh_mant(0.5 * fam.s * fam.Z);
    return fam;
}

LayerFamily make_layer_family(const Problem& p, const ReducedPath& path)
{
    double A = path.eta(p.gamma) - path.eta(p.a);
    double B = std::fabs(path.eta(p.b) - path.eta(p.gamma));
    return make_layer_family(p.a, p.gamma, p.b, p.m(), p.epsilon, A, B);
}

BigD big_d(const LayerFamily& fam)
{
    BigD d;
    d.scaled = 8.0 * fam.mant_x2 * fam.mant_y2 * fam.mant_z2;
    d.raw = 8.0 * std::sinh(0.5 * fam.s * fam.X) * std::sinh(0.5 * fam.s * fam.Y) *
            std::sinh(0.5 * fam.s * fam.Z);
    return d;
}

double chi(const LayerFamily& fam, double t)
{
    return t <= fam.mid_right ? fam.a - t : (fam.a - fam.gamma) - (fam.b - t);
}

double chi_hat(const LayerFamily& fam, double t)
{
    return t >= fam.mid_left ? t - fam.b : (fam.gamma - fam.b) + (fam.a - t);
}

double zeta(const LayerFamily& fam, double t)
{
    if (fam.A == 0.0) return 0.0;
    return fam.A * zeta_mantissa(fam, t, false) * std::exp(fam.s * chi(fam, t));
}

double zeta_d(const LayerFamily& fam, double t)
{
    if (fam.A == 0.0) return 0.0;
    double sign = t >= fam.mid_right ? 1.0 : -1.0;
    return sign * fam.A * fam.s * zeta_mantissa(fam, t, true) * std::exp(fam.s * chi(fam, t));
}

double zeta_dd(const LayerFamily& fam, double t)
{
    return fam.s * fam.s * zeta(fam, t);
}

double zeta_hat(const LayerFamily& fam, double t)
{
    if (fam.B == 0.0) return 0.0;
    return fam.B * zeta_hat_mantissa(fam, t, false) * std::exp(fam.s * chi_hat(fam, t));
}

double zeta_hat_d(const LayerFamily& fam, double t)
{
    if (fam.B == 0.0) return 0.0;
    double sign = t >= fam.mid_left ? 1.0 : -1.0;
    return sign * fam.B * fam.s * zeta_hat_mantissa(fam, t, true) * std::exp(fam.s * chi_hat(fam, t));
}

double zeta_hat_dd(const LayerFamily& fam, double t)
{
    return fam.s * fam.s * zeta_hat(fam, t);
}

double psi(const LayerFamily& fam, double lambda, double t)
{
    if (fam.A == 0.0) return 0.0;
    double sign = fam.mid_right >= t ? 1.0 : -1.0;
    double coeff = lambda * std::fabs(fam.A) * t / std::sqrt(fam.m * fam.epsilon);
    return sign * coeff * zeta_mantissa(fam, t, true) * std::exp(fam.s * chi(fam, t));
}

double v_corr(const LayerFamily& fam, double lambda, double t)
{
    double psi_a = psi(fam, lambda, fam.a);
    double psi_g = psi(fam, lambda, fam.gamma);
    double psi_b = psi(fam, lambda, fam.b);
    double v = psi(fam, lambda, t);
    if (fam.A != 0.0) v += -(psi_a - psi_g) / fam.A * zeta(fam, t);
    if (fam.B != 0.0) v += (psi_g - psi_b) / fam.B * zeta_hat(fam, t);
    return v;
}

DecayBound decay_bound(const LayerFamily& fam, double t)
{
    DecayBound bound;
    bound.bound_zeta = kDecayEnvelopeK * std::fabs(fam.A) * std::exp(fam.s * chi(fam, t));
    bound.bound_zeta_hat = kDecayEnvelopeK * fam.B * std::exp(fam.s * chi_hat(fam, t));
    return bound;
}

} // namespace sps
