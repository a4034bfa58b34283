#include "sps/approximation.hpp"

namespace sps {

Approximation make_approximation(const Problem& p, const ReducedPath& path)
{
    Approximation appr;
    appr.fam = make_layer_family(p, path);
    appr.lambda = p.lambda;
    appr.C = path.max_abs_eta_dd / p.m();
    appr.branch = path.eta(p.b) - path.eta(p.gamma);
    double s2 = appr.fam.A;
    if (appr.branch <= 0.0 && s2 <= 0.0)
        appr.case_id = 1;
    else if (appr.branch >= 0.0 && s2 >= 0.0)
        appr.case_id = 2;
    else if (appr.branch <= 0.0)
        appr.case_id = 3;
    else
        appr.case_id = 4;
    appr.eta = path.eta;
    appr.eta_d = path.eta_d;
    return appr;
}

double y_tilde(const Approximation& appr, double t)
{
    double shift = appr.C * appr.fam.epsilon;
    double z = zeta(appr.fam, t);
    double zh = zeta_hat(appr.fam, t);
    return appr.plus_branch() ? appr.eta(t) + z + zh + shift : appr.eta(t) + z - zh - shift;
}

double w_tilde(const Approximation& appr, double t)
{
    double z = zeta_d(appr.fam, t);
    double zh = zeta_hat_d(appr.fam, t);
    return appr.plus_branch() ? appr.eta_d(t) + z + zh : appr.eta_d(t) + z - zh;
}

Envelope envelope(const Approximation& appr, double t)
{
    double v = v_corr(appr.fam, appr.lambda, t);
    double width = 2.0 * zeta_hat(appr.fam, t) + 2.0 * appr.C * appr.fam.epsilon;
    switch (appr.case_id) {
        case 1: return {-v, width};
        case 2: return {-width, v};
        case 3: return {0.0, v + width};
        default: return {-(v + width), 0.0};
    }
}

} // namespace sps
