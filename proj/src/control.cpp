#include "sps/control.hpp"

#include "sps/numerics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sps {

namespace {

constexpr int kGridPoints = 2001;

double json_num(const nlohmann::json& doc, const char* key)
{
    if (!doc.contains(key) || !doc[key].is_number())
        throw ValidationError(std::string("missing numeric field '") + key + "'");
    return doc[key].get<double>();
}

bool is_identity(const Expr& g)
{
    return same_tree(g, parse_expr("y", {"y"}));
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

SemilinearPlant load_plant(const nlohmann::json& doc)
{
    SemilinearPlant plant;
    plant.k = json_num(doc, "k");
    plant.lambda = json_num(doc, "lambda");
    plant.a = json_num(doc, "a");
    plant.gamma = json_num(doc, "gamma");
    plant.b = json_num(doc, "b");
    if (doc.contains("delta")) plant.delta = json_num(doc, "delta");
    if (!doc.contains("f") || !doc["f"].is_string())
        throw ValidationError("missing expression field 'f'");
    plant.f = parse_expr(doc["f"].get<std::string>(), {"y"});
    plant.g = doc.contains("g") ? parse_expr(doc["g"].get<std::string>(), {"y"})
                                : parse_expr("y", {"y"});
    if (doc.contains("g_inv")) plant.g_inv = parse_expr(doc["g_inv"].get<std::string>(), {"v"});

    if (!(plant.k < 0.0)) throw ValidationError("k must be negative");
    if (!(plant.lambda > 0.0 && plant.lambda < -plant.k))
        throw ValidationError("lambda must lie in (0, -k)");
    if (!(plant.a < plant.gamma && plant.gamma < plant.b))
        throw ValidationError("interval ordering violated: require a < gamma < b");

    // Sampled checks, non-exhaustive: g strictly monotone, |f'| <= lambda.
    Expr g_d = diff(plant.g, "y");
    Expr f_d = diff(plant.f, "y");
    double sign = 0.0;
    for (int i = 0; i < 201; ++i) {
        double y = -10.0 + 20.0 * i / 200;
        double gd = g_d(y);
        if (gd == 0.0 || (sign != 0.0 && (gd > 0.0) != (sign > 0.0)))
            throw ValidationError("g is not strictly monotone on the sampled range");
        sign = gd;
    }
    for (int i = 0; i < kGridPoints; ++i) {
        double y = -50.0 + 100.0 * i / (kGridPoints - 1);
        if (std::fabs(f_d(y)) > plant.lambda)
            throw ValidationError("|f'(y)| exceeds lambda on the sampled range");
    }
    return plant;
}

SemilinearPlant load_plant_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open plant file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid JSON in '" + path + "': " + e.what());
    }
    return load_plant(doc);
}

double g_inverse(const SemilinearPlant& plant, double v, double bracket_lo, double bracket_hi)
{
    if (plant.g_inv) return (*plant.g_inv)(v);
    if (is_identity(plant.g)) return v;
    Expr g = plant.g;
    Expr g_d = diff(plant.g, "y");
    auto fn = [g, v](double y) { return g(y) - v; };
    std::function<double(double)> dfn = [g_d](double y) { return g_d(y); };
    double flo = fn(bracket_lo), fhi = fn(bracket_hi);
    if ((flo < 0.0) == (fhi < 0.0))
        throw ValidationError("g_inverse: value outside the bracketed range of g");
    return bracketed_root(fn, bracket_lo, bracket_hi, 1e-13, &dfn).x;
}

InputSynthesis synthesize_input(const SemilinearPlant& plant, const Expr& v0)
{
    InputSynthesis synth;
    const bool symbolic = plant.g_inv.has_value() || is_identity(plant.g);

    if (symbolic) {
        Expr eta0 = plant.g_inv ? substitute(*plant.g_inv, "v", v0, {"t"})
                                : substitute(parse_expr("v", {"v"}), "v", v0, {"t"});
        Expr f_of_eta0 = substitute(plant.f, "y", eta0, {"t"});
        Expr u0 = parse_expr(
            fmt(plant.k) + "*(" + to_string(eta0) + ") - (" + to_string(f_of_eta0) + ")", {"t"});
        Expr eta0_dd = diff(diff(eta0, "t"), "t");
        synth.eta0 = [eta0](double t) { return eta0(t); };
        synth.u0 = [u0](double t) { return u0(t); };
        synth.eta0_dd = [eta0_dd](double t) { return eta0_dd(t); };
        synth.eta0_expr = eta0;
        synth.u0_expr = u0;
    } else {
        SemilinearPlant p = plant;
        Expr v0c = v0;
        auto eta0 = [p, v0c](double t) { return g_inverse(p, v0c(t)); };
        Expr f = plant.f;
        double k = plant.k;
        synth.eta0 = eta0;
        synth.u0 = [k, f, eta0](double t) {
            double e = eta0(t);
            return k * e - f(e);
        };
        synth.eta0_dd = [eta0](double t) {
            double h = 1e-5 * (1.0 + std::fabs(t));
            return (eta0(t + h) - 2.0 * eta0(t) + eta0(t - h)) / (h * h);
        };
    }

    for (int i = 0; i < kGridPoints; ++i) {
        double t = plant.a + (plant.b - plant.a) * i / (kGridPoints - 1);
        synth.max_abs_eta0_dd = std::max(synth.max_abs_eta0_dd, std::fabs(synth.eta0_dd(t)));
    }
    return synth;
}

OutputBound output_error_bound(const SemilinearPlant& plant, const InputSynthesis& synth,
                               double epsilon)
{
    OutputBound out;
    out.m = plant.m();
    out.max_abs_eta0_dd = synth.max_abs_eta0_dd;

    // mu = max |g'| over the tube around eta0, same width policy as the
    // feasibility tube.
    Expr g_d = diff(plant.g, "y");
    double eta_a = synth.eta0(plant.a);
    double eta_g = synth.eta0(plant.gamma);
    double eta_b = synth.eta0(plant.b);
    double delta = plant.delta;
    double wl = std::fabs(eta_g - eta_a) + delta;
    double wr = std::fabs(eta_b - eta_g) + delta;
    auto ramp = [delta](double w, double dist) {
        if (dist <= 0.5 * delta) return w;
        if (dist >= delta) return delta;
        return w + (delta - w) * (dist - 0.5 * delta) / (0.5 * delta);
    };
    const int ny = 201;
    for (int i = 0; i < kGridPoints; ++i) {
        double t = plant.a + (plant.b - plant.a) * i / (kGridPoints - 1);
        double width = std::max({delta, ramp(wl, t - plant.a), ramp(wr, plant.b - t)});
        double center = synth.eta0(t);
        for (int j = 0; j < ny; ++j) {
            double y = center - width + 2.0 * width * j / (ny - 1);
            out.mu = std::max(out.mu, std::fabs(g_d(y)));
        }
    }
    out.bound = out.mu * (epsilon / out.m) * out.max_abs_eta0_dd;
    return out;
}

} // namespace sps
