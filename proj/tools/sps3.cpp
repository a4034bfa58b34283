#include "sps/approximation.hpp"
#include "sps/autonomous.hpp"
#include "sps/control.hpp"
#include "sps/layers.hpp"
#include "sps/numerics.hpp"
#include "sps/output.hpp"
#include "sps/problem.hpp"
#include "sps/quadratic.hpp"
#include "sps/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct RunConfig {
    std::string problem_file;
    std::optional<double> eps;
    std::vector<double> eps_ladder;
    int N = 512;
    int grid = 1001;
    std::string out_dir = ".";
    std::optional<double> lambda_override;
    std::optional<double> delta_override;
    std::optional<double> gamma_override;
    std::string v0;
};

std::string eps_tag(double eps)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", eps);
    return buf;
}

std::vector<double> resolve_ladder(const RunConfig& cfg, double fallback)
{
    if (!cfg.eps_ladder.empty()) {
        for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
            if (!(cfg.eps_ladder[i] > 0.0))
                throw sps::ValidationError("ladder entries must be positive");
            if (i && !(cfg.eps_ladder[i] < cfg.eps_ladder[i - 1]))
                throw sps::ValidationError("ladder entries must be strictly decreasing");
        }
        return cfg.eps_ladder;
    }
    return {cfg.eps.value_or(fallback)};
}

sps::Problem load_with_overrides(const RunConfig& cfg)
{
    sps::Problem p = sps::load_problem_file(cfg.problem_file);
    if (cfg.lambda_override) {
        p.lambda = *cfg.lambda_override;
        if (!(p.lambda > 0.0 && p.lambda < -p.k))
            throw sps::ValidationError("lambda must lie in (0, -k)");
    }
    if (cfg.delta_override) {
        p.delta = *cfg.delta_override;
        if (!(p.delta > 0.0)) throw sps::ValidationError("delta must be positive");
    }
    return p;
}

std::string out_path(const RunConfig& cfg, const std::string& name)
{
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

const std::vector<std::string> kLayerHeader = {"t",   "eta",    "zeta",   "zeta_hat",
                                               "psi", "v_corr", "y_tilde"};
const std::vector<std::string> kSolveHeader = {"t",       "eta",   "zeta",  "zeta_hat", "psi",
                                               "v_corr",  "y_tilde", "y_ref", "w_ref",  "err"};

std::vector<double> layer_row(const sps::Approximation& appr, const sps::ReducedPath& path,
                              double t)
{
    return {t,
            path.eta(t),
            sps::zeta(appr.fam, t),
            sps::zeta_hat(appr.fam, t),
            sps::psi(appr.fam, appr.lambda, t),
            sps::v_corr(appr.fam, appr.lambda, t),
            sps::y_tilde(appr, t)};
}

void write_json(const std::string& path, const json& doc)
{
    sps::write_text_atomic(path, doc.dump(2) + "\n");
}

int cmd_layer_like(const RunConfig& cfg, bool with_metrics, const char* stem)
{
    sps::Problem p = load_with_overrides(cfg);
    sps::ReducedPath path = sps::build_reduced_path(p);
    sps::A2Report a2 = sps::verify_A2(p, path);
    if (!a2.pass) {
        std::fprintf(stderr, "A2 fails on the tube: max |df/dy| = %.6g > lambda = %.6g\n",
                     a2.max_abs_df_dy, p.lambda);
        return 2;
    }
    json ladder_doc;
    ladder_doc["rows"] = json::array();
    for (double eps : resolve_ladder(cfg, p.epsilon)) {
        p.epsilon = eps;
        sps::Approximation appr = sps::make_approximation(p, path);
        std::vector<std::vector<double>> rows;
        rows.reserve(static_cast<std::size_t>(cfg.grid));
        for (int i = 0; i < cfg.grid; ++i) {
            double t = p.a + (p.b - p.a) * i / (cfg.grid - 1);
            rows.push_back(layer_row(appr, path, t));
        }
        sps::write_text_atomic(out_path(cfg, std::string(stem) + "_" + eps_tag(eps) + ".csv"),
                               sps::make_csv(kLayerHeader, rows));
        if (with_metrics) {
            // min_v reports the empirical sign of the correction function;
            // positivity is claimed, not guaranteed, so it is surfaced here.
            double max_abs_v = 0.0, min_v = 0.0;
            for (int i = 0; i < cfg.grid; ++i) {
                double t = p.a + (p.b - p.a) * i / (cfg.grid - 1);
                double v = sps::v_corr(appr.fam, appr.lambda, t);
                max_abs_v = std::max(max_abs_v, std::fabs(v));
                min_v = std::min(min_v, v);
            }
            json row;
            row["eps"] = eps;
            row["case_id"] = appr.case_id;
            row["C"] = appr.C;
            row["ytilde_a_minus_eta_gamma"] = sps::y_tilde(appr, p.a) - path.eta(p.gamma);
            row["max_abs_v"] = max_abs_v;
            row["min_v"] = min_v;
            ladder_doc["rows"].push_back(row);
        }
    }
    if (with_metrics) write_json(out_path(cfg, std::string(stem) + "_ladder.json"), ladder_doc);
    return 0;
}

int cmd_solve_like(const RunConfig& cfg, bool with_metrics, const char* stem)
{
    sps::Problem p = load_with_overrides(cfg);
    {
        sps::ReducedPath path = sps::build_reduced_path(p);
        sps::A2Report a2 = sps::verify_A2(p, path);
        if (!a2.pass) {
            std::fprintf(stderr, "A2 fails on the tube: max |df/dy| = %.6g > lambda = %.6g\n",
                         a2.max_abs_df_dy, p.lambda);
            return 2;
        }
    }
    json ladder_doc;
    ladder_doc["rows"] = json::array();
    std::vector<double> ladder = resolve_ladder(cfg, p.epsilon);
    std::vector<double> max_errs;
    for (double eps : ladder) {
        p.epsilon = eps;
        sps::ProblemSolve run = sps::solve_problem(p, cfg.N);
        sps::ReducedPath path = sps::build_reduced_path(p);
        std::vector<std::vector<double>> rows;
        rows.reserve(run.sol.mesh.nodes.size());
        for (std::size_t i = 0; i < run.sol.mesh.nodes.size(); ++i) {
            double t = run.sol.mesh.nodes[i];
            auto row = layer_row(run.appr, path, t);
            row.push_back(run.sol.y[i]);
            row.push_back(run.sol.w[i]);
            row.push_back(run.sol.y[i] - sps::y_tilde(run.appr, t));
            rows.push_back(std::move(row));
        }
        sps::write_text_atomic(out_path(cfg, std::string(stem) + "_" + eps_tag(eps) + ".csv"),
                               sps::make_csv(kSolveHeader, rows));
        if (with_metrics) {
            double slack = sps::default_envelope_slack(run.sol);
            sps::CompareMetrics metrics = sps::compare(run.sol, run.appr, slack);
            max_errs.push_back(metrics.max_err);
            json mj;
            mj["eps"] = eps;
            mj["N"] = cfg.N;
            mj["max_err"] = metrics.max_err;
            mj["interior_max_err"] = metrics.interior_max_err;
            mj["err_over_eps"] = metrics.err_over_eps;
            mj["envelope_violations"] = metrics.envelope_violations;
            mj["case_id"] = metrics.case_id;
            mj["slack"] = slack;
            mj["newton_iters"] = run.sol.newton_iters;
            mj["bc_residual"] = run.sol.bc_residual;
            mj["left_tube"] = run.sol.left_tube;
            write_json(out_path(cfg, std::string(stem) + "_" + eps_tag(eps) + ".json"), mj);
            ladder_doc["rows"].push_back(mj);
        }
    }
    if (with_metrics && ladder.size() > 1) {
        json ratios = json::array();
        for (std::size_t i = 1; i < max_errs.size(); ++i)
            ratios.push_back(max_errs[i] / max_errs[i - 1]);
        ladder_doc["max_err_ratios"] = ratios;
        write_json(out_path(cfg, std::string(stem) + "_ladder.json"), ladder_doc);
    }
    return 0;
}

int cmd_check_quadratic(const RunConfig& cfg)
{
    sps::Problem p = load_with_overrides(cfg);
    sps::QuadraticInstance inst = sps::make_quadratic(p);
    json doc;
    auto interval = sps::lambda_interval(inst);
    if (interval) {
        doc["interval"] = {interval->first, interval->second};
    } else {
        doc["interval"] = nullptr;
    }
    if (cfg.lambda_override) {
        sps::ConditionsReport rep = sps::check_conditions(inst, *cfg.lambda_override);
        json cj;
        for (int i = 0; i < 5; ++i) {
            json c;
            c["pass"] = rep.pass[static_cast<std::size_t>(i)];
            c["margin"] = rep.margin[static_cast<std::size_t>(i)];
            cj["c" + std::to_string(i + 1)] = c;
        }
        cj["all_pass"] = rep.all_pass;
        doc["lambda"] = *cfg.lambda_override;
        doc["conditions"] = cj;
    }
    std::cout << doc.dump(2) << "\n";
    if (cfg.out_dir != ".") write_json(out_path(cfg, "check_quadratic.json"), doc);
    return 0;
}

int cmd_control(const RunConfig& cfg)
{
    sps::SemilinearPlant plant = sps::load_plant_file(cfg.problem_file);
    if (cfg.v0.empty()) throw sps::ValidationError("--v0 expression is required");
    sps::Expr v0 = sps::parse_expr(cfg.v0, {"t"});
    sps::InputSynthesis synth = sps::synthesize_input(plant, v0);
    double eps = cfg.eps.value_or(1e-2);
    sps::OutputBound bound = sps::output_error_bound(plant, synth, eps);

    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(cfg.grid));
    for (int i = 0; i < cfg.grid; ++i) {
        double t = plant.a + (plant.b - plant.a) * i / (cfg.grid - 1);
        rows.push_back({t, v0(t), synth.eta0(t), synth.u0(t)});
    }
    sps::write_text_atomic(out_path(cfg, "u0_" + eps_tag(eps) + ".csv"),
                           sps::make_csv({"t", "v0", "eta0", "u0"}, rows));
    json doc;
    doc["eps"] = eps;
    doc["mu"] = bound.mu;
    doc["m"] = bound.m;
    doc["max_abs_eta0_dd"] = bound.max_abs_eta0_dd;
    doc["bound"] = bound.bound;
    if (synth.u0_expr) doc["u0"] = sps::to_string(*synth.u0_expr);
    if (synth.eta0_expr) doc["eta0"] = sps::to_string(*synth.eta0_expr);
    write_json(out_path(cfg, "control_" + eps_tag(eps) + ".json"), doc);
    return 0;
}

int cmd_turning(const RunConfig& cfg)
{
    std::ifstream in(cfg.problem_file);
    if (!in) throw sps::ValidationError("cannot open file '" + cfg.problem_file + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw sps::ValidationError(std::string("invalid JSON: ") + e.what());
    }
    double y0 = doc.contains("y0") ? doc["y0"].get<double>() : 0.0;
    double gamma = cfg.gamma_override.value_or(doc.contains("gamma") ? doc["gamma"].get<double>() : 0.25);
    double b = doc.contains("b") ? doc["b"].get<double>() : 2.0 * gamma;
    double doc_eps = doc.contains("epsilon") ? doc["epsilon"].get<double>() : 1e-2;
    std::vector<double> ladder = resolve_ladder(cfg, doc_eps);

    json report;
    report["gamma"] = gamma;
    report["half_gamma"] = 0.5 * gamma;
    report["rows"] = json::array();

    if (doc.contains("f") && doc.contains("controls")) {
        // Scan mode: nonautonomous f(u(t), y) over a list of controls.
        sps::Expr f = sps::parse_expr(doc["f"].get<std::string>(), {"u", "y"});
        std::vector<sps::Expr> controls;
        for (const auto& c : doc["controls"])
            controls.push_back(sps::parse_expr(c.get<std::string>(), {"t"}));
        auto rows = sps::turning_scan(f, controls, ladder, y0, gamma, b);
        for (std::size_t idx = 0; idx < rows.size(); ++idx) {
            const auto& r = rows[idx];
            json rj;
            rj["control"] = r.control;
            rj["eps"] = r.epsilon;
            rj["ok"] = r.ok;
            if (r.ok) {
                rj["y1"] = r.y1;
                rj["t_star"] = r.t_star;
                rj["drift_from_half_gamma"] = r.drift_from_half_gamma;
                std::vector<std::vector<double>> traj_rows;
                traj_rows.reserve(r.trajectory.t.size());
                for (std::size_t i = 0; i < r.trajectory.t.size(); ++i)
                    traj_rows.push_back(
                        {r.trajectory.t[i], r.trajectory.y[i], r.trajectory.w[i]});
                std::string name = "turning_scan_c" + std::to_string(idx / ladder.size()) + "_" +
                                   eps_tag(r.epsilon) + ".csv";
                sps::write_text_atomic(out_path(cfg, name),
                                       sps::make_csv({"t", "y", "w"}, traj_rows));
                rj["trajectory_csv"] = name;
            } else {
                rj["error"] = r.error;
            }
            report["rows"].push_back(rj);
        }
        write_json(out_path(cfg, "turning_report.json"), report);
        return 0;
    }

    if (!doc.contains("f_tilde")) throw sps::ValidationError("missing 'f_tilde' (or 'f' + 'controls')");
    sps::Expr f_tilde = sps::parse_expr(doc["f_tilde"].get<std::string>(), {"y"});

    for (double eps : ladder) {
        sps::AutonomousProblem ap =
            sps::make_autonomous(f_tilde, y0, doc.contains("y1") ? doc["y1"].get<double>() : 1.0,
                                 gamma, b, eps);
        json row;
        row["eps"] = eps;
        if (!doc.contains("y1")) {
            sps::ShootResult shot = sps::shoot_bc(ap, gamma);
            ap.y1 = shot.y1;
            row["y1"] = shot.y1;
            row["t_star"] = shot.t_star;
        } else {
            row["y1"] = ap.y1;
            row["t_star"] = sps::turning_time(ap, sps::make_energy(ap));
        }
        if (ap.exp_form) row["t_star_closed_form"] = sps::exp_turning_time(ap);
        sps::Trajectory traj = sps::integrate_autonomous(ap, gamma);
        auto turn = sps::first_turning(traj);
        if (turn) row["t_star_trajectory"] = *turn;
        std::vector<std::vector<double>> rows;
        rows.reserve(traj.t.size());
        for (std::size_t i = 0; i < traj.t.size(); ++i)
            rows.push_back({traj.t[i], traj.y[i], traj.w[i]});
        sps::write_text_atomic(out_path(cfg, "turning_" + eps_tag(eps) + ".csv"),
                               sps::make_csv({"t", "y", "w"}, rows));
        report["rows"].push_back(row);
    }
    write_json(out_path(cfg, "turning_report.json"), report);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Boundary-layer toolkit for singularly perturbed three-point BVPs"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string command;

    auto add_common = [&](CLI::App* sub, bool needs_problem) {
        if (needs_problem)
            sub->add_option("problem", cfg.problem_file, "problem JSON file")->required();
        sub->add_option("--eps", cfg.eps, "perturbation parameter");
        sub->add_option("--eps-ladder", cfg.eps_ladder,
                        "comma-separated decreasing epsilon ladder")
            ->delimiter(',');
        sub->add_option("--N", cfg.N, "mesh size (>= 64, divisible by 4)");
        sub->add_option("--grid", cfg.grid, "emission grid points");
        sub->add_option("--out-dir", cfg.out_dir, "output directory");
        sub->add_option("--lambda", cfg.lambda_override, "override lambda");
        sub->add_option("--delta", cfg.delta_override, "override tube delta");
        sub->add_option("--gamma", cfg.gamma_override, "override sensor point gamma");
        sub->add_option("--v0", cfg.v0, "desired output expression in t");
    };

    for (const char* name : {"layers", "approx", "solve", "compare", "check-quadratic",
                             "control", "turning"}) {
        CLI::App* sub = app.add_subcommand(name, "");
        add_common(sub, true);
        sub->callback([&command, name]() { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (command == "layers") return cmd_layer_like(cfg, false, "layers");
        if (command == "approx") return cmd_layer_like(cfg, true, "approx");
        if (command == "solve") return cmd_solve_like(cfg, false, "solve");
        if (command == "compare") return cmd_solve_like(cfg, true, "compare");
        if (command == "check-quadratic") return cmd_check_quadratic(cfg);
        if (command == "control") return cmd_control(cfg);
        if (command == "turning") return cmd_turning(cfg);
        std::fprintf(stderr, "unknown command\n");
        return 2;
    } catch (const sps::ValidationError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const sps::ParseError& e) {
        std::fprintf(stderr, "expression error at offset %zu: %s\n", e.pos, e.what());
        return 2;
    } catch (const sps::EvalError& e) {
        std::fprintf(stderr, "evaluation error: %s\n", e.what());
        return 2;
    } catch (const sps::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
