// Command-line front end: plan design, plan evaluation, Monte Carlo
// campaigns, random baselines, comparison reports and the closed-form
// two-link reference.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <iostream>
#include <string>

#include "calib/analytic_2r.hpp"
#include "calib/design_metrics.hpp"
#include "calib/io.hpp"
#include "calib/monte_carlo.hpp"
#include "calib/plan_optimizer.hpp"

namespace {

using namespace calib;

constexpr std::uint64_t kPerturbStream = 0x70657274757262ull; // reserved stream id

// Angle values accept an explicit unit suffix: "20deg" or "0.35rad";
// unsuffixed values are radians.
double parse_angle(const std::string& tok) {
    std::string t = tok;
    double scale = 1.0;
    if (t.size() > 3 && t.compare(t.size() - 3, 3, "deg") == 0) {
        scale = M_PI / 180.0;
        t.resize(t.size() - 3);
    } else if (t.size() > 3 && t.compare(t.size() - 3, 3, "rad") == 0) {
        t.resize(t.size() - 3);
    }
    try {
        size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        return v * scale;
    } catch (const std::exception&) {
        throw InputError(fmt::format("cannot parse angle '{}'", tok));
    }
}

Configuration parse_pose(const std::string& spec, int n_joints) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (static_cast<int>(parts.size()) != n_joints)
        throw InputError(fmt::format("test pose has {} entries, model has {} joints",
                                     parts.size(), n_joints));
    Configuration q(n_joints);
    for (int j = 0; j < n_joints; ++j) q[j] = parse_angle(parts[j]);
    return q;
}

std::string num(double v) { return fmt::format("{:.12g}", v); }

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_file(out_path, text);
}

Vector perturbed_params(const KinematicModel& model, std::uint64_t seed) {
    RngStream rng(seed, kPerturbStream);
    Vector p = model.nominal_parameters();
    for (int i = 0; i < model.parameter_count(); ++i) {
        if (!model.parameters[i].identifiable) continue;
        const auto& par = model.parameters[i];
        if (par.unit == "rad")
            p[i] += rng.uniform(-M_PI / 180.0, M_PI / 180.0);
        else
            p[i] += rng.uniform(-0.01, 0.01) * std::max(std::abs(par.nominal), 0.1);
    }
    return p;
}

std::string plot_svg(const std::vector<double>& errors, const CampaignStats& stats) {
    const double w = 800, h = 400, ml = 60, mb = 30;
    double emax = stats.p95 * 1.6;
    for (double e : errors) emax = std::max(emax, std::min(e, stats.p95 * 3));
    if (emax <= 0) emax = 1e-12;
    auto X = [&](size_t i) {
        return ml + (w - ml - 10) * static_cast<double>(i) / std::max<size_t>(errors.size(), 1);
    };
    auto Y = [&](double e) { return h - mb - (h - mb - 10) * std::min(e / emax, 1.0); };
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", w, h);
    s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", w, h);
    for (size_t i = 0; i < errors.size(); ++i)
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.2\" fill=\"#3366aa\"/>\n",
                         X(i), Y(errors[i]));
    s += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" "
                     "stroke=\"#cc3333\"/>\n",
                     ml, Y(stats.rms_error), w - 10, Y(stats.rms_error));
    s += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" "
                     "stroke=\"#33aa33\"/>\n",
                     ml, Y(stats.mean_error), w - 10, Y(stats.mean_error));
    s += fmt::format("<text x=\"{}\" y=\"14\" font-size=\"12\">rms {} m (red), mean {} m "
                     "(green), n = {}</text>\n",
                     ml, num(stats.rms_error), num(stats.mean_error), stats.n_trials);
    s += fmt::format("<line x1=\"{}\" y1=\"10\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", ml,
                     ml, h - mb);
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", ml,
                     h - mb, w - 10, h - mb);
    s += "</svg>\n";
    return s;
}

int run(int argc, char** argv) {
    CLI::App app{"Measurement-plan design for serial-manipulator geometric calibration"};
    app.require_subcommand(1);

    // ---- design ----
    auto* design = app.add_subcommand("design", "Optimize a measurement plan for a test pose");
    std::string d_model, d_pose, d_out_plan, d_out_report, d_workspace;
    int d_m = 0, d_baseline = 1000;
    double d_sigma = 1e-3;
    OptimizerSettings d_set;
    design->add_option("--model", d_model, "model file")->required();
    design->add_option("--test-pose", d_pose, "comma-separated joint angles")->required();
    design->add_option("--m", d_m, "number of measurements")->required();
    design->add_option("--sigma", d_sigma, "measurement noise s.t.d., meters");
    design->add_option("--seed", d_set.rng_seed, "RNG seed");
    design->add_option("--starts", d_set.n_starts, "multi-start count");
    design->add_option("--filter-quantile", d_set.filter_quantile, "fraction of starts kept");
    design->add_option("--local-tol", d_set.local_tol, "final pattern-search step, radians");
    design->add_option("--baseline-plans", d_baseline, "random plans for the baseline section");
    design->add_option("--workspace", d_workspace, "xlo,xhi,ylo,yhi,zlo,zhi box, meters");
    design->add_option("--out-plan", d_out_plan, "output plan CSV")->required();
    design->add_option("--out-report", d_out_report, "output report file");

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "Score an existing plan");
    std::string e_model, e_plan, e_pose, e_out;
    double e_sigma = 1e-3;
    evaluate->add_option("--model", e_model)->required();
    evaluate->add_option("--plan", e_plan)->required();
    evaluate->add_option("--test-pose", e_pose)->required();
    evaluate->add_option("--sigma", e_sigma);
    evaluate->add_option("--out-report", e_out);

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo calibration campaign");
    std::string s_model, s_plan, s_pose, s_out_csv, s_out_report, s_plot;
    double s_sigma = 1e-3;
    int s_trials = 10000;
    std::uint64_t s_seed = 0;
    bool s_no_perturb = false;
    simulate->add_option("--model", s_model)->required();
    simulate->add_option("--plan", s_plan)->required();
    simulate->add_option("--test-pose", s_pose)->required();
    simulate->add_option("--sigma", s_sigma);
    simulate->add_option("--trials", s_trials);
    simulate->add_option("--seed", s_seed);
    simulate->add_flag("--no-perturb", s_no_perturb,
                       "simulate with true parameters equal to the nominal ones");
    simulate->add_option("--out-csv", s_out_csv, "per-trial error CSV");
    simulate->add_option("--out-report", s_out_report);
    simulate->add_option("--plot", s_plot, "scatter/summary SVG");

    // ---- baseline ----
    auto* baseline = app.add_subcommand("baseline", "Random-plan rho0 distribution");
    std::string b_model, b_pose, b_out;
    int b_m = 0, b_plans = 20000;
    double b_sigma = 1e-3;
    std::uint64_t b_seed = 0;
    baseline->add_option("--model", b_model)->required();
    baseline->add_option("--test-pose", b_pose)->required();
    baseline->add_option("--m", b_m)->required();
    baseline->add_option("--sigma", b_sigma);
    baseline->add_option("--plans", b_plans);
    baseline->add_option("--seed", b_seed);
    baseline->add_option("--out-report", b_out);

    // ---- compare ----
    auto* compare = app.add_subcommand("compare", "Score several plans side by side");
    std::string c_model, c_pose, c_out;
    double c_sigma = 1e-3;
    std::vector<std::string> c_plans;
    compare->add_option("--model", c_model)->required();
    compare->add_option("--test-pose", c_pose)->required();
    compare->add_option("--sigma", c_sigma);
    compare->add_option("--plan", c_plans, "name=path, repeatable")->required();
    compare->add_option("--out-report", c_out);

    // ---- analytic-2r ----
    auto* an2r = app.add_subcommand("analytic-2r", "Closed-form two-link reference");
    std::string a_q20, a_out;
    int a_m = 2;
    double a_sigma = 1.0;
    an2r->add_option("--q20", a_q20, "test-pose second joint angle")->required();
    an2r->add_option("--m", a_m, "number of measurements");
    an2r->add_option("--sigma", a_sigma, "measurement noise s.t.d., meters");
    an2r->add_option("--out-report", a_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (design->parsed()) {
        const KinematicModel model = load_model(d_model);
        DesignProblem problem;
        problem.model = model;
        problem.params = model.nominal_parameters();
        problem.test_pose.q0 = parse_pose(d_pose, model.n_joints);
        problem.m = d_m;
        problem.sigma = d_sigma;
        if (!d_workspace.empty()) {
            Configuration box = parse_pose(d_workspace, 6);
            problem.workspace = WorkspaceBox{{box[0], box[2], box[4]}, {box[1], box[3], box[5]}};
        }
        const DesignReport rep = optimize_plan(problem, d_set);
        const BaselineSummary base =
            random_plan_baseline(problem, d_baseline, d_set.rng_seed + 1);
        save_plan_csv(rep.plan, d_out_plan);
        std::string txt = "calibdesign report\ncommand: design\n";
        txt += fmt::format("seed: {}\nmodel: {}\ntest_pose_rad: {}\nm: {}\nsigma_m: {}\n",
                           rep.seed, d_model, d_pose, d_m, num(d_sigma));
        txt += fmt::format("rho0_m: {}\nrho0_sq_m2: {}\nd_criterion: {}\na_criterion: {}\n",
                           num(rep.rho0), num(rep.rho0_sq), num(rep.d_score), num(rep.a_score));
        txt += fmt::format("starts: {}\nfiltered: {}\nsingular_starts: {}\nbest_start: {}\n",
                           rep.n_starts, rep.n_filtered, rep.n_singular_starts,
                           rep.best_start_index);
        txt += fmt::format("baseline_plans: {}\nbaseline_singular: {}\nbaseline_min_rho0_m: "
                           "{}\nbaseline_mean_rho0_m: {}\nbaseline_max_rho0_m: {}\n",
                           base.n_plans, base.n_singular, num(base.min_rho0),
                           num(base.mean_rho0), num(base.max_rho0));
        txt += fmt::format("plan_file: {}\n", d_out_plan);
        emit(txt, d_out_report);
        std::cerr << fmt::format("design finished in {:.2f} s ({} metric evaluations)\n",
                                 rep.elapsed_seconds, rep.evaluations);
    } else if (evaluate->parsed()) {
        const KinematicModel model = load_model(e_model);
        const Plan plan = load_plan_csv(e_plan, model.n_joints);
        TestPose pose{parse_pose(e_pose, model.n_joints)};
        const Vector params = model.nominal_parameters();
        const double r2 = rho0_squared(model, params, plan, pose, e_sigma);
        std::string txt = "calibdesign report\ncommand: evaluate\n";
        txt += fmt::format("model: {}\nplan: {}\ntest_pose_rad: {}\nsigma_m: {}\n", e_model,
                           e_plan, e_pose, num(e_sigma));
        txt += fmt::format("m: {}\nrho0_m: {}\nrho0_sq_m2: {}\nd_criterion: {}\n"
                           "a_criterion: {}\n",
                           plan.total_count(), num(std::sqrt(r2)), num(r2),
                           num(d_criterion(model, params, plan)),
                           num(a_criterion(model, params, plan)));
        emit(txt, e_out);
    } else if (simulate->parsed()) {
        const KinematicModel model = load_model(s_model);
        const Plan plan = load_plan_csv(s_plan, model.n_joints);
        TestPose pose{parse_pose(s_pose, model.n_joints)};
        if (s_trials < 1) throw InputError("--trials must be >= 1");
        const Vector nominal = model.nominal_parameters();
        const Vector truth = s_no_perturb ? nominal : perturbed_params(model, s_seed);
        std::vector<double> errors;
        const CampaignStats stats =
            run_campaign(model, nominal, truth, plan, pose, s_sigma, s_trials, s_seed, &errors);
        if (!s_out_csv.empty())
            write_file(s_out_csv, serialize_campaign_csv(errors, stats, s_seed));
        if (!s_plot.empty()) write_file(s_plot, plot_svg(errors, stats));
        std::string txt = "calibdesign report\ncommand: simulate\n";
        txt += fmt::format("seed: {}\nmodel: {}\nplan: {}\ntest_pose_rad: {}\nsigma_m: {}\n",
                           s_seed, s_model, s_plan, s_pose, num(s_sigma));
        txt += fmt::format("trials: {}\nfailed: {}\nmean_m: {}\nstd_m: {}\nrms_m: {}\n"
                           "p5_m: {}\np50_m: {}\np95_m: {}\n",
                           stats.n_trials, stats.n_failed, num(stats.mean_error),
                           num(stats.std_error), num(stats.rms_error), num(stats.p5),
                           num(stats.p50), num(stats.p95));
        emit(txt, s_out_report);
    } else if (baseline->parsed()) {
        const KinematicModel model = load_model(b_model);
        DesignProblem problem;
        problem.model = model;
        problem.params = model.nominal_parameters();
        problem.test_pose.q0 = parse_pose(b_pose, model.n_joints);
        problem.m = b_m;
        problem.sigma = b_sigma;
        if (b_m < problem.identifiability_floor())
            throw InputError(fmt::format("m = {} below the identifiability floor {}", b_m,
                                         problem.identifiability_floor()));
        const BaselineSummary base = random_plan_baseline(problem, b_plans, b_seed);
        std::string txt = "calibdesign report\ncommand: baseline\n";
        txt += fmt::format("seed: {}\nmodel: {}\ntest_pose_rad: {}\nm: {}\nsigma_m: {}\n",
                           b_seed, b_model, b_pose, b_m, num(b_sigma));
        txt += fmt::format("plans: {}\nsingular: {}\nmin_rho0_m: {}\nmean_rho0_m: {}\n"
                           "max_rho0_m: {}\n",
                           base.n_plans, base.n_singular, num(base.min_rho0),
                           num(base.mean_rho0), num(base.max_rho0));
        emit(txt, b_out);
    } else if (compare->parsed()) {
        const KinematicModel model = load_model(c_model);
        TestPose pose{parse_pose(c_pose, model.n_joints)};
        std::vector<std::pair<std::string, Plan>> plans;
        for (const auto& spec : c_plans) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos)
                throw InputError(fmt::format("--plan expects name=path, got '{}'", spec));
            plans.emplace_back(spec.substr(0, eq),
                               load_plan_csv(spec.substr(eq + 1), model.n_joints));
        }
        const PlanComparison cmp =
            compare_plans(model, model.nominal_parameters(), plans, pose, c_sigma);
        std::string txt = "calibdesign report\ncommand: compare\n";
        txt += fmt::format("model: {}\ntest_pose_rad: {}\nsigma_m: {}\n", c_model, c_pose,
                           num(c_sigma));
        for (const auto& s : cmp.scores)
            txt += fmt::format("plan {}: rho0_m {} rho0_sq_m2 {} d {} a {}\n", s.name,
                               num(s.rho0), num(s.rho0_sq), num(s.d_score), num(s.a_score));
        for (size_t a = 0; a < cmp.scores.size(); ++a)
            for (size_t b = 0; b < cmp.scores.size(); ++b)
                if (a != b)
                    txt += fmt::format("gain {} vs {}: {} %\n", cmp.scores[a].name,
                                       cmp.scores[b].name, num(cmp.gain_percent(a, b)));
        emit(txt, c_out);
    } else if (an2r->parsed()) {
        TwoLinkCase c;
        c.q20 = parse_angle(a_q20);
        c.m = a_m;
        c.sigma = a_sigma;
        if (c.m < 2) throw InputError("analytic two-link case needs m >= 2");
        const double S = optimal_S(c);
        const double r2min = rho0_min(c);
        const double rD2 = 2.0 * c.sigma * c.sigma / c.m;
        const auto q2 = decompose_plan(c, S);
        std::string txt = "calibdesign report\ncommand: analytic-2r\n";
        txt += fmt::format("q20_rad: {}\nm: {}\nsigma_m: {}\n", num(c.q20), c.m, num(c.sigma));
        txt += fmt::format("optimal_sum_cos_q2: {}\n", num(S));
        txt += "plan_q2_deg:";
        for (double a : q2) txt += fmt::format(" {}", num(a * 180.0 / M_PI));
        txt += "\n";
        txt += fmt::format("rho0_min_sq_m2: {}\nrho0_min_sq_over_sigma_sq: {}\n", num(r2min),
                           num(r2min / (c.sigma * c.sigma)));
        txt += fmt::format("rho_d_sq_m2: {}\nrho_d_sq_over_sigma_sq: {}\n", num(rD2),
                           num(rD2 / (c.sigma * c.sigma)));
        txt += fmt::format("gain_percent: {}\n", num(100.0 * (std::sqrt(rD2 / r2min) - 1.0)));
        const double q20_deg = std::abs(c.q20) * 180.0 / M_PI;
        if (std::abs(q20_deg - 60.0) < 0.5 || std::abs(q20_deg - 120.0) < 0.5)
            txt += fmt::format("note: historical tabulated value 0.83 at this angle disagrees "
                               "with the closed form ({}); the closed form is authoritative\n",
                               num(r2min / (c.sigma * c.sigma)));
        emit(txt, a_out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const calib::IdentifiabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const calib::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const calib::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
