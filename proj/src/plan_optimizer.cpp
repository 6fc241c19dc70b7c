#include "calib/plan_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace calib {

namespace {

const std::vector<JointLimits>& effective_limits(const DesignProblem& problem) {
    if (!problem.joint_limits.empty()) return problem.joint_limits;
    return problem.model.joint_limits;
}

struct Evaluator {
    const DesignProblem& problem;
    long long evaluations = 0;

    double operator()(const Plan& plan) {
        ++evaluations;
        if (problem.workspace) {
            for (const auto& e : plan.entries) {
                const Eigen::Vector3d p = forward_position(problem.model, problem.params, e.q);
                if (!problem.workspace->contains(p)) return kInfeasiblePlan;
            }
        }
        return rho0_squared(problem.model, problem.params, plan, problem.test_pose,
                            problem.sigma);
    }
};

/// Coordinate pattern search over the m x n_joints design variables with a
/// shrinking step and projection onto the joint-limit box.
double local_descent(const DesignProblem& problem, Evaluator& eval, Plan& plan,
                     double best, const OptimizerSettings& settings) {
    const auto& limits = effective_limits(problem);
    double step = M_PI / 8.0;
    int sweeps = 0;
    while (step > settings.local_tol && sweeps < settings.max_local_iters) {
        bool improved = false;
        for (auto& entry : plan.entries) {
            for (int j = 0; j < problem.model.n_joints; ++j) {
                const double saved = entry.q[j];
                for (double dir : {1.0, -1.0}) {
                    const double trial =
                        std::clamp(saved + dir * step, limits[j].lo, limits[j].hi);
                    if (trial == saved) continue;
                    entry.q[j] = trial;
                    const double score = eval(plan);
                    if (score < best) {
                        best = score;
                        improved = true;
                        break; // keep the accepted coordinate value
                    }
                    entry.q[j] = saved;
                }
            }
        }
        if (!improved) step *= 0.5;
        ++sweeps;
    }
    return best;
}

} // namespace

Plan sample_random_plan(const DesignProblem& problem, RngStream& rng) {
    const auto& limits = effective_limits(problem);
    Plan plan;
    plan.entries.reserve(problem.m);
    for (int i = 0; i < problem.m; ++i) {
        Configuration q(problem.model.n_joints);
        for (int attempt = 0;; ++attempt) {
            for (int j = 0; j < problem.model.n_joints; ++j)
                q[j] = rng.uniform(limits[j].lo, limits[j].hi);
            if (!problem.workspace) break;
            const Eigen::Vector3d p = forward_position(problem.model, problem.params, q);
            if (problem.workspace->contains(p)) break;
            if (attempt > 10000)
                throw InputError("workspace box rejects every sampled configuration");
        }
        plan.entries.push_back({q, 1});
    }
    return plan;
}

DesignReport optimize_plan(const DesignProblem& problem, const OptimizerSettings& settings) {
    if (problem.m < problem.identifiability_floor())
        throw InputError(fmt::format(
            "m = {} cannot identify {} parameters (needs at least {} measurements)",
            problem.m, problem.model.identifiable_count(), problem.identifiability_floor()));
    if (settings.n_starts < 1 || settings.filter_quantile <= 0.0 ||
        settings.filter_quantile > 1.0)
        throw InputError("invalid optimizer settings");
    if (effective_limits(problem).size() != static_cast<size_t>(problem.model.n_joints))
        throw InputError("joint limit table size does not match joint count");

    const auto t0 = std::chrono::steady_clock::now();
    Evaluator eval{problem};

    // Stage 1: random starts, one RNG stream per start.
    std::vector<Plan> starts(settings.n_starts);
    std::vector<double> scores(settings.n_starts);
    int n_singular = 0;
    for (int s = 0; s < settings.n_starts; ++s) {
        RngStream rng(settings.rng_seed, static_cast<std::uint64_t>(s));
        starts[s] = sample_random_plan(problem, rng);
        scores[s] = eval(starts[s]);
        if (!std::isfinite(scores[s])) ++n_singular;
    }
    if (n_singular == settings.n_starts)
        throw IdentifiabilityError(
            "every random start produced a singular information matrix; "
            "run parameter screening to drop unidentifiable parameters");

    // Stage 2: keep the best quantile (at least one start).
    std::vector<int> order(settings.n_starts);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&scores](int a, int b) { return scores[a] < scores[b]; });
    const int n_keep = std::max(
        1, static_cast<int>(std::floor(settings.filter_quantile * settings.n_starts)));

    // Stage 3: local descent from each survivor; best result wins, ties broken
    // by lowest start index.
    double best_score = kInfeasiblePlan;
    Plan best_plan;
    int best_start = -1;
    for (int k = 0; k < n_keep; ++k) {
        const int s = order[k];
        if (!std::isfinite(scores[s])) continue;
        Plan plan = starts[s];
        const double score = local_descent(problem, eval, plan, scores[s], settings);
        if (score < best_score || (score == best_score && s < best_start)) {
            best_score = score;
            best_plan = plan;
            best_start = s;
        }
    }
    if (!std::isfinite(best_score))
        throw IdentifiabilityError("no feasible plan found from the filtered starts");

    DesignReport report;
    report.plan = best_plan;
    report.rho0_sq = best_score;
    report.rho0 = std::sqrt(best_score);
    report.d_score = d_criterion(problem.model, problem.params, best_plan);
    report.a_score = a_criterion(problem.model, problem.params, best_plan);
    report.n_starts = settings.n_starts;
    report.n_filtered = n_keep;
    report.n_singular_starts = n_singular;
    report.best_start_index = best_start;
    report.evaluations = eval.evaluations;
    report.seed = settings.rng_seed;
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

Plan replicate_plan(const Plan& plan, int k) {
    if (k < 1) throw InputError(fmt::format("replication factor {} must be >= 1", k));
    Plan out = plan;
    for (auto& e : out.entries) e.multiplicity *= k;
    return out;
}

PlanComparison compare_plans(const KinematicModel& model, const Vector& params,
                             const std::vector<std::pair<std::string, Plan>>& plans,
                             const TestPose& test_pose, double sigma) {
    PlanComparison cmp;
    for (const auto& [name, plan] : plans) {
        PlanScores s;
        s.name = name;
        s.rho0_sq = rho0_squared(model, params, plan, test_pose, sigma);
        s.rho0 = std::sqrt(s.rho0_sq);
        s.d_score = d_criterion(model, params, plan);
        s.a_score = a_criterion(model, params, plan);
        cmp.scores.push_back(std::move(s));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(plans.size());
    cmp.gain_percent.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            cmp.gain_percent(a, b) = 100.0 * (cmp.scores[a].rho0 / cmp.scores[b].rho0 - 1.0);
    return cmp;
}

} // namespace calib
