#include "calib/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace calib {

MeasurementSet simulate_measurements(const KinematicModel& model, const Vector& true_params,
                                     const Plan& plan, double sigma, RngStream& rng) {
    MeasurementSet data;
    for (const auto& e : plan.entries) {
        const Eigen::Vector3d p0 = forward_position(model, true_params, e.q);
        for (int r = 0; r < e.multiplicity; ++r) {
            Eigen::Vector3d p = p0;
            for (int a = 0; a < 3; ++a) p[a] += rng.normal(0.0, sigma);
            data.records.push_back({e.q, p});
        }
    }
    return data;
}

namespace {
double percentile(const std::vector<double>& sorted, double pct) {
    if (sorted.empty()) return 0.0;
    const double pos = pct / 100.0 * (sorted.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}
} // namespace

CampaignStats run_campaign(const KinematicModel& model, const Vector& nominal_params,
                           const Vector& true_params, const Plan& plan,
                           const TestPose& test_pose, double sigma, int n_trials,
                           std::uint64_t seed, std::vector<double>* per_trial_errors,
                           Matrix* params_hat_out) {
    if (n_trials < 1) throw InputError("campaign needs at least one trial");
    const Eigen::Vector3d p_true = forward_position(model, true_params, test_pose.q0);

    std::vector<double> errors;
    errors.reserve(n_trials);
    if (params_hat_out) params_hat_out->resize(n_trials, model.parameter_count());
    int n_failed = 0;
    int row = 0;
    for (int t = 0; t < n_trials; ++t) {
        RngStream rng(seed, static_cast<std::uint64_t>(t));
        const MeasurementSet data = simulate_measurements(model, true_params, plan, sigma, rng);
        try {
            const IdentifyResult res = identify(model, nominal_params, data);
            const Eigen::Vector3d p_hat = forward_position(model, res.params, test_pose.q0);
            errors.push_back((p_hat - p_true).norm());
            if (params_hat_out) params_hat_out->row(row++) = res.params.transpose();
        } catch (const std::runtime_error&) {
            ++n_failed;
        }
    }
    if (params_hat_out) params_hat_out->conservativeResize(row, Eigen::NoChange);
    if (n_failed > 0 && static_cast<double>(n_failed) / n_trials > 0.01)
        throw ConvergenceError(
            fmt::format("campaign failure rate {:.2f}% exceeds 1% ({} of {} trials)",
                        100.0 * n_failed / n_trials, n_failed, n_trials),
            {});

    CampaignStats stats;
    stats.n_trials = n_trials;
    stats.n_failed = n_failed;
    double sum = 0.0, sumsq = 0.0;
    for (double e : errors) {
        sum += e;
        sumsq += e * e;
    }
    const double n = static_cast<double>(errors.size());
    stats.mean_error = sum / n;
    stats.rms_error = std::sqrt(sumsq / n);
    stats.std_error = std::sqrt(std::max(0.0, sumsq / n - stats.mean_error * stats.mean_error));
    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    stats.p5 = percentile(sorted, 5.0);
    stats.p50 = percentile(sorted, 50.0);
    stats.p95 = percentile(sorted, 95.0);
    if (per_trial_errors) *per_trial_errors = std::move(errors);
    return stats;
}

BaselineSummary random_plan_baseline(const DesignProblem& problem, int n_plans,
                                     std::uint64_t seed) {
    if (n_plans < 1) throw InputError("baseline needs at least one plan");
    BaselineSummary summary;
    summary.n_plans = n_plans;
    double sum = 0.0;
    double lo = kInfeasiblePlan, hi = 0.0;
    int n_ok = 0;
    for (int i = 0; i < n_plans; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        const Plan plan = sample_random_plan(problem, rng);
        const double r2 = rho0_squared(problem.model, problem.params, plan,
                                       problem.test_pose, problem.sigma);
        if (!std::isfinite(r2)) {
            ++summary.n_singular;
            continue;
        }
        const double r = std::sqrt(r2);
        sum += r;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++n_ok;
    }
    if (n_ok > 0) {
        summary.min_rho0 = lo;
        summary.max_rho0 = hi;
        summary.mean_rho0 = sum / n_ok;
    }
    return summary;
}

} // namespace calib
