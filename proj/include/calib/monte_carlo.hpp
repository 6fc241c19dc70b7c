#pragma once

#include <cstdint>
#include <vector>

#include "calib/identification.hpp"
#include "calib/plan.hpp"
#include "calib/plan_optimizer.hpp"
#include "calib/rng.hpp"

namespace calib {

struct TrialResult {
    Vector params_hat;
    double test_pose_error = 0.0; // ||g(q0, hat) - g(q0, true)||, meters
    bool converged = false;
};

struct CampaignStats {
    int n_trials = 0;
    int n_failed = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    double rms_error = 0.0;
    double p5 = 0.0, p50 = 0.0, p95 = 0.0;
};

/// Synthetic measurement set: exact forward positions plus i.i.d. zero-mean
/// Gaussian noise with per-axis standard deviation sigma. One record per unit
/// of multiplicity, plan order preserved.
MeasurementSet simulate_measurements(const KinematicModel& model, const Vector& true_params,
                                     const Plan& plan, double sigma, RngStream& rng);

/// Repeats simulate -> identify -> score-at-test-pose n_trials times. Failed
/// identifications are excluded and counted; the campaign errors out when the
/// failure rate exceeds 1%. Per-trial RNG streams derive from the seed, so
/// results do not depend on execution order.
CampaignStats run_campaign(const KinematicModel& model, const Vector& nominal_params,
                           const Vector& true_params, const Plan& plan,
                           const TestPose& test_pose, double sigma, int n_trials,
                           std::uint64_t seed,
                           std::vector<double>* per_trial_errors = nullptr,
                           Matrix* params_hat_out = nullptr);

struct BaselineSummary {
    int n_plans = 0;
    int n_singular = 0;
    double min_rho0 = 0.0;
    double max_rho0 = 0.0;
    double mean_rho0 = 0.0;
};

/// Scores n_plans uniform random plans by rho0; singular plans are excluded
/// from the summary and counted separately.
BaselineSummary random_plan_baseline(const DesignProblem& problem, int n_plans,
                                     std::uint64_t seed);

} // namespace calib
