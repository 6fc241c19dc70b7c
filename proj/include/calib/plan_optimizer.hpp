#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calib/design_metrics.hpp"
#include "calib/plan.hpp"
#include "calib/rng.hpp"

namespace calib {

struct WorkspaceBox {
    Eigen::Vector3d lo;
    Eigen::Vector3d hi;

    bool contains(const Eigen::Vector3d& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
};

/// The constrained plan-design problem: find m configurations within the
/// joint (and optional workspace) limits minimizing the test-pose metric.
struct DesignProblem {
    KinematicModel model;
    Vector params; // evaluation point, usually nominal
    TestPose test_pose;
    int m = 0;
    std::vector<JointLimits> joint_limits; // defaults to the model's
    std::optional<WorkspaceBox> workspace;
    double sigma = 1e-3;

    /// Smallest m that can possibly identify the masked parameter set
    /// (3 informative rows per measurement).
    int identifiability_floor() const {
        return (model.identifiable_count() + 2) / 3;
    }
};

struct OptimizerSettings {
    int n_starts = 512;
    double filter_quantile = 0.1; // fraction of starts kept for local descent
    double local_tol = 1e-7;      // final pattern-search step, radians
    int max_local_iters = 10000;  // sweep budget per local search
    std::uint64_t rng_seed = 0;
};

struct DesignReport {
    Plan plan;
    double rho0 = 0.0;
    double rho0_sq = 0.0;
    double d_score = 0.0;
    double a_score = 0.0;
    int n_starts = 0;
    int n_filtered = 0;
    int n_singular_starts = 0;
    int best_start_index = -1;
    long long evaluations = 0;
    double elapsed_seconds = 0.0; // diagnostics only, never serialized
    std::uint64_t seed = 0;
};

/// Multi-start constrained minimization of rho0^2: random starts within the
/// limits, quantile filtering, then coordinate pattern search from each
/// survivor. Deterministic for a given seed; ties broken by lowest start
/// index.
DesignReport optimize_plan(const DesignProblem& problem, const OptimizerSettings& settings);

/// Multiplies every multiplicity by k; scales rho0^2 by exactly 1/k.
Plan replicate_plan(const Plan& plan, int k);

struct PlanScores {
    std::string name;
    double rho0 = 0.0;
    double rho0_sq = 0.0;
    double d_score = 0.0;
    double a_score = 0.0;
};

struct PlanComparison {
    std::vector<PlanScores> scores;
    /// gain(a, b) = 100 * (rho0_a / rho0_b - 1).
    Matrix gain_percent;
};

PlanComparison compare_plans(const KinematicModel& model, const Vector& params,
                             const std::vector<std::pair<std::string, Plan>>& plans,
                             const TestPose& test_pose, double sigma);

/// Uniform random plan within the problem's joint limits; configurations
/// violating the workspace box are redrawn.
Plan sample_random_plan(const DesignProblem& problem, RngStream& rng);

} // namespace calib
