#pragma once

#include <limits>
#include <string>
#include <vector>

#include "calib/identification.hpp"
#include "calib/plan.hpp"

namespace calib {

inline constexpr double kInfeasiblePlan = std::numeric_limits<double>::infinity();

/// Test-pose accuracy metric sigma^2 * trace(J0 M^{-1} J0^T), solved through a
/// Cholesky factorization of the information matrix. Singular plans score
/// +infinity so optimizers can reject them by comparison.
double rho0_squared(const KinematicModel& model, const Vector& params, const Plan& plan,
                    const TestPose& test_pose, double sigma);

/// D-criterion surrogate 1/det(M): smaller is better, +infinity when singular.
double d_criterion(const KinematicModel& model, const Vector& params, const Plan& plan);

/// A-criterion trace(M^{-1}): +infinity when singular.
double a_criterion(const KinematicModel& model, const Vector& params, const Plan& plan);

struct ScreeningReport {
    /// Per identifiable parameter: largest Jacobian column norm over probes.
    std::vector<double> max_column_norm;
    /// Per identifiable parameter: true when the column norm stays above the
    /// influence tolerance for at least one probe.
    std::vector<bool> influential;
    /// Near-null-space combinations of the aggregated information matrix:
    /// (singular value, unit direction over identifiable parameters).
    std::vector<std::pair<double, Vector>> near_null_directions;
    /// Names of the flagged non-influential parameters.
    std::vector<std::string> non_influential_names;
};

/// Flags parameters whose Jacobian column norm is below col_tol across all
/// probe configurations and reports near-null-space parameter combinations of
/// the aggregated information matrix. The rank tolerance is looser than the
/// solver's: screening runs on finite-difference Jacobians whose noise floor
/// (~1e-9 relative) would otherwise mask exactly redundant parameter pairs.
ScreeningReport screen_parameters(const KinematicModel& model, const Vector& params,
                                  const std::vector<Configuration>& probe_configs,
                                  double col_tol = 1e-6, double rank_tol = 1e-7);

} // namespace calib
