#pragma once

#include <Eigen/Cholesky>
#include <limits>
#include <vector>

#include "calib/kinematics.hpp"
#include "calib/plan.hpp"

namespace calib {

struct MeasurementRecord {
    Configuration q;
    Eigen::Vector3d p;
};

struct MeasurementSet {
    std::vector<MeasurementRecord> records;
};

/// Relative rank tolerance: the stacked Jacobian is declared rank deficient
/// when its smallest singular value is below rank_tol times the largest.
inline constexpr double kRankTol = 1e-10;

/// Solves the stacked linear least-squares system formed by per-record
/// Jacobians and position residuals. Throws IdentifiabilityError on rank
/// deficiency, naming the null-space direction(s).
Vector solve_least_squares(const std::vector<Matrix>& jacobians,
                           const std::vector<Eigen::Vector3d>& residuals,
                           double rank_tol = kRankTol);

struct IdentifyResult {
    Vector params;
    int iterations = 0;
    double final_residual_norm = 0.0;
};

/// Iterated linear least squares: recompute modeled positions, solve for the
/// parameter correction, apply it, repeat until the predicted position change
/// drops below tol (meters) or max_iter is reached.
IdentifyResult identify(const KinematicModel& model, const Vector& nominal_params,
                        const MeasurementSet& data, double tol = 1e-9, int max_iter = 20);

/// True when a successful Cholesky factorization also has a healthy pivot
/// ratio. LLT alone accepts numerically positive-semidefinite matrices whose
/// smallest pivot is pure rounding noise; the pivot-squared ratio (an estimate
/// of the eigenvalue spread of M, i.e. the squared singular-value spread of
/// the stacked Jacobian) catches those.
inline bool llt_full_rank(const Eigen::LLT<Matrix>& llt, double rank_tol = kRankTol) {
    const auto d = llt.matrixLLT().diagonal();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double p = d(i) * d(i);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    return hi > 0.0 && lo > rank_tol * hi;
}

/// Information matrix M = sum_i multiplicity_i * J(q_i)^T J(q_i).
/// Symmetric by construction; summation follows the plan entry order.
Matrix information_matrix(const KinematicModel& model, const Vector& params, const Plan& plan);

/// Parameter covariance sigma^2 * M^{-1}. Throws IdentifiabilityError when M
/// is singular.
Matrix covariance(const KinematicModel& model, const Vector& params, const Plan& plan,
                  double sigma);

} // namespace calib
