#pragma once

#include <span>
#include <vector>

#include "calib/kinematics.hpp"
#include "calib/plan.hpp"

namespace calib {

enum class TwoLinkParams { LinkLengths, JointOffsets, Both };

/// Closed-form reference case for the planar two-link arm.
struct TwoLinkCase {
    double l1 = 1.0;  // m
    double l2 = 0.8;  // m
    TwoLinkParams parameter_set = TwoLinkParams::LinkLengths;
    double sigma = 1e-3; // m
    int m = 2;           // measurement count
    double q20 = 0.0;    // test-pose second joint angle, rad
};

/// Builds the two-link model with the requested identifiable parameter set.
KinematicModel make_two_link_model(double l1, double l2, TwoLinkParams set);

/// Parameter covariance sigma^2/(m^2 - S^2) * [[m, -S], [-S, m]] with
/// S = sum cos(q2_i). Independent of the first-joint angles.
Eigen::Matrix2d cov_2r(const TwoLinkCase& c, std::span<const double> q2_angles);

/// Test-pose metric 2 sigma^2 (m - cos(q20) S) / (m^2 - S^2).
double rho0_2r(const TwoLinkCase& c, std::span<const double> q2_angles);

/// Optimal S = m (1 - |sin q20|) / cos q20; the limit value 0 near
/// |cos q20| = 0.
double optimal_S(const TwoLinkCase& c);

/// Minimum metric (sigma^2/m) cos^2(q20) / (1 - |sin q20|); the equivalent
/// regular form (sigma^2/m)(1 + |sin q20|) near |cos q20| = 0.
double rho0_min(const TwoLinkCase& c);

/// Second-joint angles (length m, at most 3 distinct values) realizing
/// sum cos(q2_i) = S_target.
std::vector<double> decompose_plan(const TwoLinkCase& c, double S_target);

/// Convenience: a Plan with first joint at zero and the given second-joint
/// angles, unit multiplicities.
Plan plan_from_q2(std::span<const double> q2_angles);

} // namespace calib
