#include "calib/analytic_2r.hpp"

#include <cmath>
#include <fmt/format.h>

namespace calib {

KinematicModel make_two_link_model(double l1, double l2, TwoLinkParams set) {
    KinematicModel model;
    model.n_joints = 2;
    model.joint_limits.assign(2, JointLimits{-M_PI, M_PI});

    const bool lengths = set != TwoLinkParams::JointOffsets;
    const bool offsets = set != TwoLinkParams::LinkLengths;

    int p = 0;
    int il1 = -1, il2 = -1, iq1 = -1, iq2 = -1;
    model.parameters.push_back({"l1", l1, "m", lengths});
    il1 = p++;
    model.parameters.push_back({"l2", l2, "m", lengths});
    il2 = p++;
    if (offsets) {
        model.parameters.push_back({"dq1", 0.0, "rad", true});
        iq1 = p++;
        model.parameters.push_back({"dq2", 0.0, "rad", true});
        iq2 = p++;
    }

    model.chain.push_back({TransformKind::Rotation, Axis::Z, DriverKind::Joint, 0.0, 0, iq1, -1});
    model.chain.push_back({TransformKind::Translation, Axis::X, DriverKind::Parameter, 0.0, -1, -1, il1});
    model.chain.push_back({TransformKind::Rotation, Axis::Z, DriverKind::Joint, 0.0, 1, iq2, -1});
    model.chain.push_back({TransformKind::Translation, Axis::X, DriverKind::Parameter, 0.0, -1, -1, il2});
    model.validate();
    return model;
}

namespace {
double sum_cos(std::span<const double> q2) {
    double s = 0.0;
    for (double a : q2) s += std::cos(a);
    return s;
}
} // namespace

Eigen::Matrix2d cov_2r(const TwoLinkCase& c, std::span<const double> q2_angles) {
    const double m = static_cast<double>(q2_angles.size());
    const double S = sum_cos(q2_angles);
    const double denom = m * m - S * S;
    if (denom <= 0.0)
        throw IdentifiabilityError(
            fmt::format("singular two-link plan: |sum cos q2| = {:.6g} with m = {}", std::abs(S), m));
    Eigen::Matrix2d cov;
    cov << m, -S, -S, m;
    return (c.sigma * c.sigma / denom) * cov;
}

double rho0_2r(const TwoLinkCase& c, std::span<const double> q2_angles) {
    const double m = static_cast<double>(q2_angles.size());
    const double S = sum_cos(q2_angles);
    const double denom = m * m - S * S;
    if (denom <= 0.0)
        throw IdentifiabilityError(
            fmt::format("singular two-link plan: |sum cos q2| = {:.6g} with m = {}", std::abs(S), m));
    return 2.0 * c.sigma * c.sigma * (m - std::cos(c.q20) * S) / denom;
}

double optimal_S(const TwoLinkCase& c) {
    const double cq = std::cos(c.q20);
    if (std::abs(cq) < 1e-9) return 0.0;
    return c.m * (1.0 - std::abs(std::sin(c.q20))) / cq;
}

double rho0_min(const TwoLinkCase& c) {
    const double s2 = c.sigma * c.sigma / c.m;
    const double cq = std::cos(c.q20);
    const double asq = std::abs(std::sin(c.q20));
    if (std::abs(cq) < 1e-9) return s2 * (1.0 + asq);
    return s2 * cq * cq / (1.0 - asq);
}

std::vector<double> decompose_plan(const TwoLinkCase& c, double S_target) {
    const int m = c.m;
    if (m < 2) throw InputError("decomposition needs m >= 2");
    if (std::abs(S_target) > m)
        throw InputError(fmt::format("target sum {:.6g} infeasible for m = {}", S_target, m));

    std::vector<double> q2;
    auto push_pairs = [&q2](int pairs, double cosine) {
        const double a = std::acos(std::clamp(cosine, -1.0, 1.0));
        for (int i = 0; i < pairs; ++i) {
            q2.push_back(-a);
            q2.push_back(a);
        }
    };

    if (m % 2 == 0) {
        push_pairs(m / 2, S_target / m);
    } else {
        // One configuration pinned at q2 = 0; fall back to 180 degrees when the
        // remaining pairs cannot absorb the target.
        double single = 0.0;
        double rest = (S_target - 1.0) / (m - 1);
        if (std::abs(rest) > 1.0) {
            single = M_PI;
            rest = (S_target + 1.0) / (m - 1);
        }
        q2.push_back(single);
        push_pairs((m - 1) / 2, rest);
    }
    return q2;
}

Plan plan_from_q2(std::span<const double> q2_angles) {
    Plan plan;
    for (double a : q2_angles) {
        Configuration q(2);
        q << 0.0, a;
        plan.entries.push_back({q, 1});
    }
    return plan;
}

} // namespace calib
