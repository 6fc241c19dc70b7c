#include "calib/kinematics.hpp"

#include <cmath>
#include <fmt/format.h>

namespace calib {

int KinematicModel::identifiable_count() const {
    int n = 0;
    for (const auto& p : parameters)
        if (p.identifiable) ++n;
    return n;
}

std::vector<int> KinematicModel::identifiable_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < parameter_count(); ++i)
        if (parameters[i].identifiable) idx.push_back(i);
    return idx;
}

Vector KinematicModel::nominal_parameters() const {
    Vector v(parameter_count());
    for (int i = 0; i < parameter_count(); ++i) v[i] = parameters[i].nominal;
    return v;
}

int KinematicModel::parameter_index(const std::string& name) const {
    for (int i = 0; i < parameter_count(); ++i)
        if (parameters[i].name == name) return i;
    return -1;
}

void KinematicModel::validate() const {
    std::vector<int> joint_uses(n_joints, 0);
    std::vector<int> param_uses(parameter_count(), 0);
    for (const auto& t : chain) {
        switch (t.driver) {
        case DriverKind::Constant:
            if (!std::isfinite(t.value))
                throw InputError("non-finite constant in transform chain");
            break;
        case DriverKind::Joint:
            if (t.joint < 0 || t.joint >= n_joints)
                throw InputError(fmt::format("joint index {} out of range", t.joint));
            ++joint_uses[t.joint];
            if (t.offset_param >= 0) {
                if (t.offset_param >= parameter_count())
                    throw InputError("offset parameter index out of range");
                ++param_uses[t.offset_param];
            }
            break;
        case DriverKind::Parameter:
            if (t.param < 0 || t.param >= parameter_count())
                throw InputError("parameter index out of range");
            ++param_uses[t.param];
            break;
        }
    }
    for (int j = 0; j < n_joints; ++j)
        if (joint_uses[j] != 1)
            throw InputError(fmt::format("joint {} driven by {} transforms (expected 1)",
                                         j, joint_uses[j]));
    for (int k = 0; k < parameter_count(); ++k)
        if (param_uses[k] != 1)
            throw InputError(fmt::format("parameter '{}' referenced {} times (expected 1)",
                                         parameters[k].name, param_uses[k]));
    if (!joint_limits.empty() && static_cast<int>(joint_limits.size()) != n_joints)
        throw InputError("joint limit table size does not match joint count");
}

namespace {

inline void apply_elementary(Eigen::Matrix4d& T, TransformKind kind, Axis axis, double v) {
    Eigen::Matrix4d E = Eigen::Matrix4d::Identity();
    if (kind == TransformKind::Translation) {
        E(static_cast<int>(axis), 3) = v;
    } else {
        const double c = std::cos(v), s = std::sin(v);
        switch (axis) {
        case Axis::X: E(1, 1) = c; E(1, 2) = -s; E(2, 1) = s; E(2, 2) = c; break;
        case Axis::Y: E(0, 0) = c; E(0, 2) = s;  E(2, 0) = -s; E(2, 2) = c; break;
        case Axis::Z: E(0, 0) = c; E(0, 1) = -s; E(1, 0) = s;  E(1, 1) = c; break;
        }
    }
    T = T * E;
}

inline double driver_value(const ElementaryTransform& t, const Vector& params,
                           const Configuration& q) {
    switch (t.driver) {
    case DriverKind::Constant: return t.value;
    case DriverKind::Joint:
        return q[t.joint] + (t.offset_param >= 0 ? params[t.offset_param] : 0.0);
    case DriverKind::Parameter: return params[t.param];
    }
    return 0.0;
}

} // namespace

Eigen::Vector3d forward_position(const KinematicModel& model, const Vector& params,
                                 const Configuration& q) {
    if (params.size() != model.parameter_count())
        throw InputError(fmt::format("parameter vector length {} != model parameter count {}",
                                     params.size(), model.parameter_count()));
    if (q.size() != model.n_joints)
        throw InputError(fmt::format("configuration length {} != joint count {}",
                                     q.size(), model.n_joints));
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    for (const auto& t : model.chain)
        apply_elementary(T, t.kind, t.axis, driver_value(t, params, q));
    return T.block<3, 1>(0, 3);
}

Matrix identification_jacobian(const KinematicModel& model, const Vector& params,
                               const Configuration& q) {
    const auto idx = model.identifiable_indices();
    Matrix J(3, idx.size());
    Vector work = params;
    for (size_t k = 0; k < idx.size(); ++k) {
        const int g = idx[k];
        const double h = std::max(kFdAbsStep, kFdRelStep * std::abs(model.parameters[g].nominal));
        const double saved = work[g];
        work[g] = saved + h;
        const Eigen::Vector3d plus = forward_position(model, work, q);
        work[g] = saved - h;
        const Eigen::Vector3d minus = forward_position(model, work, q);
        work[g] = saved;
        J.col(k) = (plus - minus) / (2.0 * h);
        if (!J.col(k).allFinite())
            throw NumericalError(fmt::format("non-finite Jacobian column for parameter '{}'",
                                             model.parameters[g].name));
    }
    return J;
}

Vector apply_parameter_update(const KinematicModel& model, const Vector& params,
                              const Vector& delta) {
    const auto idx = model.identifiable_indices();
    if (delta.size() != static_cast<Eigen::Index>(idx.size()))
        throw InputError(fmt::format("update length {} != identifiable parameter count {}",
                                     delta.size(), idx.size()));
    Vector out = params;
    for (size_t k = 0; k < idx.size(); ++k) out[idx[k]] += delta[k];
    return out;
}

} // namespace calib
