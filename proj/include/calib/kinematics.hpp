#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "calib/errors.hpp"

namespace calib {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Joint vector, one entry per joint (radians for revolute drivers).
using Configuration = Eigen::VectorXd;

enum class TransformKind { Translation, Rotation };
enum class Axis { X, Y, Z };
enum class DriverKind { Constant, Joint, Parameter };

/// One multiplier of the homogeneous transform chain: a translation or a
/// rotation along/about a principal axis, driven either by a fixed constant,
/// by a joint variable (optionally biased by an offset parameter), or by a
/// geometric parameter.
struct ElementaryTransform {
    TransformKind kind = TransformKind::Translation;
    Axis axis = Axis::X;
    DriverKind driver = DriverKind::Constant;
    double value = 0.0;     // Constant driver
    int joint = -1;         // Joint driver
    int offset_param = -1;  // optional offset parameter of a joint driver
    int param = -1;         // Parameter driver
};

struct Parameter {
    std::string name;
    double nominal = 0.0;
    std::string unit = "m"; // "m" or "rad"
    bool identifiable = true;
};

struct JointLimits {
    double lo = -M_PI;
    double hi = M_PI;
};

/// Serial manipulator as an ordered chain of elementary transforms (base
/// transforms first, tool transforms last). Immutable after construction;
/// safe to share across threads.
class KinematicModel {
public:
    std::vector<ElementaryTransform> chain;
    int n_joints = 0;
    std::vector<Parameter> parameters;
    std::vector<JointLimits> joint_limits; // size n_joints

    int parameter_count() const { return static_cast<int>(parameters.size()); }
    int identifiable_count() const;
    std::vector<int> identifiable_indices() const;
    Vector nominal_parameters() const;
    int parameter_index(const std::string& name) const; // -1 if absent

    /// Checks the structural invariants: every joint driven exactly once,
    /// every parameter referenced exactly once, finite constants.
    void validate() const;
};

/// Finite-difference step policy for the identification Jacobian:
/// h = max(kFdAbsStep, kFdRelStep * |nominal|), central differences. The step
/// is near the accuracy optimum (3 eps)^(1/3) for O(1) curvature: total error
/// ~ h^2 |f'''|/6 + eps |f|/h stays a few 1e-11, small enough that downstream
/// metric computations hold 1e-9 relative accuracy even on ill-conditioned
/// plans.
inline constexpr double kFdAbsStep = 5e-6;
inline constexpr double kFdRelStep = 5e-6;

/// End-effector position: translational part of the chained transform product,
/// with each joint driver contributing q_j plus its offset parameter.
Eigen::Vector3d forward_position(const KinematicModel& model, const Vector& params,
                                 const Configuration& q);

/// 3 x n_identifiable matrix of central-difference partials of the position
/// with respect to the identifiable parameters, evaluated at (q, params).
Matrix identification_jacobian(const KinematicModel& model, const Vector& params,
                               const Configuration& q);

/// Adds a least-squares correction to the identifiable parameters (joint
/// offsets included; measured joint readings are never touched).
Vector apply_parameter_update(const KinematicModel& model, const Vector& params,
                              const Vector& delta);

} // namespace calib
