#include "calib/identification.hpp"

#include <cmath>
#include <fmt/format.h>

namespace calib {

Vector solve_least_squares(const std::vector<Matrix>& jacobians,
                           const std::vector<Eigen::Vector3d>& residuals,
                           double rank_tol) {
    if (jacobians.size() != residuals.size())
        throw InputError("jacobian and residual list lengths differ");
    if (jacobians.empty())
        throw InputError("empty least-squares system");

    const Eigen::Index n = jacobians.front().cols();
    const Eigen::Index rows = 3 * static_cast<Eigen::Index>(jacobians.size());
    Matrix A(rows, n);
    Vector b(rows);
    for (size_t i = 0; i < jacobians.size(); ++i) {
        if (jacobians[i].cols() != n || jacobians[i].rows() != 3)
            throw InputError("inconsistent Jacobian dimensions in stacked system");
        A.middleRows(3 * static_cast<Eigen::Index>(i), 3) = jacobians[i];
        b.segment(3 * static_cast<Eigen::Index>(i), 3) = residuals[i];
    }

    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    if (rows < n || smax <= 0.0 || sv(sv.size() - 1) < rank_tol * smax) {
        std::string msg = "parameter set not identifiable from the given measurements;";
        msg += fmt::format(" singular values span [{:.3e}, {:.3e}];", sv(sv.size() - 1), smax);
        msg += " null-space direction(s):";
        for (Eigen::Index k = 0; k < sv.size(); ++k) {
            if (rows < n || sv(k) < rank_tol * smax) {
                msg += " [";
                for (Eigen::Index j = 0; j < n; ++j)
                    msg += fmt::format("{}{:.4f}", j ? " " : "", svd.matrixV()(j, k));
                msg += "]";
            }
        }
        throw IdentifiabilityError(msg);
    }
    return svd.solve(b);
}

IdentifyResult identify(const KinematicModel& model, const Vector& nominal_params,
                        const MeasurementSet& data, double tol, int max_iter) {
    if (data.records.empty())
        throw InputError("empty measurement set");
    for (const auto& r : data.records)
        if (r.q.size() != model.n_joints)
            throw InputError("measurement joint count does not match model");

    Vector params = nominal_params;
    std::vector<double> history;
    std::vector<Matrix> jacobians(data.records.size());
    std::vector<Eigen::Vector3d> residuals(data.records.size());

    for (int it = 1; it <= max_iter; ++it) {
        for (size_t i = 0; i < data.records.size(); ++i) {
            jacobians[i] = identification_jacobian(model, params, data.records[i].q);
            residuals[i] = data.records[i].p - forward_position(model, params, data.records[i].q);
        }
        const Vector delta = solve_least_squares(jacobians, residuals);
        params = apply_parameter_update(model, params, delta);

        // Predicted position correction at each measurement configuration.
        double step = 0.0;
        for (const auto& J : jacobians) step = std::max(step, (J * delta).norm());
        history.push_back(step);

        if (step < tol) {
            double ss = 0.0;
            for (size_t i = 0; i < data.records.size(); ++i) {
                const Eigen::Vector3d r =
                    data.records[i].p - forward_position(model, params, data.records[i].q);
                ss += r.squaredNorm();
            }
            return {params, it, std::sqrt(ss)};
        }
    }
    throw ConvergenceError(
        fmt::format("identification did not converge in {} iterations (last step {:.3e} m)",
                    max_iter, history.back()),
        history);
}

Matrix information_matrix(const KinematicModel& model, const Vector& params, const Plan& plan) {
    if (plan.entries.empty())
        throw InputError("empty plan");
    const int n = model.identifiable_count();
    Matrix M = Matrix::Zero(n, n);
    for (const auto& e : plan.entries) {
        const Matrix J = identification_jacobian(model, params, e.q);
        M.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose(),
                                                     static_cast<double>(e.multiplicity));
    }
    M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    return M;
}

Matrix covariance(const KinematicModel& model, const Vector& params, const Plan& plan,
                  double sigma) {
    const Matrix M = information_matrix(model, params, plan);
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success || !llt_full_rank(llt))
        throw IdentifiabilityError("information matrix is singular for this plan");
    return sigma * sigma * llt.solve(Matrix::Identity(M.rows(), M.cols()));
}

} // namespace calib
