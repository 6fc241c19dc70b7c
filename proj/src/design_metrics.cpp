#include "calib/design_metrics.hpp"

#include <cmath>

namespace calib {

double rho0_squared(const KinematicModel& model, const Vector& params, const Plan& plan,
                    const TestPose& test_pose, double sigma) {
    const Matrix M = information_matrix(model, params, plan);
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success || !llt_full_rank(llt)) return kInfeasiblePlan;
    const Matrix J0 = identification_jacobian(model, params, test_pose.q0);
    const Matrix X = llt.solve(J0.transpose()); // M X = J0^T
    const double t = (J0 * X).trace();
    if (!std::isfinite(t) || t < 0.0) return kInfeasiblePlan;
    return sigma * sigma * t;
}

double d_criterion(const KinematicModel& model, const Vector& params, const Plan& plan) {
    const Matrix M = information_matrix(model, params, plan);
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success || !llt_full_rank(llt)) return kInfeasiblePlan;
    double det = 1.0;
    const auto& L = llt.matrixLLT();
    for (Eigen::Index i = 0; i < M.rows(); ++i) det *= L(i, i) * L(i, i);
    if (!(det > 0.0) || !std::isfinite(det)) return kInfeasiblePlan;
    return 1.0 / det;
}

double a_criterion(const KinematicModel& model, const Vector& params, const Plan& plan) {
    const Matrix M = information_matrix(model, params, plan);
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success || !llt_full_rank(llt)) return kInfeasiblePlan;
    const double t = llt.solve(Matrix::Identity(M.rows(), M.cols())).trace();
    if (!std::isfinite(t) || t < 0.0) return kInfeasiblePlan;
    return t;
}

ScreeningReport screen_parameters(const KinematicModel& model, const Vector& params,
                                  const std::vector<Configuration>& probe_configs,
                                  double col_tol, double rank_tol) {
    const int n = model.identifiable_count();
    const auto idx = model.identifiable_indices();
    ScreeningReport rep;
    rep.max_column_norm.assign(n, 0.0);
    rep.influential.assign(n, false);

    // Stacked Jacobian over all probes; its SVD is better conditioned than an
    // eigendecomposition of the aggregated information matrix.
    Matrix A(3 * static_cast<Eigen::Index>(probe_configs.size()), n);
    for (size_t i = 0; i < probe_configs.size(); ++i) {
        const Matrix J = identification_jacobian(model, params, probe_configs[i]);
        for (int k = 0; k < n; ++k)
            rep.max_column_norm[k] = std::max(rep.max_column_norm[k], J.col(k).norm());
        A.middleRows(3 * static_cast<Eigen::Index>(i), 3) = J;
    }

    for (int k = 0; k < n; ++k) {
        rep.influential[k] = rep.max_column_norm[k] > col_tol;
        if (!rep.influential[k])
            rep.non_influential_names.push_back(model.parameters[idx[k]].name);
    }

    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (smax <= 0.0 || sv(k) < rank_tol * smax)
            rep.near_null_directions.emplace_back(sv(k), svd.matrixV().col(k));
    return rep;
}

} // namespace calib
