#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "calib/analytic_2r.hpp"
#include "calib/design_metrics.hpp"
#include "calib/io.hpp"
#include "calib/monte_carlo.hpp"
#include "calib/plan_optimizer.hpp"

namespace py = pybind11;
using namespace calib;

namespace {

Plan plan_from_array(const Eigen::MatrixXd& configs, const std::vector<int>& multiplicities) {
    Plan plan;
    for (Eigen::Index i = 0; i < configs.rows(); ++i) {
        const int mult = multiplicities.empty() ? 1 : multiplicities.at(i);
        plan.entries.push_back({configs.row(i).transpose(), mult});
    }
    return plan;
}

Eigen::MatrixXd plan_to_array(const Plan& plan) {
    if (plan.entries.empty()) return {};
    Eigen::MatrixXd out(plan.entries.size(), plan.entries.front().q.size());
    for (size_t i = 0; i < plan.entries.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = plan.entries[i].q.transpose();
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Measurement-plan design for serial-manipulator geometric calibration";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<IdentifiabilityError>(m, "IdentifiabilityError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<KinematicModel>(m, "KinematicModel")
        .def_readonly("n_joints", &KinematicModel::n_joints)
        .def("parameter_count", &KinematicModel::parameter_count)
        .def("identifiable_count", &KinematicModel::identifiable_count)
        .def("nominal_parameters", &KinematicModel::nominal_parameters)
        .def("parameter_names", [](const KinematicModel& mm) {
            std::vector<std::string> names;
            for (const auto& p : mm.parameters) names.push_back(p.name);
            return names;
        });

    m.def("load_model", &load_model, py::arg("path"));
    m.def("serialize_model", &serialize_model);
    m.def(
        "two_link_model",
        [](double l1, double l2, const std::string& set) {
            TwoLinkParams p;
            if (set == "link-lengths")
                p = TwoLinkParams::LinkLengths;
            else if (set == "joint-offsets")
                p = TwoLinkParams::JointOffsets;
            else if (set == "both")
                p = TwoLinkParams::Both;
            else
                throw InputError("parameter set must be link-lengths, joint-offsets or both");
            return make_two_link_model(l1, l2, p);
        },
        py::arg("l1") = 1.0, py::arg("l2") = 0.8, py::arg("parameter_set") = "link-lengths");

    m.def("forward_position", &forward_position, py::arg("model"), py::arg("params"),
          py::arg("q"));
    m.def("identification_jacobian", &identification_jacobian, py::arg("model"),
          py::arg("params"), py::arg("q"));

    m.def(
        "information_matrix",
        [](const KinematicModel& model, const Vector& params, const Eigen::MatrixXd& configs,
           const std::vector<int>& mult) {
            return information_matrix(model, params, plan_from_array(configs, mult));
        },
        py::arg("model"), py::arg("params"), py::arg("configs"),
        py::arg("multiplicities") = std::vector<int>{});
    m.def(
        "covariance",
        [](const KinematicModel& model, const Vector& params, const Eigen::MatrixXd& configs,
           double sigma) {
            return covariance(model, params, plan_from_array(configs, {}), sigma);
        },
        py::arg("model"), py::arg("params"), py::arg("configs"), py::arg("sigma"));
    m.def(
        "rho0_squared",
        [](const KinematicModel& model, const Vector& params, const Eigen::MatrixXd& configs,
           const Vector& q0, double sigma) {
            return rho0_squared(model, params, plan_from_array(configs, {}), TestPose{q0},
                                sigma);
        },
        py::arg("model"), py::arg("params"), py::arg("configs"), py::arg("test_pose"),
        py::arg("sigma"));

    m.def(
        "identify",
        [](const KinematicModel& model, const Vector& nominal, const Eigen::MatrixXd& qs,
           const Eigen::MatrixXd& ps, double tol, int max_iter) {
            MeasurementSet data;
            for (Eigen::Index i = 0; i < qs.rows(); ++i)
                data.records.push_back(
                    {qs.row(i).transpose(), Eigen::Vector3d(ps.row(i).transpose())});
            const auto res = identify(model, nominal, data, tol, max_iter);
            return py::make_tuple(res.params, res.iterations, res.final_residual_norm);
        },
        py::arg("model"), py::arg("nominal_params"), py::arg("configs"), py::arg("positions"),
        py::arg("tol") = 1e-9, py::arg("max_iter") = 20);

    // Closed-form two-link reference.
    py::class_<TwoLinkCase>(m, "TwoLinkCase")
        .def(py::init([](double l1, double l2, double sigma, int m, double q20) {
                 TwoLinkCase c;
                 c.l1 = l1;
                 c.l2 = l2;
                 c.sigma = sigma;
                 c.m = m;
                 c.q20 = q20;
                 return c;
             }),
             py::arg("l1") = 1.0, py::arg("l2") = 0.8, py::arg("sigma") = 1e-3,
             py::arg("m") = 2, py::arg("q20") = 0.0);
    m.def("cov_2r", [](const TwoLinkCase& c, const std::vector<double>& q2) {
        return cov_2r(c, q2);
    });
    m.def("rho0_2r", [](const TwoLinkCase& c, const std::vector<double>& q2) {
        return rho0_2r(c, q2);
    });
    m.def("optimal_S", &optimal_S);
    m.def("rho0_min", &rho0_min);
    m.def("decompose_plan", &decompose_plan, py::arg("case"), py::arg("S_target"));

    py::class_<DesignReport>(m, "DesignReport")
        .def_property_readonly("plan", [](const DesignReport& r) { return plan_to_array(r.plan); })
        .def_readonly("rho0", &DesignReport::rho0)
        .def_readonly("rho0_sq", &DesignReport::rho0_sq)
        .def_readonly("d_score", &DesignReport::d_score)
        .def_readonly("a_score", &DesignReport::a_score)
        .def_readonly("n_singular_starts", &DesignReport::n_singular_starts)
        .def_readonly("evaluations", &DesignReport::evaluations);

    m.def(
        "optimize_plan",
        [](const KinematicModel& model, const Vector& q0, int mcount, double sigma,
           int n_starts, double filter_quantile, double local_tol, std::uint64_t seed) {
            DesignProblem problem;
            problem.model = model;
            problem.params = model.nominal_parameters();
            problem.test_pose.q0 = q0;
            problem.m = mcount;
            problem.sigma = sigma;
            OptimizerSettings settings;
            settings.n_starts = n_starts;
            settings.filter_quantile = filter_quantile;
            settings.local_tol = local_tol;
            settings.rng_seed = seed;
            return optimize_plan(problem, settings);
        },
        py::arg("model"), py::arg("test_pose"), py::arg("m"), py::arg("sigma") = 1e-3,
        py::arg("n_starts") = 512, py::arg("filter_quantile") = 0.1,
        py::arg("local_tol") = 1e-7, py::arg("seed") = 0);

    py::class_<CampaignStats>(m, "CampaignStats")
        .def_readonly("n_trials", &CampaignStats::n_trials)
        .def_readonly("n_failed", &CampaignStats::n_failed)
        .def_readonly("mean_error", &CampaignStats::mean_error)
        .def_readonly("std_error", &CampaignStats::std_error)
        .def_readonly("rms_error", &CampaignStats::rms_error)
        .def_readonly("p5", &CampaignStats::p5)
        .def_readonly("p50", &CampaignStats::p50)
        .def_readonly("p95", &CampaignStats::p95);

    m.def(
        "run_campaign",
        [](const KinematicModel& model, const Vector& nominal, const Vector& truth,
           const Eigen::MatrixXd& configs, const Vector& q0, double sigma, int n_trials,
           std::uint64_t seed) {
            return run_campaign(model, nominal, truth, plan_from_array(configs, {}),
                                TestPose{q0}, sigma, n_trials, seed);
        },
        py::arg("model"), py::arg("nominal_params"), py::arg("true_params"), py::arg("configs"),
        py::arg("test_pose"), py::arg("sigma"), py::arg("n_trials"), py::arg("seed") = 0);
}
