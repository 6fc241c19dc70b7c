#pragma once

#include <iosfwd>
#include <string>

#include "calib/identification.hpp"
#include "calib/kinematics.hpp"
#include "calib/monte_carlo.hpp"
#include "calib/plan.hpp"

namespace calib {

// Model definition file: line-oriented text, '#' comments.
//   joints <n>
//   param <name> <nominal> <m|rad> <identifiable|fixed>
//   joint_limit <index> <lo> <hi>
//   trans|rot x|y|z const <value>
//   trans|rot x|y|z joint <index> [offset <param-name>]
//   trans|rot x|y|z param <param-name>
// Transform lines appear in chain order (base first, tool last).
KinematicModel parse_model(std::istream& in, const std::string& source_name = "<stream>");
KinematicModel load_model(const std::string& path);
std::string serialize_model(const KinematicModel& model);
void save_model(const KinematicModel& model, const std::string& path);

// Plan CSV: header q_1,...,q_n,multiplicity; angles in radians.
Plan parse_plan_csv(std::istream& in, int n_joints, const std::string& source_name = "<stream>");
Plan load_plan_csv(const std::string& path, int n_joints);
std::string serialize_plan_csv(const Plan& plan);
void save_plan_csv(const Plan& plan, const std::string& path);

// Measurement CSV: header q_1,...,q_n,p_x,p_y,p_z.
MeasurementSet parse_measurements_csv(std::istream& in, int n_joints,
                                      const std::string& source_name = "<stream>");
MeasurementSet load_measurements_csv(const std::string& path, int n_joints);
std::string serialize_measurements_csv(const MeasurementSet& data);
void save_measurements_csv(const MeasurementSet& data, const std::string& path);

// Campaign CSV: trial,error_m rows followed by a '# summary' block.
std::string serialize_campaign_csv(const std::vector<double>& errors,
                                   const CampaignStats& stats, std::uint64_t seed);

/// Writes a string to a file, errors mapped to InputError.
void write_file(const std::string& path, const std::string& content);

} // namespace calib
