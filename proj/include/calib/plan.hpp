#pragma once

#include <vector>

#include "calib/kinematics.hpp"

namespace calib {

/// Design of experiments: joint configurations with integer multiplicities.
struct PlanEntry {
    Configuration q;
    int multiplicity = 1;
};

struct Plan {
    std::vector<PlanEntry> entries;

    int total_count() const {
        int m = 0;
        for (const auto& e : entries) m += e.multiplicity;
        return m;
    }
};

/// The single configuration at which post-calibration accuracy is scored.
struct TestPose {
    Configuration q0;
};

} // namespace calib
