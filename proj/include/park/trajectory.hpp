#pragma once

#include <limits>
#include <string>
#include <vector>

#include "park/types.hpp"

namespace park {

enum class RunStatus { Completed, Parked, SingularRho, HorizonExceeded, NonFiniteState };

const char* to_string(RunStatus status);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Sample {
    double t = 0.0;
    PolarState state{};
    CartesianPose pose{};
    InputPair input{};
    double V = 0.0;
    double running_cost = kNaN;  // NaN unless the controller defines one
    double eps1_hat = kNaN;      // NaN unless adaptive
    double eps2_hat = kNaN;
};

/// Extrema over every accepted integrator step, not just the stored samples.
struct StepExtrema {
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    double min_delta = std::numeric_limits<double>::infinity();
    double max_delta = -std::numeric_limits<double>::infinity();
    double min_v = std::numeric_limits<double>::infinity();
    double max_abs_v = 0.0;
    double max_abs_omega = 0.0;
};

struct Trajectory {
    std::vector<Sample> samples;
    StepExtrema extrema{};
    RunStatus status = RunStatus::Completed;
    std::string message;
    bool adaptive = false;
    std::size_t steps = 0;

    bool empty() const { return samples.empty(); }
    const Sample& front() const { return samples.front(); }
    const Sample& back() const { return samples.back(); }
};

}  // namespace park
