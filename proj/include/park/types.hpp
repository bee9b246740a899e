#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace park {

inline constexpr double kPi = std::numbers::pi;

/// Distance below which the polar transform is treated as singular.
inline constexpr double kRhoMin = 1e-9;

/// Lyapunov value below which the vehicle counts as parked.
inline constexpr double kParkedV = 1e-12;

struct CartesianPose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

/// (rho, delta, gamma): distance to target, polar angle, line-of-sight angle.
struct PolarState {
    double rho = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
};

/// (v, omega): forward and angular velocity commands.
struct InputPair {
    double v = 0.0;
    double omega = 0.0;
};

struct PolarDerivative {
    double rho_dot = 0.0;
    double delta_dot = 0.0;
    double gamma_dot = 0.0;
};

struct CartesianDerivative {
    double x_dot = 0.0;
    double y_dot = 0.0;
    double theta_dot = 0.0;
};

/// Euclidean norm sqrt(rho^2 + delta^2 + gamma^2), used as the target-distance seminorm.
inline double norm(const PolarState& s) {
    return std::sqrt(s.rho * s.rho + s.delta * s.delta + s.gamma * s.gamma);
}

inline bool is_finite(const PolarState& s) {
    return std::isfinite(s.rho) && std::isfinite(s.delta) && std::isfinite(s.gamma);
}

// Error hierarchy. Every failure the library reports derives from park::Error.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateTransform : public Error {
public:
    using Error::Error;
};

class SingularRho : public Error {
public:
    using Error::Error;
};

class DomainViolation : public Error {
public:
    using Error::Error;
};

class DomainLimit : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class TailNotConverged : public Error {
public:
    using Error::Error;
};

class HorizonExceeded : public Error {
public:
    using Error::Error;
};

class InadmissibleInitialCondition : public Error {
public:
    using Error::Error;
};

class InsufficientDecay : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace park
