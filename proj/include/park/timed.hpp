#pragma once

#include <optional>

#include "park/controllers.hpp"

namespace park {

/// Prescribed-time wrapper: inputs scaled by 1 + tan^2(pi (t - t0) / (2T)).
struct PtSpec {
    GesControllerSpec base{};
    double T = 1.0;
    double t0 = 0.0;
};

/// Throws HorizonExceeded for t >= t0 + T (and for t < t0).
double pt_scale(const PtSpec& spec, double t);

/// scale(t) * base(state). Scaling the whole base output (not only v) makes the
/// closed loop an exact time rescaling of the base closed loop.
InputPair pt_control(const PtSpec& spec, double t, const PolarState& state);

/// tau = t0 + (2T/pi) tan(pi (t - t0)/(2T)).
double time_dilation(const PtSpec& spec, double t);

/// t = t0 + (2T/pi) atan(pi (tau - t0)/(2T)).
double inverse_dilation(const PtSpec& spec, double tau);

/// Fixed-time wrapper: inputs scaled by kappa = exp(V^p) V^{-p} / (c p T).
struct FxtSpec {
    GesControllerSpec base{};
    double T = 1.0;
    double p = 0.25;
};

/// kappa, or nullopt inside the deadband V <= kParkedV (caller outputs zero input).
std::optional<double> fxt_scale(const FxtSpec& spec, const PolarState& state);
double fxt_scale_from_value(const FxtSpec& spec, double V);

InputPair fxt_control(const FxtSpec& spec, const PolarState& state);

/// T (1 - exp(-K2 |s0|^{2p})) with K2 = k_hi^p, k_hi the upper sandwich constant.
double settling_time_bound(const FxtSpec& spec, const PolarState& initial);

/// Exact settling time of the comparison system dV/dt = -(1/(pT)) exp(V^p) V^{1-p}:
/// T (1 - exp(-V0^p)).
double settling_time_from_value(const FxtSpec& spec, double V0);

}  // namespace park
