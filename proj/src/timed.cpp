#include "park/timed.hpp"

#include <cmath>

namespace park {

double pt_scale(const PtSpec& spec, double t) {
    if (t < spec.t0 || t >= spec.t0 + spec.T) {
        throw HorizonExceeded("pt_scale: t outside [t0, t0 + T)");
    }
    const double nu = std::tan(kPi * (t - spec.t0) / (2.0 * spec.T));
    return 1.0 + nu * nu;
}

InputPair pt_control(const PtSpec& spec, double t, const PolarState& state) {
    const double s = pt_scale(spec, t);
    const InputPair base = ges_control(spec.base, state);
    return {s * base.v, s * base.omega};
}

double time_dilation(const PtSpec& spec, double t) {
    if (t < spec.t0 || t >= spec.t0 + spec.T) {
        throw HorizonExceeded("time_dilation: t outside [t0, t0 + T)");
    }
    return spec.t0 + 2.0 * spec.T / kPi * std::tan(kPi * (t - spec.t0) / (2.0 * spec.T));
}

double inverse_dilation(const PtSpec& spec, double tau) {
    if (tau < spec.t0) throw HorizonExceeded("inverse_dilation: tau before t0");
    return spec.t0 + 2.0 * spec.T / kPi * std::atan(kPi * (tau - spec.t0) / (2.0 * spec.T));
}

double fxt_scale_from_value(const FxtSpec& spec, double V) {
    const double c = decay_constant(spec.base);
    const double vp = std::pow(V, spec.p);
    return std::exp(vp) / (vp * c * spec.p * spec.T);
}

std::optional<double> fxt_scale(const FxtSpec& spec, const PolarState& state) {
    const double V = clf_value(ges_clf(spec.base), state);
    if (V <= kParkedV) return std::nullopt;
    return fxt_scale_from_value(spec, V);
}

InputPair fxt_control(const FxtSpec& spec, const PolarState& state) {
    const auto kappa = fxt_scale(spec, state);
    if (!kappa) return {0.0, 0.0};
    const InputPair base = ges_control(spec.base, state);
    return {*kappa * base.v, *kappa * base.omega};
}

double settling_time_bound(const FxtSpec& spec, const PolarState& initial) {
    const double k_hi = quadratic_sandwich(ges_clf(spec.base), initial).upper;
    const double n = norm(initial);
    return spec.T * -std::expm1(-std::pow(k_hi, spec.p) * std::pow(n, 2.0 * spec.p));
}

double settling_time_from_value(const FxtSpec& spec, double V0) {
    return spec.T * -std::expm1(-std::pow(V0, spec.p));
}

}  // namespace park
