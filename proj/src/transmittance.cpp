#include "pwcv/transmittance.hpp"

#include <cmath>

namespace pwcv {

namespace {

double probe_residual_majorant(const Medium& medium, const OpticalDepthCV& control) {
    constexpr std::size_t kProbes = 1024;
    double worst = 0.0;
    for (std::size_t i = 0; i <= kProbes; ++i) {
        const double s = medium.length * static_cast<double>(i) / static_cast<double>(kProbes);
        worst = std::max(worst, std::abs(medium.mu(s) - control.mu_control(s)));
    }
    return worst * 1.1;
}

}  // namespace

OpticalDepthCV optical_depth_cv(const Medium& medium, std::size_t budget_evals,
                                double epsilon) {
    OpticalDepthCV out;
    out.length = medium.length;
    std::size_t queries = 0;
    const Integrand g = [&](const Point& u) {
        ++queries;
        return medium.mu(u[0] * medium.length);
    };
    out.cv = PiecewiseCV::build(g, 1, {budget_evals}, epsilon);
    out.build_queries = queries;
    out.tau_control = out.cv.total_integral() * medium.length;
    out.residual_majorant = probe_residual_majorant(medium, out);
    return out;
}

OpticalDepthCV constant_control_cv(const Medium& medium) {
    OpticalDepthCV out;
    out.length = medium.length;
    const double tau = tau_oracle(medium);
    out.cv = PiecewiseCV::constant(1, tau / medium.length);
    out.build_queries = 0;
    out.tau_control = tau;
    out.residual_majorant = probe_residual_majorant(medium, out);
    return out;
}

TrackingResult transmittance_delta_tracking(const Medium& medium, Rng& rng) {
    TrackingResult res;
    if (medium.majorant <= 0.0) {
        res.value = 1.0;
        return res;
    }
    double s = 0.0;
    for (;;) {
        s -= std::log(1.0 - rng.uniform()) / medium.majorant;
        if (s >= medium.length) {
            res.value = 1.0;
            return res;
        }
        ++res.medium_queries;
        if (rng.uniform() < medium.mu(s) / medium.majorant) {
            res.value = 0.0;
            return res;
        }
    }
}

TrackingResult transmittance_adaptive_rrt(const Medium& medium, const OpticalDepthCV& control,
                                          Rng& rng) {
    TrackingResult res;
    res.medium_queries = control.build_queries;
    const double bound = control.residual_majorant;
    double value = std::exp(-control.tau_control);
    if (bound <= 0.0) {
        res.value = value;  // residual identically zero: exact control
        return res;
    }
    double s = 0.0;
    for (;;) {
        s -= std::log(1.0 - rng.uniform()) / bound;
        if (s >= medium.length) break;
        ++res.medium_queries;
        value *= 1.0 - (medium.mu(s) - control.mu_control(s)) / bound;
    }
    res.value = value;
    return res;
}

}  // namespace pwcv
