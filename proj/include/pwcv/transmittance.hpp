#pragma once

#include "pwcv/builder.hpp"
#include "pwcv/medium.hpp"
#include "pwcv/rng.hpp"

namespace pwcv {

// Adaptive polynomial control extinction for a medium: a 1D CV of
// mu(u * length) over the unit interval plus its analytic optical depth.
struct OpticalDepthCV {
    PiecewiseCV cv;
    double length = 0.0;
    double tau_control = 0.0;     // analytic integral of mu_c over [0, length]
    std::size_t build_queries = 0;
    double residual_majorant = 0.0;  // bound on |mu - mu_c|, probe grid + 10% margin

    double mu_control(double s) const { return cv.value_at({s / length}); }
};

// Default budget of 9 medium queries gives the 4-region control (3 splits).
OpticalDepthCV optical_depth_cv(const Medium& medium, std::size_t budget_evals = 9,
                                double epsilon = 1e-5);

// Constant control extinction set to the average extinction tau/t.
OpticalDepthCV constant_control_cv(const Medium& medium);

struct TrackingResult {
    double value = 0.0;
    std::size_t medium_queries = 0;
};

// Woodcock delta tracking; returns 0 or 1 with expectation exp(-tau).
TrackingResult transmittance_delta_tracking(const Medium& medium, Rng& rng);

// Residual ratio tracking around the control extinction: exp(-tau_c) times a
// product of (1 - (mu - mu_c)/majorant_res) factors at Poisson collisions.
// Query count includes the control's build queries.
TrackingResult transmittance_adaptive_rrt(const Medium& medium, const OpticalDepthCV& control,
                                          Rng& rng);

}  // namespace pwcv
