#pragma once

#include "pwcv/estimator.hpp"

namespace pwcv {

struct ProjectionConfig {
    std::size_t cv_dims = 2;    // L, dimensions the CV covers
    std::size_t full_dims = 6;  // D, full integrand dimensionality
    std::size_t n_star = 4;     // inner MC samples per projected evaluation
    std::uint64_t seed = 0;     // keys the per-node inner streams
};

// L-dim projection of a D-dim integrand: mean of n_star trailing-dimension
// samples.  The inner stream is keyed by the evaluation point so rebuilding
// the CV with the same seed replays exactly.  For CV construction only.
Integrand project_integrand(const Integrand& g_full, const ProjectionConfig& cfg);

// Unbiased D-dim estimate around an L-dim CV: each residual sample pairs a
// region-uniform prefix with a fresh uniform suffix.
Estimate estimate_highdim(const PiecewiseCV& cv, const Integrand& g_full,
                          const ProjectionConfig& cfg, std::size_t n_residual, Rng& rng,
                          AlphaMode alpha_mode = AlphaMode::per_run());

}  // namespace pwcv
