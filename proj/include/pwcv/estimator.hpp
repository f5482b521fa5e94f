#pragma once

#include <span>

#include "pwcv/builder.hpp"
#include "pwcv/rng.hpp"

namespace pwcv {

struct ResidualSample {
    Point u;
    std::size_t region = 0;
    double p_h = 0.0;   // 1 / (M * |region|)
    double g_val = 0.0;
    double h_val = 0.0;
};

struct Estimate {
    double value = 0.0;
    std::size_t n_samples = 0;
    double alpha = 1.0;
    double empirical_variance = 0.0;  // sample variance of the per-sample residual term
    double cv_integral_part = 0.0;    // alpha * H contribution
};

struct AlphaMode {
    enum class Kind { fixed, per_run };
    Kind kind = Kind::per_run;
    double fixed_value = 1.0;

    static AlphaMode fixed(double a) { return {Kind::fixed, a}; }
    static AlphaMode per_run() { return {Kind::per_run, 1.0}; }
};

// Region-uniform residual sampling: region index ~ Uniform{0..M-1}, point
// uniform inside its box.
ResidualSample sample_residual(const PiecewiseCV& cv, const Integrand& g, Rng& rng);

// alpha = Cov(F, H) / Var(H) from paired samples F_i = g_i/p_i, H_i = h_i/p_i;
// falls back to 1 for fewer than two samples or degenerate Var(H).
double estimate_alpha(std::span<const double> f_terms, std::span<const double> h_terms);

// Full-domain estimate: alpha*H + mean((g - alpha*h)/p_h).
Estimate estimate_full(const PiecewiseCV& cv, const Integrand& g, std::size_t n_residual,
                       Rng& rng, AlphaMode alpha_mode = AlphaMode::per_run());

// Uniform bucket grid over the first B primary dimensions.
struct BucketGrid {
    std::vector<std::size_t> resolution;  // size B <= D

    std::size_t dims_bucketed() const { return resolution.size(); }
    std::size_t bucket_count() const {
        std::size_t n = 1;
        for (std::size_t r : resolution) n *= r;
        return n;
    }
    Box bucket_box(std::size_t index) const;
    double bucket_volume() const {
        double v = 1.0;
        for (std::size_t r : resolution) v /= static_cast<double>(r);
        return v;
    }
};

// Per-bucket estimates (bucket means under a box reconstruction kernel).
// Residual samples are stratified over the region slices inside each bucket,
// allocated proportionally to slice hypervolume with largest-remainder
// rounding.  Each bucket draws from an independent stream derived from
// (seed, bucket index), so results are thread-count independent.
std::vector<Estimate> estimate_buckets(const PiecewiseCV& cv, const Integrand& g,
                                       const BucketGrid& grid, std::size_t spp,
                                       std::uint64_t seed,
                                       AlphaMode alpha_mode = AlphaMode::per_run(),
                                       std::size_t threads = 1);

struct RunStatistics {
    double mean = 0.0;
    double variance = 0.0;  // unbiased across runs
    double rmse = 0.0;
    double ci_half_width = 0.0;  // 1.96 * stderr of the mean
};

RunStatistics run_statistics(std::span<const double> estimates, double reference);

}  // namespace pwcv
