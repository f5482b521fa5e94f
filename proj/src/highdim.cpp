#include "pwcv/highdim.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace pwcv {

namespace {

void validate(const ProjectionConfig& cfg) {
    if (cfg.cv_dims == 0 || cfg.cv_dims > cfg.full_dims)
        throw std::invalid_argument("ProjectionConfig: need 1 <= L <= D");
    if (cfg.n_star == 0) throw std::invalid_argument("ProjectionConfig: n_star must be >= 1");
}

std::uint64_t node_key(const Point& u, std::uint64_t seed) {
    std::uint64_t h = splitmix64(seed);
    for (double c : u) h = mix_seed(h, std::bit_cast<std::uint64_t>(c));
    return h;
}

}  // namespace

Integrand project_integrand(const Integrand& g_full, const ProjectionConfig& cfg) {
    validate(cfg);
    if (cfg.cv_dims == cfg.full_dims) return g_full;
    return [g_full, cfg](const Point& u) {
        Rng inner(node_key(u, cfg.seed));
        Point full(cfg.full_dims);
        std::copy(u.begin(), u.end(), full.begin());
        double sum = 0.0;
        for (std::size_t i = 0; i < cfg.n_star; ++i) {
            for (std::size_t d = cfg.cv_dims; d < cfg.full_dims; ++d)
                full[d] = inner.uniform();
            sum += g_full(full);
        }
        return sum / static_cast<double>(cfg.n_star);
    };
}

Estimate estimate_highdim(const PiecewiseCV& cv, const Integrand& g_full,
                          const ProjectionConfig& cfg, std::size_t n_residual, Rng& rng,
                          AlphaMode alpha_mode) {
    validate(cfg);
    if (cv.dim() != cfg.cv_dims)
        throw std::invalid_argument("estimate_highdim: CV dimension != cfg.cv_dims");
    if (cfg.cv_dims == cfg.full_dims)
        return estimate_full(cv, g_full, n_residual, rng, alpha_mode);

    const double H = cv.total_integral();
    Estimate est;
    if (n_residual == 0) {
        est.value = H;
        est.cv_integral_part = H;
        return est;
    }

    const std::size_t m = cv.region_count();
    std::vector<double> f_terms(n_residual), h_terms(n_residual);
    Point full(cfg.full_dims);
    for (std::size_t i = 0; i < n_residual; ++i) {
        const std::size_t r_idx = rng.uniform_index(m);
        const Region& r = cv.region(r_idx);
        for (std::size_t d = 0; d < cfg.cv_dims; ++d)
            full[d] = rng.uniform(r.box.lo[d], r.box.hi[d]);
        for (std::size_t d = cfg.cv_dims; d < cfg.full_dims; ++d)
            full[d] = rng.uniform();
        const double p_h = 1.0 / (static_cast<double>(m) * r.box.volume());
        const double gv = g_full(full);
        if (!std::isfinite(gv))
            throw std::runtime_error("estimate_highdim: non-finite integrand value");
        const Point prefix(full.begin(), full.begin() + static_cast<long>(cfg.cv_dims));
        const double hv = eval_poly(r.coeffs, r.box, prefix);
        f_terms[i] = gv / p_h;
        h_terms[i] = hv / p_h;
    }

    const double alpha = alpha_mode.kind == AlphaMode::Kind::fixed
                             ? alpha_mode.fixed_value
                             : estimate_alpha(f_terms, h_terms);
    double mean = 0.0;
    std::vector<double> residual(n_residual);
    for (std::size_t i = 0; i < n_residual; ++i) {
        residual[i] = f_terms[i] - alpha * h_terms[i];
        mean += residual[i];
    }
    mean /= static_cast<double>(n_residual);

    est.value = alpha * H + mean;
    est.n_samples = n_residual;
    est.alpha = alpha;
    double var = 0.0;
    if (n_residual > 1) {
        for (double rr : residual) var += (rr - mean) * (rr - mean);
        var /= static_cast<double>(n_residual - 1);
    }
    est.empirical_variance = var;
    est.cv_integral_part = alpha * H;
    return est;
}

}  // namespace pwcv
