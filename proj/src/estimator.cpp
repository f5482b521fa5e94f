#include "pwcv/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pwcv {

namespace {

double sample_mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return s / static_cast<double>(xs.size() - 1);
}

void check_finite(double v, const Point& u) {
    if (std::isfinite(v)) return;
    std::string msg = "non-finite integrand value at (";
    for (std::size_t d = 0; d < u.size(); ++d)
        msg += (d ? ", " : "") + std::to_string(u[d]);
    throw std::runtime_error(msg + ")");
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nt = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

ResidualSample sample_residual(const PiecewiseCV& cv, const Integrand& g, Rng& rng) {
    const std::size_t m = cv.region_count();
    ResidualSample s;
    s.region = rng.uniform_index(m);
    const Region& r = cv.region(s.region);
    s.u.resize(cv.dim());
    for (std::size_t d = 0; d < cv.dim(); ++d)
        s.u[d] = rng.uniform(r.box.lo[d], r.box.hi[d]);
    s.p_h = 1.0 / (static_cast<double>(m) * r.box.volume());
    s.g_val = g(s.u);
    check_finite(s.g_val, s.u);
    s.h_val = eval_poly(r.coeffs, r.box, s.u);
    return s;
}

double estimate_alpha(std::span<const double> f_terms, std::span<const double> h_terms) {
    const std::size_t n = h_terms.size();
    if (n < 2 || f_terms.size() != n) return 1.0;
    const double mf = sample_mean(f_terms);
    const double mh = sample_mean(h_terms);
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (f_terms[i] - mf) * (h_terms[i] - mh);
        var += (h_terms[i] - mh) * (h_terms[i] - mh);
    }
    if (var < 1e-30) return 1.0;
    return cov / var;
}

Estimate estimate_full(const PiecewiseCV& cv, const Integrand& g, std::size_t n_residual,
                       Rng& rng, AlphaMode alpha_mode) {
    const double H = cv.total_integral();
    Estimate est;
    if (n_residual == 0) {
        est.value = H;
        est.cv_integral_part = H;
        return est;
    }

    std::vector<double> f_terms(n_residual), h_terms(n_residual);
    for (std::size_t i = 0; i < n_residual; ++i) {
        const ResidualSample s = sample_residual(cv, g, rng);
        f_terms[i] = s.g_val / s.p_h;
        h_terms[i] = s.h_val / s.p_h;
    }

    const double alpha = alpha_mode.kind == AlphaMode::Kind::fixed
                             ? alpha_mode.fixed_value
                             : estimate_alpha(f_terms, h_terms);

    std::vector<double> residual(n_residual);
    for (std::size_t i = 0; i < n_residual; ++i)
        residual[i] = f_terms[i] - alpha * h_terms[i];
    const double mean = sample_mean(residual);

    est.value = alpha * H + mean;
    est.n_samples = n_residual;
    est.alpha = alpha;
    est.empirical_variance = sample_variance(residual, mean);
    est.cv_integral_part = alpha * H;
    return est;
}

Box BucketGrid::bucket_box(std::size_t index) const {
    const std::size_t B = resolution.size();
    std::vector<double> lo(B), hi(B);
    std::size_t rem = index;
    for (std::size_t d = B; d-- > 0;) {
        const std::size_t r = resolution[d];
        const std::size_t i = rem % r;
        rem /= r;
        lo[d] = static_cast<double>(i) / static_cast<double>(r);
        hi[d] = static_cast<double>(i + 1) / static_cast<double>(r);
    }
    return Box(std::move(lo), std::move(hi));
}

std::vector<Estimate> estimate_buckets(const PiecewiseCV& cv, const Integrand& g,
                                       const BucketGrid& grid, std::size_t spp,
                                       std::uint64_t seed, AlphaMode alpha_mode,
                                       std::size_t threads) {
    if (grid.dims_bucketed() > cv.dim())
        throw std::invalid_argument("estimate_buckets: grid has more dims than the CV");
    const std::size_t n_buckets = grid.bucket_count();
    std::vector<Estimate> out(n_buckets);

    parallel_for(n_buckets, threads, [&](std::size_t b) {
        const Box bucket = grid.bucket_box(b);
        Box full = bucket;
        for (std::size_t d = bucket.dim(); d < cv.dim(); ++d) {
            full.lo.push_back(0.0);
            full.hi.push_back(1.0);
        }
        const double bucket_vol = full.volume();
        const double cv_part = cv.bucket_integral(bucket);

        Estimate est;
        if (spp == 0) {
            est.value = cv_part / bucket_vol;
            est.cv_integral_part = cv_part / bucket_vol;
            out[b] = est;
            return;
        }

        // Region slices intersecting this bucket.
        struct Slice {
            std::size_t region;
            Box box;
            double volume;
            std::size_t n = 0;
        };
        std::vector<Slice> slices;
        for (std::size_t r = 0; r < cv.region_count(); ++r) {
            Box inter;
            if (cv.region(r).box.intersect(full, inter))
                slices.push_back({r, inter, inter.volume(), 0});
        }
        if (slices.empty())
            throw std::logic_error("estimate_buckets: bucket with no region slice");

        // Proportional allocation with largest-remainder rounding.
        double total_vol = 0.0;
        for (const Slice& s : slices) total_vol += s.volume;
        std::size_t assigned = 0;
        std::vector<std::pair<double, std::size_t>> remainders;
        for (std::size_t j = 0; j < slices.size(); ++j) {
            const double want = static_cast<double>(spp) * slices[j].volume / total_vol;
            slices[j].n = static_cast<std::size_t>(want);
            assigned += slices[j].n;
            remainders.push_back({want - std::floor(want), j});
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t k = 0; assigned < spp; ++k, ++assigned)
            ++slices[remainders[k % remainders.size()].second].n;

        Rng rng(mix_seed(seed, b));
        std::vector<double> f_terms, h_terms;
        f_terms.reserve(spp);
        h_terms.reserve(spp);
        for (const Slice& s : slices) {
            if (s.n == 0) continue;
            // Mixture pdf of the realized allocation within the bucket.
            const double p = static_cast<double>(s.n) /
                             (static_cast<double>(spp) * s.volume);
            const Region& reg = cv.region(s.region);
            for (std::size_t i = 0; i < s.n; ++i) {
                Point u(cv.dim());
                for (std::size_t d = 0; d < cv.dim(); ++d)
                    u[d] = rng.uniform(s.box.lo[d], s.box.hi[d]);
                const double gv = g(u);
                check_finite(gv, u);
                const double hv = eval_poly(reg.coeffs, reg.box, u);
                f_terms.push_back(gv / p);
                h_terms.push_back(hv / p);
            }
        }

        const double alpha = alpha_mode.kind == AlphaMode::Kind::fixed
                                 ? alpha_mode.fixed_value
                                 : estimate_alpha(f_terms, h_terms);
        std::vector<double> residual(f_terms.size());
        for (std::size_t i = 0; i < f_terms.size(); ++i)
            residual[i] = f_terms[i] - alpha * h_terms[i];
        const double mean = sample_mean(residual);

        est.value = (alpha * cv_part + mean) / bucket_vol;
        est.n_samples = f_terms.size();
        est.alpha = alpha;
        est.empirical_variance = sample_variance(residual, mean);
        est.cv_integral_part = alpha * cv_part / bucket_vol;
        out[b] = est;
    });
    return out;
}

RunStatistics run_statistics(std::span<const double> estimates, double reference) {
    if (estimates.empty()) throw std::invalid_argument("run_statistics: no runs");
    RunStatistics s;
    s.mean = sample_mean(estimates);
    s.variance = sample_variance(estimates, s.mean);
    double se = 0.0;
    for (double e : estimates) se += (e - reference) * (e - reference);
    s.rmse = std::sqrt(se / static_cast<double>(estimates.size()));
    s.ci_half_width = 1.96 * std::sqrt(s.variance / static_cast<double>(estimates.size()));
    return s;
}

}  // namespace pwcv
