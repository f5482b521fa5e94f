#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pwcv/highdim.hpp"
#include "pwcv/stats.hpp"

using namespace pwcv;

TEST_CASE("project_integrand") {
    SUBCASE("suffix-independent integrand projects exactly") {
        const Integrand g_full = [](const Point& u) { return u[0] * u[0] + u[1]; };
        ProjectionConfig cfg{2, 5, 4, 77};
        const auto proj = project_integrand(g_full, cfg);
        CHECK(proj({0.3, 0.4}) == doctest::Approx(0.09 + 0.4).epsilon(1e-14));
    }
    SUBCASE("inner mean is unbiased across reseeds") {
        const Integrand g_full = [](const Point& u) { return u[0] * u[1]; };
        const std::size_t runs = 10'000;
        std::vector<double> vals(runs);
        for (std::size_t i = 0; i < runs; ++i) {
            ProjectionConfig cfg{1, 2, 4, i};
            vals[i] = project_integrand(g_full, cfg)({0.8});
        }
        const double se = std::sqrt(variance_of(vals) / static_cast<double>(runs));
        CHECK(std::abs(mean_of(vals) - 0.4) <= 3.0 * se);
    }
    SUBCASE("same seed replays the same values") {
        const Integrand g_full = [](const Point& u) {
            return std::sin(u[0] + 2.0 * u[1] + 3.0 * u[2]);
        };
        ProjectionConfig cfg{1, 3, 4, 5};
        const auto a = project_integrand(g_full, cfg);
        const auto b = project_integrand(g_full, cfg);
        for (double u : {0.0, 0.25, 0.5, 0.875}) CHECK(a({u}) == b({u}));
    }
    SUBCASE("CV rebuild with the same seed yields identical regions") {
        const Integrand g_full = [](const Point& u) {
            return std::exp(-4.0 * u[0]) * (1.0 + u[1] * u[2]);
        };
        ProjectionConfig cfg{1, 3, 4, 21};
        const auto proj = project_integrand(g_full, cfg);
        auto cv_a = PiecewiseCV::build(proj, 1, {3 + 10 * 2});
        auto cv_b = PiecewiseCV::build(proj, 1, {3 + 10 * 2});
        REQUIRE(cv_a.region_count() == cv_b.region_count());
        for (std::size_t r = 0; r < cv_a.region_count(); ++r) {
            CHECK(cv_a.region(r).box.lo == cv_b.region(r).box.lo);
            CHECK(cv_a.region(r).coeffs.c == cv_b.region(r).coeffs.c);
        }
    }
    SUBCASE("bad configs throw") {
        CHECK_THROWS(project_integrand([](const Point&) { return 0.0; }, {3, 2, 4, 0}));
        CHECK_THROWS(project_integrand([](const Point&) { return 0.0; }, {1, 2, 0, 0}));
    }
}

TEST_CASE("estimate_highdim") {
    SUBCASE("suffix-independent quadratic prefix: exact with zero variance") {
        const Integrand g_full = [](const Point& u) { return 1.0 + u[0] - u[1] * u[1]; };
        ProjectionConfig cfg{2, 6, 4, 3};
        auto cv = PiecewiseCV::build(project_integrand(g_full, cfg), 2, {9});
        Rng rng(1);
        const auto est = estimate_highdim(cv, g_full, cfg, 64, rng, AlphaMode::fixed(1.0));
        const double analytic = 1.0 + 0.5 - 1.0 / 3.0;
        CHECK(est.value == doctest::Approx(analytic).epsilon(1e-12));
        CHECK(est.empirical_variance <= 1e-20);
    }
    SUBCASE("separable integrand is unbiased") {
        // q(u0,u1) * k(u2,u3): integral = (int q)(int k).
        const Integrand g_full = [](const Point& u) {
            return (u[0] * u[0] + u[1]) * std::exp(u[2]) * (1.0 + u[3]);
        };
        const double ref = (1.0 / 3.0 + 0.5) * (std::exp(1.0) - 1.0) * 1.5;
        ProjectionConfig cfg{2, 4, 4, 9};
        auto cv = PiecewiseCV::build(project_integrand(g_full, cfg), 2, {9 + 4 * 6});
        const std::size_t runs = 10'000;
        std::vector<double> vals(runs);
        Rng rng(2);
        for (std::size_t i = 0; i < runs; ++i)
            vals[i] = estimate_highdim(cv, g_full, cfg, 32, rng, AlphaMode::fixed(1.0)).value;
        const double se = std::sqrt(variance_of(vals) / static_cast<double>(runs));
        CHECK(std::abs(mean_of(vals) - ref) <= 3.0 * se);
    }
    SUBCASE("L = D degenerates to estimate_full bit-for-bit") {
        const Integrand g = [](const Point& u) { return std::cos(3.0 * u[0]) + u[1]; };
        ProjectionConfig cfg{2, 2, 4, 0};
        auto cv = PiecewiseCV::build(g, 2, {9 + 3 * 6});
        Rng rng_a(7), rng_b(7);
        const auto a = estimate_highdim(cv, g, cfg, 128, rng_a, AlphaMode::per_run());
        const auto b = estimate_full(cv, g, 128, rng_b, AlphaMode::per_run());
        CHECK(a.value == b.value);
        CHECK(a.alpha == b.alpha);
    }
    SUBCASE("unbiased regardless of CV quality and n_star") {
        const Integrand g_full = [](const Point& u) {
            return (u[0] > 0.3 ? 1.0 : 0.2) * (0.5 + u[1] * u[2]);
        };
        const double ref = (0.3 * 0.2 + 0.7) * (0.5 + 0.25);
        for (std::size_t n_star : {1u, 4u}) {
            ProjectionConfig cfg{1, 3, n_star, 13};
            auto cv = PiecewiseCV::build(project_integrand(g_full, cfg), 1, {3 + 5 * 2});
            const std::size_t runs = 4000;
            std::vector<double> vals(runs);
            Rng rng(31);
            for (std::size_t i = 0; i < runs; ++i)
                vals[i] =
                    estimate_highdim(cv, g_full, cfg, 32, rng, AlphaMode::fixed(0.5)).value;
            const double se = std::sqrt(variance_of(vals) / static_cast<double>(runs));
            CHECK(std::abs(mean_of(vals) - ref) <= 3.0 * se);
        }
    }
}
