#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pwcv/poly.hpp"

using namespace pwcv;

namespace {

TensorGrid sample_grid(const Box& box, const std::function<double(const Point&)>& f) {
    TensorGrid g;
    g.dim = box.dim();
    const std::size_t n = pow3(g.dim);
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.values[i] = f(TensorGrid::node(box, i));
    return g;
}

// Random per-dimension degree <= 2 polynomial in global coordinates, with its
// analytic integral over a box.
struct RandomQuadratic {
    std::size_t dim;
    std::vector<double> c;  // 3^dim coefficients over the global monomial basis

    double eval(const Point& x) const {
        double sum = 0.0;
        for (std::size_t flat = 0; flat < c.size(); ++flat) {
            double term = c[flat];
            for (std::size_t d = 0; d < dim; ++d) {
                const std::size_t i = TensorGrid::digit(dim, flat, d);
                for (std::size_t k = 0; k < i; ++k) term *= x[d];
            }
            sum += term;
        }
        return sum;
    }

    double integral(const Box& box) const {
        double sum = 0.0;
        for (std::size_t flat = 0; flat < c.size(); ++flat) {
            double term = c[flat];
            for (std::size_t d = 0; d < dim; ++d) {
                const std::size_t i = TensorGrid::digit(dim, flat, d);
                term *= (std::pow(box.hi[d], i + 1) - std::pow(box.lo[d], i + 1)) /
                        static_cast<double>(i + 1);
            }
            sum += term;
        }
        return sum;
    }
};

Box random_box(std::size_t dim, std::mt19937_64& eng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        double a = uni(eng), b = uni(eng);
        if (a > b) std::swap(a, b);
        lo[d] = a;
        hi[d] = b + 0.05;  // keep extents away from zero
    }
    return Box(std::move(lo), std::move(hi));
}

RandomQuadratic random_quadratic(std::size_t dim, std::mt19937_64& eng) {
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    RandomQuadratic q{dim, std::vector<double>(pow3(dim))};
    for (double& v : q.c) v = uni(eng);
    return q;
}

}  // namespace

TEST_CASE("tensor grid nodes") {
    SUBCASE("1d unit interval") {
        const auto pts = tensor_grid(Box::unit(1));
        REQUIRE(pts.size() == 3);
        CHECK(pts[0][0] == 0.0);
        CHECK(pts[1][0] == 0.5);
        CHECK(pts[2][0] == 1.0);
    }
    SUBCASE("2d ordering is lexicographic") {
        const auto pts = tensor_grid(Box::unit(2));
        REQUIRE(pts.size() == 9);
        CHECK(pts.front() == Point{0.0, 0.0});
        CHECK(pts.back() == Point{1.0, 1.0});
        CHECK(pts[1] == Point{0.0, 0.5});  // trailing dimension varies fastest
        CHECK(pts[3] == Point{0.5, 0.0});
    }
    SUBCASE("sub-box nodes") {
        const Box box({0.25, 0.0}, {0.5, 1.0});
        const auto pts = tensor_grid(box);
        CHECK(pts[0][0] == 0.25);
        CHECK(pts[4][0] == 0.375);
        CHECK(pts[8][0] == 0.5);
    }
}

TEST_CASE("fit_polynomial") {
    SUBCASE("constant") {
        const Box box({0.1, 0.2}, {0.6, 0.9});
        const auto grid = sample_grid(box, [](const Point&) { return 3.5; });
        const auto coeffs = fit_polynomial(grid);
        CHECK(coeffs.c[0] == doctest::Approx(3.5));
        for (std::size_t i = 1; i < coeffs.c.size(); ++i)
            CHECK(coeffs.c[i] == doctest::Approx(0.0));
    }
    SUBCASE("x^2 on the unit interval") {
        const Box box = Box::unit(1);
        const auto grid = sample_grid(box, [](const Point& x) { return x[0] * x[0]; });
        const auto coeffs = fit_polynomial(grid);
        CHECK(coeffs.c[0] == doctest::Approx(0.0));
        CHECK(coeffs.c[1] == doctest::Approx(0.0));
        CHECK(coeffs.c[2] == doctest::Approx(1.0));
    }
    SUBCASE("exp interpolates the midpoint exactly") {
        // Hand solve of the 3x3 system for f = exp on {0, 1/2, 1}: the fitted
        // quadratic must reproduce the node values.
        const Box box = Box::unit(1);
        const auto grid = sample_grid(box, [](const Point& x) { return std::exp(x[0]); });
        const auto coeffs = fit_polynomial(grid);
        const double f0 = 1.0, f1 = std::exp(0.5), f2 = std::exp(1.0);
        const double c0 = f0;
        const double c1 = -3.0 * f0 + 4.0 * f1 - f2;
        const double c2 = 2.0 * f0 - 4.0 * f1 + 2.0 * f2;
        CHECK(coeffs.c[0] == doctest::Approx(c0).epsilon(1e-12));
        CHECK(coeffs.c[1] == doctest::Approx(c1).epsilon(1e-12));
        CHECK(coeffs.c[2] == doctest::Approx(c2).epsilon(1e-12));
        CHECK(eval_poly(coeffs, box, {0.5}) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    }
}

TEST_CASE("eval_poly") {
    SUBCASE("fitted x^2 at 0.7") {
        const Box box = Box::unit(1);
        const auto grid = sample_grid(box, [](const Point& x) { return x[0] * x[0]; });
        const auto coeffs = fit_polynomial(grid);
        CHECK(eval_poly(coeffs, box, {0.7}) == doctest::Approx(0.49).epsilon(1e-12));
    }
    SUBCASE("fitted exp vs the direct quadratic through the nodes") {
        const Box box = Box::unit(1);
        const auto grid = sample_grid(box, [](const Point& x) { return std::exp(x[0]); });
        const auto coeffs = fit_polynomial(grid);
        // Direct Lagrange quadratic through (0, 1/2, 1).
        auto lagrange = [&](double x) {
            const double f0 = std::exp(0.0), f1 = std::exp(0.5), f2 = std::exp(1.0);
            return f0 * (x - 0.5) * (x - 1.0) / ((0.0 - 0.5) * (0.0 - 1.0)) +
                   f1 * (x - 0.0) * (x - 1.0) / ((0.5 - 0.0) * (0.5 - 1.0)) +
                   f2 * (x - 0.0) * (x - 0.5) / ((1.0 - 0.0) * (1.0 - 0.5));
        };
        CHECK(eval_poly(coeffs, box, {0.25}) == doctest::Approx(lagrange(0.25)).epsilon(1e-12));
        for (double node : {0.0, 0.5, 1.0})
            CHECK(eval_poly(coeffs, box, {node}) ==
                  doctest::Approx(std::exp(node)).epsilon(1e-12));
    }
}

TEST_CASE("integrate_poly") {
    SUBCASE("unit constant over the unit square") {
        const Box box = Box::unit(2);
        const auto coeffs = fit_polynomial(sample_grid(box, [](const Point&) { return 1.0; }));
        CHECK(integrate_poly(coeffs, box, box) == doctest::Approx(1.0));
    }
    SUBCASE("x^2 over [0,2]") {
        const Box box({0.0}, {2.0});
        const auto coeffs =
            fit_polynomial(sample_grid(box, [](const Point& x) { return x[0] * x[0]; }));
        CHECK(integrate_poly(coeffs, box, box) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("xy over a sub-box") {
        const Box box({0.0, 0.0}, {1.0, 2.0});
        const auto coeffs =
            fit_polynomial(sample_grid(box, [](const Point& x) { return x[0] * x[1]; }));
        const Box sub({0.0, 0.0}, {1.0, 1.0});
        CHECK(integrate_poly(coeffs, box, sub) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("sub-box outside the region throws") {
        const Box box = Box::unit(1);
        const auto coeffs = fit_polynomial(sample_grid(box, [](const Point&) { return 1.0; }));
        CHECK_THROWS(integrate_poly(coeffs, box, Box({0.5}, {1.5})));
    }
}

TEST_CASE("nested_integrals") {
    SUBCASE("x^2: textbook Simpson vs Trapezoid") {
        const Box box = Box::unit(1);
        const auto grid = sample_grid(box, [](const Point& x) { return x[0] * x[0]; });
        const auto n = nested_integrals(grid, box);
        CHECK(n.high == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(n.low_per_dim[0] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("x^3: Simpson exact for cubics in 1d") {
        const Box box = Box::unit(1);
        const auto grid = sample_grid(box, [](const Point& x) { return std::pow(x[0], 3); });
        CHECK(nested_integrals(grid, box).high == doctest::Approx(0.25).epsilon(1e-14));
    }
    SUBCASE("x^2 y^2: hand-evaluated 9-point sums") {
        const Box box = Box::unit(2);
        const auto grid =
            sample_grid(box, [](const Point& x) { return x[0] * x[0] * x[1] * x[1]; });
        const auto n = nested_integrals(grid, box);
        CHECK(n.high == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
        CHECK(n.low_per_dim[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
        CHECK(n.low_per_dim[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    }
}

TEST_CASE("property: quadratic exactness and interpolation over random boxes") {
    std::mt19937_64 eng(17);
    for (std::size_t dim = 1; dim <= 4; ++dim) {
        for (int rep = 0; rep < 25; ++rep) {
            const Box box = random_box(dim, eng);
            const auto q = random_quadratic(dim, eng);
            const auto grid = sample_grid(box, [&](const Point& x) { return q.eval(x); });
            const auto coeffs = fit_polynomial(grid);

            const double got = integrate_poly(coeffs, box, box);
            const double want = q.integral(box);
            CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));

            for (std::size_t i = 0; i < grid.values.size(); ++i) {
                const double at_node = eval_poly(coeffs, box, TensorGrid::node(box, i));
                CHECK(std::abs(at_node - grid.values[i]) <=
                      1e-10 * std::max(1.0, std::abs(grid.values[i])));
            }
        }
    }
}

TEST_CASE("property: sub-box additivity") {
    std::mt19937_64 eng(5);
    for (std::size_t dim : {1u, 2u, 3u}) {
        const Box box = random_box(dim, eng);
        const auto q = random_quadratic(dim, eng);
        const auto coeffs =
            fit_polynomial(sample_grid(box, [&](const Point& x) { return q.eval(x); }));

        // Split along dimension 0 into three parts.
        std::uniform_real_distribution<double> uni(0.2, 0.8);
        double c1 = box.lo[0] + uni(eng) * 0.5 * box.extent(0);
        double c2 = c1 + 0.25 * box.extent(0);
        double total = 0.0;
        double prev = box.lo[0];
        for (double cut : {c1, c2, box.hi[0]}) {
            Box part = box;
            part.lo[0] = prev;
            part.hi[0] = cut;
            total += integrate_poly(coeffs, box, part);
            prev = cut;
        }
        const double whole = integrate_poly(coeffs, box, box);
        CHECK(std::abs(total - whole) <= 1e-10 * std::max(1.0, std::abs(whole)));
    }
}

TEST_CASE("property: translation/scale covariance") {
    std::mt19937_64 eng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t dim = 2;
        const Box box = random_box(dim, eng);
        const auto q = random_quadratic(dim, eng);

        // Fit f over box, and fit the pulled-back f over the unit cube.
        const auto direct =
            fit_polynomial(sample_grid(box, [&](const Point& x) { return q.eval(x); }));
        const Box unit = Box::unit(dim);
        const auto pulled = fit_polynomial(sample_grid(unit, [&](const Point& u) {
            Point x(dim);
            for (std::size_t d = 0; d < dim; ++d) x[d] = box.lo[d] + u[d] * box.extent(d);
            return q.eval(x);
        }));
        const double i_direct = integrate_poly(direct, box, box);
        const double i_pulled = integrate_poly(pulled, unit, unit) * box.volume();
        CHECK(std::abs(i_direct - i_pulled) <= 1e-10 * std::max(1.0, std::abs(i_direct)));
    }
}
