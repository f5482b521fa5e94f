#include "pwcv/poly.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace pwcv {

namespace {

// Inverse Vandermonde for the monomial basis at nodes {0, 1/2, 1}; entries are
// exact in binary floating point.
constexpr double kInvVandermonde[3][3] = {
    {1.0, 0.0, 0.0},
    {-3.0, 4.0, -1.0},
    {2.0, -4.0, 2.0},
};

// Newton-Cotes weights on a unit interval, stored as numerator/denominator.
constexpr double kSimpsonNum[3] = {1.0, 4.0, 1.0};
constexpr double kSimpsonDen = 6.0;
constexpr double kTrapezoidNum[3] = {1.0, 0.0, 1.0};
constexpr double kTrapezoidDen = 2.0;

// Applies a 3x3 matrix along dimension d of a 3^D tensor, in place.
void apply_along_dim(std::vector<double>& a, std::size_t dim, std::size_t d,
                     const double m[3][3]) {
    const std::size_t s = TensorGrid::stride(dim, d);
    const std::size_t n = a.size();
    for (std::size_t base = 0; base < n; ++base) {
        if (TensorGrid::digit(dim, base, d) != 0) continue;
        const double v0 = a[base];
        const double v1 = a[base + s];
        const double v2 = a[base + 2 * s];
        a[base] = m[0][0] * v0 + m[0][1] * v1 + m[0][2] * v2;
        a[base + s] = m[1][0] * v0 + m[1][1] * v1 + m[1][2] * v2;
        a[base + 2 * s] = m[2][0] * v0 + m[2][1] * v1 + m[2][2] * v2;
    }
}

// Contracts dimension d of a 3^(remaining dims) tensor with a 3-vector,
// producing a tensor of one fewer dimension.  Dimension 0 is contracted first,
// so d is always 0 for the leading remaining dimension.
std::vector<double> contract_leading(const std::vector<double>& a, const double w[3]) {
    const std::size_t block = a.size() / 3;
    std::vector<double> out(block);
    for (std::size_t j = 0; j < block; ++j)
        out[j] = w[0] * a[j] + w[1] * a[block + j] + w[2] * a[2 * block + j];
    return out;
}

}  // namespace

PolyCoeffs fit_polynomial(const TensorGrid& grid) {
    if (grid.values.size() != pow3(grid.dim))
        throw std::invalid_argument("fit_polynomial: value count does not match 3^D");
    PolyCoeffs out;
    out.dim = grid.dim;
    out.c = grid.values;
    for (std::size_t d = 0; d < grid.dim; ++d)
        apply_along_dim(out.c, grid.dim, d, kInvVandermonde);
    return out;
}

double eval_poly(const PolyCoeffs& coeffs, const Box& box, const Point& x) {
    const std::size_t D = coeffs.dim;
    assert(box.contains(x) && "eval_poly: point outside region");
    std::vector<double> work = coeffs.c;
    for (std::size_t d = 0; d < D; ++d) {
        const double t = (x[d] - box.lo[d]) / box.extent(d);
        const double basis[3] = {1.0, t, t * t};
        work = contract_leading(work, basis);
    }
    return work[0];
}

double integrate_poly(const PolyCoeffs& coeffs, const Box& box, const Box& sub) {
    const std::size_t D = coeffs.dim;
    if (!sub.contained_in(box))
        throw std::invalid_argument("integrate_poly: sub-box not contained in region box");
    std::vector<double> work = coeffs.c;
    double jacobian = 1.0;
    for (std::size_t d = 0; d < D; ++d) {
        const double a = (sub.lo[d] - box.lo[d]) / box.extent(d);
        const double b = (sub.hi[d] - box.lo[d]) / box.extent(d);
        // Moments of the monomial basis over [a, b] in local coordinates.
        const double m[3] = {b - a, (b * b - a * a) / 2.0,
                             (b * b * b - a * a * a) / 3.0};
        work = contract_leading(work, m);
        jacobian *= box.extent(d);
    }
    return work[0] * jacobian;
}

NestedIntegrals nested_integrals(const TensorGrid& grid, const Box& box) {
    const std::size_t D = grid.dim;
    if (grid.values.size() != pow3(D))
        throw std::invalid_argument("nested_integrals: value count does not match 3^D");

    NestedIntegrals out;
    out.low_per_dim.assign(D, 0.0);

    // One pass over the shared 3^D values accumulates Simpson everywhere plus
    // the D mixed Simpson/Trapezoidal sums.
    const std::size_t n = grid.values.size();
    std::vector<double> low(D, 0.0);
    double high = 0.0;
    for (std::size_t flat = 0; flat < n; ++flat) {
        const double v = grid.values[flat];
        double ws = 1.0;
        for (std::size_t d = 0; d < D; ++d)
            ws *= kSimpsonNum[TensorGrid::digit(D, flat, d)];
        high += ws * v;
        for (std::size_t d = 0; d < D; ++d) {
            const std::size_t id = TensorGrid::digit(D, flat, d);
            if (kTrapezoidNum[id] == 0.0) continue;
            double w = kTrapezoidNum[id];
            for (std::size_t e = 0; e < D; ++e)
                if (e != d) w *= kSimpsonNum[TensorGrid::digit(D, flat, e)];
            low[d] += w * v;
        }
    }

    const double vol = box.volume();
    double den = 1.0;
    for (std::size_t d = 0; d < D; ++d) den *= kSimpsonDen;
    out.high = high * vol / den;
    for (std::size_t d = 0; d < D; ++d)
        out.low_per_dim[d] = low[d] * vol / (den / kSimpsonDen * kTrapezoidDen);
    return out;
}

}  // namespace pwcv
