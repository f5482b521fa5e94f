#pragma once

#include "pwcv/box.hpp"

namespace pwcv {

// Coefficients of a per-dimension degree-2 polynomial over the monomial basis
// in region-local coordinates [0,1]^D, flattened in the same lexicographic
// multi-index order as TensorGrid.
struct PolyCoeffs {
    std::size_t dim = 0;
    std::vector<double> c;  // size 3^dim
};

// Interpolating coefficients through the 3^D grid values.  The solve is the
// tensor composition of the fixed 3x3 inverse Vandermonde for nodes {0, 1/2, 1}.
PolyCoeffs fit_polynomial(const TensorGrid& grid);

double eval_poly(const PolyCoeffs& coeffs, const Box& box, const Point& x);

// Exact analytic integral of the polynomial over `sub`, which must be
// contained in `box`.  Pass sub = box for the full-region integral.
double integrate_poly(const PolyCoeffs& coeffs, const Box& box, const Box& sub);

struct NestedIntegrals {
    double high = 0.0;                // tensor Simpson over all dimensions
    std::vector<double> low_per_dim;  // Trapezoidal along d, Simpson elsewhere
};

// Both rules reuse the same 3^D values (nested nodes).
NestedIntegrals nested_integrals(const TensorGrid& grid, const Box& box);

}  // namespace pwcv
