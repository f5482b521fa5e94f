#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "pwcv/box.hpp"
#include "pwcv/poly.hpp"

namespace pwcv {

using Integrand = std::function<double(const Point&)>;

// One leaf of the adaptive partition.
struct Region {
    Box box;
    TensorGrid grid;
    PolyCoeffs coeffs;
    std::vector<double> err_per_dim;  // |H_high - H_low_d| + extent_d * epsilon
    double err_max = 0.0;
    std::size_t split_dim = 0;  // argmax of err_per_dim, first index on ties
};

struct BuildBudget {
    std::size_t total_evals = 0;
};

// Piecewise polynomial control variate over [0,1]^D: disjoint regions, their
// analytic total integral, and a binary split tree for point lookup.
class PiecewiseCV {
public:
    PiecewiseCV() = default;  // empty; assign from build()/constant()/deserialize()

    // Adaptive construction: greedy max-error binary splitting until the next
    // split would exceed the evaluation budget.
    static PiecewiseCV build(const Integrand& g, std::size_t dim, BuildBudget budget,
                             double epsilon = 1e-5);

    // Single-region CV holding a constant value (h == value everywhere).
    static PiecewiseCV constant(std::size_t dim, double value);

    std::size_t dim() const { return dim_; }
    std::size_t region_count() const { return regions_.size(); }
    const Region& region(std::size_t r) const { return regions_[r]; }
    double total_integral() const { return total_integral_; }
    std::size_t eval_count() const { return eval_count_; }
    std::size_t leftover_evals() const { return leftover_evals_; }

    // Boxes that were split, in split order (diagnostics and replay tests).
    const std::vector<Box>& split_log() const { return split_log_; }

    // Containing region under the half-open ownership rule; O(tree depth).
    std::size_t lookup(const Point& u) const;

    // h(u) = polynomial value of the containing region.
    double value_at(const Point& u) const;

    // Integral of h over a bucket box.  The bucket may span only a prefix of
    // the dimensions; trailing dimensions are implicitly [0,1].
    double bucket_integral(const Box& bucket) const;

    // Binary cache format: magic, dim, region count, then per region the
    // bounds and 3^D coefficients as little-endian 64-bit floats.
    void serialize(std::ostream& os) const;
    static PiecewiseCV deserialize(std::istream& is);

private:
    struct KdNode {
        std::size_t split_dim = 0;
        double split_at = 0.0;
        int left = -1;   // KdNode index, or ~leaf when < 0
        int right = -1;  // encodes leaf region r as -(r + 1)
    };

    void rebuild_total();

    std::size_t dim_ = 0;
    std::vector<Region> regions_;
    std::vector<KdNode> nodes_;  // empty for a single-region CV
    double total_integral_ = 0.0;
    std::size_t eval_count_ = 0;
    std::size_t leftover_evals_ = 0;
    std::vector<Box> split_log_;
};

// Scores a region per the size-penalized nested-rule error.
void region_error(Region& region, double epsilon);

}  // namespace pwcv
