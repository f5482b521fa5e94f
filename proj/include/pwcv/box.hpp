#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pwcv {

using Point = std::vector<double>;

inline std::size_t pow3(std::size_t d) {
    std::size_t p = 1;
    while (d--) p *= 3;
    return p;
}

// Axis-aligned box with strictly positive extent along every dimension.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_)
        : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size() || lo.empty())
            throw std::invalid_argument("Box: mismatched or empty bounds");
        for (std::size_t d = 0; d < lo.size(); ++d)
            if (!(lo[d] < hi[d]))
                throw std::invalid_argument("Box: lo must be < hi in every dimension");
    }

    static Box unit(std::size_t dim) {
        return Box(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
    }

    std::size_t dim() const { return lo.size(); }
    double extent(std::size_t d) const { return hi[d] - lo[d]; }

    double volume() const {
        double v = 1.0;
        for (std::size_t d = 0; d < dim(); ++d) v *= extent(d);
        return v;
    }

    bool contains(const Point& x) const {
        if (x.size() != dim()) return false;
        for (std::size_t d = 0; d < dim(); ++d)
            if (x[d] < lo[d] || x[d] > hi[d]) return false;
        return true;
    }

    // Ownership test under the half-open convention [lo, hi), with the global
    // upper boundary closed.  `global_hi` marks which dimensions of this box
    // touch the enclosing domain's upper face.
    bool owns(const Point& x, const std::vector<bool>* global_hi = nullptr) const {
        for (std::size_t d = 0; d < dim(); ++d) {
            if (x[d] < lo[d]) return false;
            const bool closed_hi = global_hi && (*global_hi)[d];
            if (closed_hi ? x[d] > hi[d] : x[d] >= hi[d]) return false;
        }
        return true;
    }

    bool contained_in(const Box& outer) const {
        if (outer.dim() != dim()) return false;
        for (std::size_t d = 0; d < dim(); ++d)
            if (lo[d] < outer.lo[d] - 1e-12 || hi[d] > outer.hi[d] + 1e-12) return false;
        return true;
    }

    // Clipped intersection; returns false when the interiors do not overlap.
    bool intersect(const Box& other, Box& out) const {
        std::vector<double> l(dim()), h(dim());
        for (std::size_t d = 0; d < dim(); ++d) {
            l[d] = std::max(lo[d], other.lo[d]);
            h[d] = std::min(hi[d], other.hi[d]);
            if (!(l[d] < h[d])) return false;
        }
        out = Box(std::move(l), std::move(h));
        return true;
    }
};

// 3^D tensor grid over a box: per-dimension nodes {lo, mid, hi}, flattened
// lexicographically by multi-index (dimension 0 most significant).  The value
// array matches the point ordering.
struct TensorGrid {
    std::size_t dim = 0;
    std::vector<double> values;  // size 3^dim

    static std::size_t stride(std::size_t dim, std::size_t d) { return pow3(dim - 1 - d); }

    static std::size_t digit(std::size_t dim, std::size_t flat, std::size_t d) {
        return (flat / stride(dim, d)) % 3;
    }

    static Point node(const Box& box, std::size_t flat) {
        const std::size_t D = box.dim();
        Point p(D);
        for (std::size_t d = 0; d < D; ++d) {
            const std::size_t i = digit(D, flat, d);
            p[d] = box.lo[d] + 0.5 * static_cast<double>(i) * box.extent(d);
        }
        return p;
    }
};

// All 3^D node locations of a box, in flat-index order.
inline std::vector<Point> tensor_grid(const Box& box) {
    const std::size_t n = pow3(box.dim());
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(TensorGrid::node(box, i));
    return pts;
}

}  // namespace pwcv
