#pragma once

#include <array>
#include <atomic>
#include <functional>
#include <memory>
#include <span>

#include "pwcv/box.hpp"

namespace pwcv {

using Vec3 = std::array<double, 3>;

// A warp from the unit cube into problem space together with its pdf.  The pdf
// must be evaluable over the whole support so MIS weights can combine
// techniques at each other's mapped points.
struct Mapping {
    std::size_t dim = 0;
    std::function<Point(const Point&)> warp;
    std::function<double(const Point&)> pdf_at;
};

struct MappingSet {
    std::vector<Mapping> mappings;
    double beta = 2.0;  // power-heuristic exponent; 1 gives the balance heuristic
};

// Power-heuristic weight of technique t.  Zero pdf gets zero weight; all-zero
// pdfs yield 0 (zero-contribution sample).
double mis_weight(std::span<const double> pdfs, std::size_t t, double beta);

// Primary-space integrand with a shared evaluation counter; copies observe the
// same counter so budget accounting survives by-value capture.
class PrimaryIntegrand {
public:
    explicit PrimaryIntegrand(std::function<double(const Point&)> fn)
        : fn_(std::move(fn)), evals_(std::make_shared<std::atomic<std::size_t>>(0)) {}

    double operator()(const Point& u) const {
        evals_->fetch_add(1, std::memory_order_relaxed);
        return fn_(u);
    }

    std::size_t eval_count() const { return evals_->load(std::memory_order_relaxed); }
    void reset_count() { evals_->store(0, std::memory_order_relaxed); }

private:
    std::function<double(const Point&)> fn_;
    std::shared_ptr<std::atomic<std::size_t>> evals_;
};

// g(u) = sum_t W_t(x_t) f(x_t) / p_t(x_t); with a single mapping this is the
// plain f/p pullback with no weight computation.
PrimaryIntegrand make_primary_integrand(std::function<double(const Point&)> f,
                                        MappingSet set);

// 1D equiangular warp along a ray segment [0, t_max]: pdf proportional to the
// inverse squared distance to the light, normalized over the segment.
Mapping equiangular_mapping(const Vec3& light, const Vec3& ray_origin, const Vec3& ray_dir,
                            double t_max);

}  // namespace pwcv
