#include "pwcv/primary.hpp"

#include <cmath>
#include <stdexcept>

namespace pwcv {

double mis_weight(std::span<const double> pdfs, std::size_t t, double beta) {
    if (t >= pdfs.size()) throw std::invalid_argument("mis_weight: technique index out of range");
    if (pdfs[t] <= 0.0) return 0.0;
    double num = std::pow(pdfs[t], beta);
    double den = 0.0;
    for (double p : pdfs) den += p > 0.0 ? std::pow(p, beta) : 0.0;
    return num / den;
}

PrimaryIntegrand make_primary_integrand(std::function<double(const Point&)> f,
                                        MappingSet set) {
    if (set.mappings.empty())
        throw std::invalid_argument("make_primary_integrand: empty mapping set");

    if (set.mappings.size() == 1) {
        Mapping m = std::move(set.mappings.front());
        return PrimaryIntegrand([f = std::move(f), m = std::move(m)](const Point& u) {
            const Point x = m.warp(u);
            const double fx = f(x);
            if (!std::isfinite(fx)) throw std::runtime_error("non-finite problem-space integrand");
            return fx / m.pdf_at(x);
        });
    }

    return PrimaryIntegrand([f = std::move(f), set = std::move(set)](const Point& u) {
        const std::size_t T = set.mappings.size();
        double g = 0.0;
        std::vector<double> pdfs(T);
        for (std::size_t t = 0; t < T; ++t) {
            const Point x = set.mappings[t].warp(u);
            for (std::size_t s = 0; s < T; ++s) pdfs[s] = set.mappings[s].pdf_at(x);
            const double w = mis_weight(pdfs, t, set.beta);
            if (w == 0.0) continue;
            const double fx = f(x);
            if (!std::isfinite(fx)) throw std::runtime_error("non-finite problem-space integrand");
            g += w * fx / pdfs[t];
        }
        return g;
    });
}

Mapping equiangular_mapping(const Vec3& light, const Vec3& ray_origin, const Vec3& ray_dir,
                            double t_max) {
    Vec3 delta;
    for (int i = 0; i < 3; ++i) delta[i] = light[i] - ray_origin[i];
    double along = 0.0;  // parameter of the light's projection onto the ray
    for (int i = 0; i < 3; ++i) along += delta[i] * ray_dir[i];
    double perp2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double q = delta[i] - along * ray_dir[i];
        perp2 += q * q;
    }
    const double perp = std::sqrt(perp2);
    if (!(perp > 1e-12))
        throw std::invalid_argument("equiangular_mapping: light lies on the ray line");

    const double theta0 = std::atan2(0.0 - along, perp);
    const double theta1 = std::atan2(t_max - along, perp);
    const double span = theta1 - theta0;

    Mapping m;
    m.dim = 1;
    m.warp = [=](const Point& u) -> Point {
        const double s = along + perp * std::tan(theta0 + u[0] * span);
        return {std::clamp(s, 0.0, t_max)};
    };
    m.pdf_at = [=](const Point& x) -> double {
        const double s = x[0];
        if (s < 0.0 || s > t_max) return 0.0;
        const double d = s - along;
        return perp / (span * (perp2 + d * d));
    };
    return m;
}

}  // namespace pwcv
