#include "pwcv/scattering.hpp"

#include <cmath>
#include <numbers>

namespace pwcv {

SingleScattering single_scattering_integrand(const SingleScatteringScene& scene) {
    SingleScattering out;
    out.mapping = equiangular_mapping(scene.light_pos, scene.ray_origin, scene.ray_dir,
                                      scene.t_max);
    out.radiance_at = [scene](double s) {
        Vec3 xs;
        for (int i = 0; i < 3; ++i) xs[i] = scene.ray_origin[i] + s * scene.ray_dir[i];
        double r2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double d = xs[i] - scene.light_pos[i];
            r2 += d * d;
        }
        const double r = std::sqrt(r2);
        const double phase = 1.0 / (4.0 * std::numbers::pi);  // isotropic
        return std::exp(-scene.sigma_t * s) * scene.sigma_s * phase *
               scene.light_power / r2 * std::exp(-scene.sigma_t * r);
    };
    return out;
}

double single_scattering_reference(const SingleScatteringScene& scene) {
    const SingleScattering ss = single_scattering_integrand(scene);
    const std::size_t n = 10'000'000;  // even panel count
    const double h = scene.t_max / static_cast<double>(n);
    double sum = ss.radiance_at(0.0) + ss.radiance_at(scene.t_max);
    for (std::size_t i = 1; i < n; ++i)
        sum += (i % 2 ? 4.0 : 2.0) * ss.radiance_at(static_cast<double>(i) * h);
    return sum * h / 3.0;
}

}  // namespace pwcv
