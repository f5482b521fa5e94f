#pragma once

#include "pwcv/primary.hpp"

namespace pwcv {

// Point light in a homogeneous medium, viewed along a single ray: the 1D
// single-scattering setup paired with equiangular sampling.
struct SingleScatteringScene {
    Vec3 light_pos{0.0, 1.0, 0.0};
    double light_power = 1.0;  // Phi_l
    double sigma_t = 0.5;
    double sigma_s = 0.4;
    Vec3 ray_origin{0.0, 0.0, 0.0};
    Vec3 ray_dir{1.0, 0.0, 0.0};  // unit
    double t_max = 2.0;
};

struct SingleScattering {
    std::function<double(double)> radiance_at;  // problem-space integrand over s
    Mapping mapping;                            // equiangular warp for this ray
};

SingleScattering single_scattering_integrand(const SingleScatteringScene& scene);

// Composite Simpson reference with ~1e7 evaluations.
double single_scattering_reference(const SingleScatteringScene& scene);

}  // namespace pwcv
