#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pwcv {

// 1D-queryable extinction field along a ray of length `length`, with a
// majorant bounding mu everywhere on [0, length].
struct Medium {
    std::string name;
    std::function<double(double)> mu;
    double majorant = 0.0;
    double length = 1.0;

    // Verifies 0 <= mu <= majorant on a dense probe grid.
    void validate(std::size_t probes = 4096) const;
};

// Procedural media with oracle-checkable optical depth: homogeneous, linear,
// gaussian bump, sum of bumps, seeded smooth noise.
std::vector<Medium> medium_suite();
Medium medium_by_name(const std::string& name);
std::vector<std::string> medium_names();

// Optical depth integral of mu over [0, length], adaptive Simpson with
// absolute tolerance 1e-10.
double tau_oracle(const Medium& medium);

}  // namespace pwcv
