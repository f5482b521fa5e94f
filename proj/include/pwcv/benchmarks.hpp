#pragma once

#include <string>

#include "pwcv/builder.hpp"

namespace pwcv {

struct Benchmark {
    std::string name;
    std::size_t dim = 1;
    Integrand f;
    double reference = 0.0;  // closed form where available, dense quadrature otherwise
    bool smooth = true;
};

// Registry of analytic test integrands over [0,1]^D, D in {1,2,3,4}:
// gaussian, step, product-peak, oscillatory, spike-mixture.
std::vector<Benchmark> benchmark_suite();

// Lookup by name, e.g. "gaussian-2d"; throws for unknown names.
Benchmark benchmark_by_name(const std::string& name);

std::vector<std::string> benchmark_names();

}  // namespace pwcv
