#pragma once

#include <span>
#include <utility>

namespace pwcv {

double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs);  // unbiased

// Least-squares slope and intercept of y against x.
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace pwcv
