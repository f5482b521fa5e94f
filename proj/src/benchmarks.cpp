#include "pwcv/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pwcv {

namespace {

// Integral of exp(-(x-m)^2 / (2 s^2)) over [0,1].
double gaussian_integral01(double m, double s) {
    const double k = s * std::sqrt(std::numbers::pi / 2.0);
    const double r = 1.0 / (s * std::numbers::sqrt2);
    return k * (std::erf((1.0 - m) * r) - std::erf((0.0 - m) * r));
}

constexpr double kGaussSigma = 0.15;
constexpr double kSpikeSigma = 0.005;
constexpr double kSpikeCenter = 1.0 / 3.0;
constexpr double kWideSigma = 0.25;

double spike1d(double x) {
    const double a = (x - 0.5) / kWideSigma;
    const double b = (x - kSpikeCenter) / kSpikeSigma;
    return std::exp(-0.5 * a * a) + 2.0 * std::exp(-0.5 * b * b);
}

Benchmark make_gaussian(std::size_t D) {
    Benchmark b;
    b.name = "gaussian-" + std::to_string(D) + "d";
    b.dim = D;
    b.f = [](const Point& x) {
        double v = 1.0;
        for (double c : x) {
            const double t = (c - 0.5) / kGaussSigma;
            v *= std::exp(-0.5 * t * t);
        }
        return v;
    };
    b.reference = std::pow(gaussian_integral01(0.5, kGaussSigma), static_cast<double>(D));
    return b;
}

Benchmark make_step(std::size_t D) {
    Benchmark b;
    b.name = "step-" + std::to_string(D) + "d";
    b.dim = D;
    b.f = [](const Point& x) { return x[0] > 0.5 ? 1.0 : 0.0; };
    b.reference = 0.5;
    b.smooth = false;
    return b;
}

Benchmark make_product_peak(std::size_t D) {
    Benchmark b;
    b.name = "product-peak-" + std::to_string(D) + "d";
    b.dim = D;
    b.f = [](const Point& x) {
        double v = 1.0;
        for (double c : x) v *= 1.0 / ((c - 0.3) * (c - 0.3) + 0.04);
        return v;
    };
    const double ref1 = (std::atan(0.7 / 0.2) - std::atan(-0.3 / 0.2)) / 0.2;
    b.reference = std::pow(ref1, static_cast<double>(D));
    return b;
}

Benchmark make_oscillatory(std::size_t D) {
    constexpr double c = 0.5;
    constexpr double a = 5.0;
    Benchmark b;
    b.name = "oscillatory-" + std::to_string(D) + "d";
    b.dim = D;
    b.f = [D](const Point& x) {
        double arg = c;
        for (double v : x) arg += a * v;
        return std::cos(arg);
    };
    // Separable closed form: cos(c + sum a/2) * prod sinc(a/2).
    b.reference = std::cos(c + static_cast<double>(D) * a / 2.0) *
                  std::pow(std::sin(a / 2.0) / (a / 2.0), static_cast<double>(D));
    return b;
}

Benchmark make_spike_mixture(std::size_t D) {
    Benchmark b;
    b.name = "spike-mixture-" + std::to_string(D) + "d";
    b.dim = D;
    b.f = [](const Point& x) {
        double v = spike1d(x[0]);
        for (std::size_t d = 1; d < x.size(); ++d) {
            const double t = (x[d] - 0.5) / kWideSigma;
            v *= std::exp(-0.5 * t * t);
        }
        return v;
    };
    const double spike_ref = gaussian_integral01(0.5, kWideSigma) +
                             2.0 * gaussian_integral01(kSpikeCenter, kSpikeSigma);
    b.reference = spike_ref * std::pow(gaussian_integral01(0.5, kWideSigma),
                                       static_cast<double>(D - 1));
    b.smooth = false;
    return b;
}

}  // namespace

std::vector<Benchmark> benchmark_suite() {
    std::vector<Benchmark> out;
    for (std::size_t d = 1; d <= 4; ++d) {
        out.push_back(make_gaussian(d));
        out.push_back(make_step(d));
        out.push_back(make_product_peak(d));
        out.push_back(make_oscillatory(d));
        out.push_back(make_spike_mixture(d));
    }
    return out;
}

Benchmark benchmark_by_name(const std::string& name) {
    for (Benchmark& b : benchmark_suite())
        if (b.name == name) return std::move(b);
    throw std::invalid_argument("unknown benchmark: " + name);
}

std::vector<std::string> benchmark_names() {
    std::vector<std::string> out;
    for (const Benchmark& b : benchmark_suite()) out.push_back(b.name);
    return out;
}

}  // namespace pwcv
