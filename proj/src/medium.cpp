#include "pwcv/medium.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pwcv {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

void Medium::validate(std::size_t probes) const {
    for (std::size_t i = 0; i <= probes; ++i) {
        const double s = length * static_cast<double>(i) / static_cast<double>(probes);
        const double v = mu(s);
        if (!(v >= 0.0) || v > majorant * (1.0 + 1e-9))
            throw std::runtime_error("medium '" + name + "': mu out of [0, majorant] at s=" +
                                     std::to_string(s));
    }
}

std::vector<Medium> medium_suite() {
    std::vector<Medium> out;

    out.push_back({"homogeneous", [](double) { return 0.8; }, 0.8, 2.0});

    out.push_back({"linear", [](double s) { return 0.1 + 0.45 * s; }, 0.1 + 0.45 * 2.0, 2.0});

    out.push_back({"bump",
                   [](double s) {
                       const double t = (s - 1.2) / 0.15;
                       return 0.05 + 1.8 * std::exp(-0.5 * t * t);
                   },
                   0.05 + 1.8, 2.0});

    out.push_back({"bumps",
                   [](double s) {
                       const double t0 = (s - 0.5) / 0.2;
                       const double t1 = (s - 1.5) / 0.1;
                       return 0.1 + 1.2 * std::exp(-0.5 * t0 * t0) +
                              0.9 * std::exp(-0.5 * t1 * t1);
                   },
                   0.1 + 1.2 + 0.9, 2.0});

    // Smooth band-limited noise with fixed phases; the majorant is the exact
    // amplitude bound of the sine sum.
    out.push_back({"noise",
                   [](double s) {
                       using std::numbers::pi;
                       return 1.0 + 0.45 * std::sin(2.0 * pi * 1.3 * s + 0.7) +
                              0.3 * std::sin(2.0 * pi * 3.1 * s + 2.9) +
                              0.2 * std::sin(2.0 * pi * 6.7 * s + 5.1);
                   },
                   1.0 + 0.45 + 0.3 + 0.2, 2.0});

    for (const Medium& m : out) m.validate();
    return out;
}

Medium medium_by_name(const std::string& name) {
    for (Medium& m : medium_suite())
        if (m.name == name) return std::move(m);
    throw std::invalid_argument("unknown medium: " + name);
}

std::vector<std::string> medium_names() {
    std::vector<std::string> out;
    for (const Medium& m : medium_suite()) out.push_back(m.name);
    return out;
}

double tau_oracle(const Medium& medium) {
    const double a = 0.0;
    const double b = medium.length;
    const double fa = medium.mu(a);
    const double fb = medium.mu(b);
    const double fm = medium.mu(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(medium.mu, a, b, fa, fm, fb, whole, 1e-10, 48);
}

}  // namespace pwcv
