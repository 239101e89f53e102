#include "fkpp/special_functions.hpp"

#include <cmath>
#include <numbers>

namespace fkpp {

double erfcx(double x) {
    if (x < 4.0) return std::exp(x * x) * std::erfc(x);
    // Laplace continued fraction, evaluated bottom-up
    double f = x;
    for (int k = 60; k >= 1; --k) f = x + (0.5 * k) / f;
    return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

double log_erfc(double x) {
    if (x < 4.0) return std::log(std::erfc(x));
    return -x * x + std::log(erfcx(x));
}

}  // namespace fkpp
