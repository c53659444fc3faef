#include "fracou/gamma.hpp"

#include <cmath>
#include <limits>

namespace fracou {

namespace {

// Lanczos coefficients, g = 9, n = 10 (Godfrey's set).
constexpr double kLanczos[11] = {
    1.000000000000000174663,
    5716.400188274341379136,
    -14815.30426768413909044,
    14291.49277657478554025,
    -6348.160217641458813289,
    1301.608286058321874105,
    -108.1767053514369634679,
    2.605696505611755827729,
    -0.7423452510201416151527e-2,
    0.5384136432509564062961e-7,
    -0.4023533141268236372067e-8,
};
constexpr double kLanczosG = 9.0;

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Lanczos series for shifted argument z >= 0.5.
double lanczos_sum(double z) {
    double x = kLanczos[0];
    for (int i = 1; i <= 10; ++i) x += kLanczos[i] / (z - 1.0 + i);
    return x;
}

}  // namespace

double log_gamma(double z) {
    // valid for z > 0 only (callers handle reflection)
    if (z < 0.5) {
        // log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        return std::log(kPi / std::sin(kPi * z)) - log_gamma(1.0 - z);
    }
    const double zz = z - 1.0;
    const double t = zz + kLanczosG + 0.5;
    return kLogSqrt2Pi + (zz + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double gamma_fn(double z) {
    if (z < 0.5) {
        const double s = std::sin(kPi * z);
        if (s == 0.0) return std::numeric_limits<double>::quiet_NaN();  // pole
        return kPi / (s * gamma_fn(1.0 - z));
    }
    if (z > 171.62) return std::numeric_limits<double>::infinity();
    const double zz = z - 1.0;
    const double t = zz + kLanczosG + 0.5;
    // split the power so intermediates stay in double range near the top
    const double half = std::pow(t, 0.5 * (zz + 0.5));
    return std::sqrt(2.0 * kPi) * (half * std::exp(-t)) * half * lanczos_sum(z);
}

double rgamma(double a) {
    if (a > 171.62) return 0.0;  // 1/Gamma underflows
    if (a > 0.0) {
        if (a <= 1e-290) return 0.0;  // Gamma(a) ~ 1/a overflows
        return std::exp(-log_gamma(a));
    }
    const double r = std::round(a);
    if (std::abs(a - r) < 1e-13 && r <= 0.0) return 0.0;  // pole: reciprocal is exactly 0
    // reflection: 1/Gamma(a) = Gamma(1-a) sin(pi a)/pi
    const double s = std::sin(kPi * a) / kPi;
    if (s == 0.0) return 0.0;
    const double v = log_gamma(1.0 - a) + std::log(std::abs(s));
    if (v > 700.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return s > 0.0 ? inf : -inf;
    }
    return (s > 0.0 ? 1.0 : -1.0) * std::exp(v);
}

}  // namespace fracou
