#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace gelulab {

namespace detail {

// Reciprocals of the odd denominators 3, 5, 7, ... so the series loop
// multiplies instead of divides.
inline constexpr auto kInvOdd = [] {
    std::array<double, 200> table{};
    for (int k = 0; k < 200; ++k) table[k] = 1.0 / static_cast<double>(2 * k + 3);
    return table;
}();

// erf(x) = 2/sqrt(pi) * x * exp(-x^2) * sum_k (2x^2)^k / (1*3*...*(2k+1))
//
// Rearranged Maclaurin series with strictly positive terms, so there is no
// cancellation anywhere in the sum. Kahan compensation keeps the rounding
// of the summation itself at a couple of ulp. Used for |x| <= 2.5, where
// the series needs at most ~60 terms.
inline double erf_series(double x) {
    const double z = 2.0 * x * x;
    double term = 1.0;
    double sum = 1.0;
    double comp = 0.0;
    for (int k = 0; k < 200; ++k) {
        term *= z * kInvOdd[static_cast<std::size_t>(k)];
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term < sum * 0x1.0p-55) {
            break;
        }
    }
    return 2.0 * std::numbers::inv_sqrtpi * x * std::exp(-x * x) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) * K(x)   for x > 0, where
//
//   K(x) = 1/(x+ (1/2)/(x+ (2/2)/(x+ (3/2)/(x+ ...))))
//
// is the Legendre continued fraction, evaluated with the modified Lentz
// algorithm. Converges fast for x >= 2.5 (roughly 30 iterations).
inline double erfc_fraction(double x) {
    constexpr double tiny = 1e-300;
    double c = tiny;  // modified-Lentz start: f0 = C0 = tiny since b0 = 0
    double d = 0.0;
    double f = tiny;
    for (int n = 1; n < 300; ++n) {
        const double a = (n == 1) ? 1.0 : 0.5 * static_cast<double>(n - 1);
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 0x1.0p-55) {
            break;
        }
    }
    return std::exp(-x * x) * std::numbers::inv_sqrtpi * f;
}

}  // namespace detail

// Error function, |absolute error| <= ~3e-15 over the real line.
// Total on finite inputs; +/-inf map to +/-1, NaN propagates.
inline double erf(double x) {
    if (std::isnan(x)) return x;
    if (std::isinf(x)) return x > 0.0 ? 1.0 : -1.0;
    const double ax = std::fabs(x);
    double r;
    if (ax <= 2.5) {
        r = detail::erf_series(ax);
    } else {
        r = 1.0 - detail::erfc_fraction(ax);
    }
    return x < 0.0 ? -r : r;
}

// Complementary error function. Full relative accuracy in the right tail
// (continued fraction), absolute accuracy elsewhere.
inline double erfc(double x) {
    if (std::isnan(x)) return x;
    if (std::isinf(x)) return x > 0.0 ? 0.0 : 2.0;
    if (x > 2.5) return detail::erfc_fraction(x);
    if (x < -2.5) return 2.0 - detail::erfc_fraction(-x);
    return 1.0 - (x < 0.0 ? -detail::erf_series(-x) : detail::erf_series(x));
}

// Standard normal CDF, Phi(x) = 0.5 * (1 + erf(x / sqrt(2))).
// Evaluated as 0.5 * erfc(-x / sqrt(2)) so the left tail keeps relative
// accuracy instead of cancelling against 1.
inline double std_normal_cdf(double x) {
    return 0.5 * erfc(-x / std::numbers::sqrt2);
}

// Standard normal density, exp(-x^2/2) / sqrt(2 pi).
inline double std_normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// CDF of the standard Laplace distribution (location 0, scale 1).
inline double laplace_cdf(double x) {
    if (x < 0.0) return 0.5 * std::exp(x);
    return 1.0 - 0.5 * std::exp(-x);
}

// Density of the standard Laplace distribution.
inline double laplace_pdf(double x) {
    return 0.5 * std::exp(-std::fabs(x));
}

// CDF of the standard Cauchy distribution.
inline double cauchy_cdf(double x) {
    return std::atan(x) / std::numbers::pi + 0.5;
}

// Density of the standard Cauchy distribution.
inline double cauchy_pdf(double x) {
    return 1.0 / (std::numbers::pi * (1.0 + x * x));
}

}  // namespace gelulab
