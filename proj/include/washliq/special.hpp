#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace washliq::special {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges fast for x < (a+1)/(a+b+2).
inline double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 100000;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

// Stirling remainder lgamma(z) - [(z - 1/2) log z - z + log(2 pi) / 2], for z >= 20.
inline double stirling_corr(double z) {
    const double r = 1.0 / (z * z);
    return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r / 1188.0)))) / z;
}

// log B(a, b). The lgamma difference cancels badly once one argument is large, so that
// difference is expanded analytically instead.
inline double log_beta(double a, double b) {
    const double big = std::max(a, b), small = std::min(a, b);
    if (big < 20.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double s = big + small;
    return std::lgamma(small) - (big - 0.5) * std::log1p(small / big) - small * std::log(s) + small +
           stirling_corr(big) - stirling_corr(s);
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b). y must equal 1 - x; passing it separately keeps
// precision when x is within rounding of 1.
inline double incomplete_beta(double a, double b, double x, double y) {
    if (!(a > 0.0) || !(b > 0.0) || std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_x = y < 0.5 ? std::log1p(-y) : std::log(x);
    const double log_y = x < 0.5 ? std::log1p(-x) : std::log(y);
    const double log_front = a * log_x + b * log_y - detail::log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * detail::beta_cf(a, b, x) / a;
    return 1.0 - std::exp(log_front) * detail::beta_cf(b, a, y) / b;
}

inline double incomplete_beta(double a, double b, double x) { return incomplete_beta(a, b, x, 1.0 - x); }

// P(T > t) for Student's t with dof degrees of freedom (dof may be fractional).
inline double student_t_sf(double t, double dof) {
    if (std::isnan(t) || !(dof > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    if (t == 0.0) return 0.5;
    const double t2 = t * t;
    const double x = dof / (dof + t2);
    const double y = t2 / (dof + t2);
    const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x, y);
    return t > 0.0 ? tail : 1.0 - tail;
}

inline double student_t_cdf(double t, double dof) { return student_t_sf(-t, dof); }

// P(F > f) for the F distribution with (d1, d2) degrees of freedom.
inline double f_sf(double f, double d1, double d2) {
    if (std::isnan(f) || !(d1 > 0.0) || !(d2 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double denom = d2 + d1 * f;
    return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / denom, d1 * f / denom);
}

}  // namespace washliq::special
