#pragma once

// Reference computations kept independent of the library's own numerics.

#include <cmath>
#include <cstddef>
#include <functional>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return s * h / 3.0;
}

/// Digamma by recurrence to x >= 6 and the asymptotic series.
inline double digamma(double x) {
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    return acc + std::log(x) - 0.5 / x -
           r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132)))));
}

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// sum_i 1 / lambda_i for the Jacobi spectrum with c = 2 b / sigma2 - 1:
/// (2 / sigma2) sum 1 / (i (i + c)) = (2 / sigma2) (psi(1 + c) + gamma_E) / c.
inline double jacobi_eigentime(double b, double sigma2) {
    const double c = 2.0 * b / sigma2 - 1.0;
    if (std::fabs(c) < 1e-12) return (2.0 / sigma2) * M_PI * M_PI / 6.0;
    return (2.0 / sigma2) * (digamma(1.0 + c) + kEulerGamma) / c;
}

} // namespace oracle
