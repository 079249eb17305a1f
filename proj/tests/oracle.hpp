#ifndef DUALVOL_TESTS_ORACLE_HPP
#define DUALVOL_TESTS_ORACLE_HPP

// Reference computations for the tests, deliberately independent of the
// library's own quadrature, LP and special-function code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

/// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// Adaptive Simpson over [a, b] split into equal panels (for kinked integrands).
/// tol is relative to a coarse first estimate of the integral.
inline double simpson_panels(const std::function<double(double)>& f, double a, double b, int panels, double tol = 1e-14) {
    double coarse = 0.0;
    for (int i = 0; i <= 16 * panels; ++i) coarse += std::abs(f(a + (b - a) * i / (16.0 * panels)));
    tol *= std::max(1.0, coarse * (b - a) / (16.0 * panels));
    double s = 0.0;
    for (int i = 0; i < panels; ++i)
        s += simpson(f, a + (b - a) * i / panels, a + (b - a) * (i + 1) / panels, tol / panels);
    return s;
}

/// int_0^inf r^{a-1} e^{-r^2/2} dr through r = e^y on a truncated line.
inline double gaussian_radial_integral(double a) {
    auto g = [a](double y) { return std::exp(a * y - 0.5 * std::exp(2.0 * y)); };
    const double lo = -40.0 / a - 5.0;
    return simpson_panels(g, lo, 4.0, 64, 1e-15);
}

/// n (2 pi)^{-n/2} int_0^inf r^{n-q-1} e^{-r^2/2} dr.
inline double c_constant(int n, double q) {
    return n * gaussian_radial_integral(n - q) / std::pow(2.0 * std::numbers::pi, 0.5 * n);
}

/// (1/2) int_0^{2 pi} rho(theta)^q dtheta for the unit square, rho = 1 / max(|cos|, |sin|).
inline double square_dual_volume(double q) {
    auto f = [q](double th) { return std::pow(1.0 / std::max(std::abs(std::cos(th)), std::abs(std::sin(th))), q); };
    return 0.5 * 8.0 * simpson_panels(f, 0.0, 0.25 * std::numbers::pi, 8, 1e-15);
}

} // namespace oracle

#endif
