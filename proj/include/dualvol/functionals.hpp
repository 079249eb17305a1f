#ifndef DUALVOL_FUNCTIONALS_HPP
#define DUALVOL_FUNCTIONALS_HPP

// Dual quermassintegrals and dual entropies in three formulations:
//   sphere     V_q(K) = (1/n) int_{S^{n-1}} rho_K^q du
//   gaussian   int rho_K^q dgamma_n = c(n,q) V_q(K),            q < n
//   layercake  the gaussian moment written as int_0^inf gamma_n({rho_K^q >= t}) dt

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <json.hpp>

#include "dualvol/bodies.hpp"
#include "dualvol/errors.hpp"
#include "dualvol/parallel.hpp"
#include "dualvol/quad.hpp"

namespace dualvol {

enum class Formulation { Sphere, Gaussian, LayerCake };

inline const char* to_string(Formulation f) {
    switch (f) {
    case Formulation::Sphere: return "sphere";
    case Formulation::Gaussian: return "gaussian";
    case Formulation::LayerCake: return "layercake";
    }
    return "?";
}

inline Formulation parse_formulation(const std::string& s) {
    if (s == "sphere") return Formulation::Sphere;
    if (s == "gaussian") return Formulation::Gaussian;
    if (s == "layercake" || s == "layer-cake") return Formulation::LayerCake;
    fail(ErrorKind::ParseError, "unknown formulation '" + s + "'");
}

struct DualVolumeResult {
    double q = 0.0;
    Formulation formulation = Formulation::Sphere;
    double value = 0.0;      // native scale: V_q for sphere, the Gaussian moment otherwise
    double std_error = 0.0;  // statistical error of value; 0 for deterministic rules
    double discretization_error = 0.0; // deterministic rules: full vs half-rule difference
    double truncation_bound = 0.0;     // layer cake: analytic bound on the unsampled tail
    double dual_volume = 0.0;          // V_q(K) implied by this formulation
    double dual_volume_error = 0.0;    // combined uncertainty on dual_volume
};

struct EntropyResult {
    Formulation formulation = Formulation::Sphere;
    double value = 0.0;     // E(K) (sphere) or E_gamma(K) (gaussian)
    double std_error = 0.0;
    double discretization_error = 0.0;
};

// ---------------------------------------------------------------------------
// Constants

/// c(n,q) = n (2 pi)^{-n/2} int_0^inf r^{n-q-1} e^{-r^2/2} dr
///        = n 2^{(n-q)/2 - 1} Gamma((n-q)/2) / (2 pi)^{n/2},  q < n.
inline double c_constant(int n, double q) {
    if (!(q < n)) fail(ErrorKind::ExponentOutOfRange, "c(n,q) needs q < n");
    const double a = 0.5 * (n - q);
    return std::exp(std::log(static_cast<double>(n)) + (a - 1.0) * std::numbers::ln2 + std::lgamma(a) -
                    0.5 * n * std::log(2.0 * std::numbers::pi));
}

/// c(n,q) by numerical quadrature of its defining integral.
inline double c_constant_quadrature(int n, double q) {
    if (!(q < n)) fail(ErrorKind::ExponentOutOfRange, "c(n,q) needs q < n");
    const double a = n - q;
    // r = e^y turns the (possibly singular) integrand into a smooth one on R.
    auto f = [a](double y) { return std::exp(a * y - 0.5 * std::exp(2.0 * y)); };
    boost::math::quadrature::exp_sinh<double> es;
    const double integral = es.integrate(f, -std::numeric_limits<double>::infinity(), 0.0) +
                            es.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    return n * integral / std::pow(2.0 * std::numbers::pi, 0.5 * n);
}

/// Compares the closed form of c(n,q) against quadrature on a grid of
/// (n, q) and returns the largest relative discrepancy.
inline double c_constant_self_test() {
    double worst = 0.0;
    for (int n = 2; n <= 6; ++n) {
        for (double q : {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, n - 1.0, n - 0.5, n - 0.1}) {
            const double closed = c_constant(n, q);
            worst = std::max(worst, std::abs(closed - c_constant_quadrature(n, q)) / closed);
        }
    }
    return worst;
}

/// E_gamma(K) = c0 E(K) + c1. c0 = 1/(n omega_n) and c1 = -E_gamma[log|x|]
/// = -(digamma(n/2) + log 2)/2. The offset is a plain expectation: it carries
/// the n*omega_n factor that the sphere-normalized expression lacks.
struct EntropyConstants {
    double c0 = 0.0;
    double c1 = 0.0;
};

inline EntropyConstants gaussian_entropy_constants(int n) {
    return {1.0 / sphere_area(n), -0.5 * (boost::math::digamma(0.5 * n) + std::numbers::ln2)};
}

// ---------------------------------------------------------------------------
// Sphere formulation

/// rho_K at every node of the rule.
inline std::vector<double> radial_profile(const ConvexBody& K, const SphereRule& rule) {
    if (K.dim() != rule.dim) fail(ErrorKind::MalformedBody, "rule dimension does not match body");
    std::vector<double> rho = evaluate_nodes(rule, [&](const Direction& u) { return radial_unit(K, u); });
    for (int i = 0; i < rule.size(); ++i)
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
            fail(ErrorKind::NonFiniteIntegrand, "radial function is not positive and finite at node " +
                                                    std::to_string(i));
    return rho;
}

inline std::vector<double> powered(std::span<const double> rho, double q) {
    std::vector<double> out(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = std::pow(rho[i], q);
    return out;
}

inline std::vector<double> logged(std::span<const double> rho) {
    std::vector<double> out(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = std::log(rho[i]);
    return out;
}

inline void assign_uncertainty(const SphereRule& rule, double unc, double& std_error, double& disc) {
    if (rule.stochastic()) std_error = unc;
    else disc = unc;
}

/// V_q from a precomputed radial profile. q = 0 returns omega_n exactly.
inline DualVolumeResult dual_querm(std::span<const double> rho, double q, const SphereRule& rule) {
    DualVolumeResult r;
    r.q = q;
    r.formulation = Formulation::Sphere;
    const int n = rule.dim;
    if (q == 0.0) {
        r.value = omega(n);
    } else {
        const std::vector<double> g[1] = {powered(rho, q)};
        const Estimate e = rule_estimate(rule, g, [n](std::span<const double> I) { return I[0] / n; });
        r.value = e.value;
        assign_uncertainty(rule, e.uncertainty, r.std_error, r.discretization_error);
    }
    r.dual_volume = r.value;
    r.dual_volume_error = std::hypot(r.std_error, r.discretization_error);
    return r;
}

inline DualVolumeResult dual_querm(const ConvexBody& K, double q, const SphereRule& rule) {
    if (!std::isfinite(q)) fail(ErrorKind::ExponentOutOfRange, "q must be finite");
    const auto rho = radial_profile(K, rule);
    return dual_querm(rho, q, rule);
}

/// E(K) = int log rho_K du.
inline EntropyResult dual_entropy(std::span<const double> rho, const SphereRule& rule) {
    const std::vector<double> g[1] = {logged(rho)};
    const Estimate e = rule_estimate(rule, g, [](std::span<const double> I) { return I[0]; });
    EntropyResult r;
    r.value = e.value;
    assign_uncertainty(rule, e.uncertainty, r.std_error, r.discretization_error);
    return r;
}

inline EntropyResult dual_entropy(const ConvexBody& K, const SphereRule& rule) {
    const auto rho = radial_profile(K, rule);
    return dual_entropy(rho, rule);
}

/// Vbar_q = (V_q / omega_n)^{1/q}; Vbar_0 = exp(E(K) / (n omega_n)) on its own code path.
inline DualVolumeResult normalized_dual_querm(std::span<const double> rho, double q, const SphereRule& rule) {
    const int n = rule.dim;
    const double area = sphere_area(n);
    DualVolumeResult r;
    r.q = q;
    r.formulation = Formulation::Sphere;
    Estimate e;
    if (q == 0.0) {
        const std::vector<double> g[1] = {logged(rho)};
        e = rule_estimate(rule, g, [area](std::span<const double> I) { return std::exp(I[0] / area); });
    } else {
        const std::vector<double> g[1] = {powered(rho, q)};
        e = rule_estimate(rule, g, [area, q](std::span<const double> I) { return std::pow(I[0] / area, 1.0 / q); });
    }
    r.value = e.value;
    assign_uncertainty(rule, e.uncertainty, r.std_error, r.discretization_error);
    r.dual_volume = q == 0.0 ? omega(n) : omega(n) * std::pow(r.value, q);
    return r;
}

inline DualVolumeResult normalized_dual_querm(const ConvexBody& K, double q, const SphereRule& rule) {
    const auto rho = radial_profile(K, rule);
    return normalized_dual_querm(rho, q, rule);
}

// ---------------------------------------------------------------------------
// Gaussian formulations

/// rho_K(x) at each sample point (degree -1 homogeneous extension).
inline std::vector<double> sample_radials(const ConvexBody& K, const GaussianSample& sample) {
    std::vector<double> g = sample_gauges(K, sample);
    for (double& v : g) v = 1.0 / v;
    return g;
}

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
};

inline MeanStderr mean_and_stderr(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    const double N = static_cast<double>(xs.size());
    const double mean = s.value() / N;
    CompensatedSum ss;
    for (double x : xs) ss.add((x - mean) * (x - mean));
    return {mean, std::sqrt(ss.value() / (N - 1.0) / N)};
}

inline void check_gaussian_exponent(int n, double q) {
    if (!std::isfinite(q) || !(q < n))
        fail(ErrorKind::ExponentOutOfRange, "the Gaussian formulation needs q < n (got q = " + std::to_string(q) + ")");
}

/// Sample mean of rho_K(x)^q under gamma_n. dual_volume = value / c(n,q).
inline DualVolumeResult gaussian_dual_moment(std::span<const double> sample_rho, int n, double q) {
    check_gaussian_exponent(n, q);
    DualVolumeResult r;
    r.q = q;
    r.formulation = Formulation::Gaussian;
    if (q == 0.0) {
        r.value = 1.0;
    } else {
        const auto m = mean_and_stderr(powered(sample_rho, q));
        r.value = m.mean;
        r.std_error = m.std_error;
    }
    const double c = c_constant(n, q);
    r.dual_volume = r.value / c;
    r.dual_volume_error = r.std_error / c;
    return r;
}

inline DualVolumeResult gaussian_dual_moment(const ConvexBody& K, double q, const GaussianSample& sample) {
    check_gaussian_exponent(K.dim(), q);
    const auto rho = sample_radials(K, sample);
    return gaussian_dual_moment(rho, K.dim(), q);
}

/// E_gamma(K) = int log rho_K dgamma_n, as a sample mean.
inline EntropyResult gaussian_dual_entropy(std::span<const double> sample_rho) {
    const auto m = mean_and_stderr(logged(sample_rho));
    EntropyResult r;
    r.formulation = Formulation::Gaussian;
    r.value = m.mean;
    r.std_error = m.std_error;
    return r;
}

inline EntropyResult gaussian_dual_entropy(const ConvexBody& K, const GaussianSample& sample) {
    const auto rho = sample_radials(K, sample);
    return gaussian_dual_entropy(rho);
}

struct LayerCakeOptions {
    int grid_points = 2048;     // initial grid size; doubled while the error estimate is too large
    int max_grid_points = 1 << 20;
    double tolerance = 1e-4;    // relative discretization tolerance
};

namespace detail {

// Trapezoid over a geometric grid in the radial level s of
//   int F(s) |q| s^{q-1} ds,
// where F is the empirical survival (q > 0) or distribution (q < 0) function.
inline double layer_cake_trapezoid(std::span<const double> sorted, double q, double s_lo, double s_hi, int G) {
    const double N = static_cast<double>(sorted.size());
    const double ratio = std::log(s_hi / s_lo);
    auto level = [&](double s) {
        if (q > 0) {
            const auto it = std::lower_bound(sorted.begin(), sorted.end(), s);
            return static_cast<double>(sorted.end() - it) / N; // #{rho >= s}
        }
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), s);
        return static_cast<double>(it - sorted.begin()) / N; // #{rho <= s}
    };
    auto integrand = [&](double s) { return level(s) * std::abs(q) * std::pow(s, q - 1.0); };
    CompensatedSum acc;
    double prev_s = s_lo;
    double prev_f = integrand(s_lo);
    for (int k = 1; k <= G; ++k) {
        const double s = k == G ? s_hi : s_lo * std::exp(ratio * k / G);
        const double f = integrand(s);
        acc.add(0.5 * (s - prev_s) * (f + prev_f));
        prev_s = s;
        prev_f = f;
    }
    return acc.value();
}

} // namespace detail

/// Layer-cake evaluation of the Gaussian moment, on one shared sample for all
/// levels (so the level-set measures are monotone in the level). Levels are
/// parametrized by the radial value s = t^{1/q}; the part of the level axis
/// beyond the sampled range is closed analytically for the empirical measure,
/// and an analytic bound on what the sample cannot see is reported as
/// truncation_bound.
inline DualVolumeResult layer_cake_moment(std::span<const double> sample_rho,
                                          std::span<const double> sample_norms, int n, double q,
                                          const LayerCakeOptions& opt = {}) {
    check_gaussian_exponent(n, q);
    if (q == 0.0) fail(ErrorKind::ExponentOutOfRange, "layer cake needs q != 0 (use the entropy branch)");
    std::vector<double> sorted(sample_rho.begin(), sample_rho.end());
    std::sort(sorted.begin(), sorted.end());
    const double s_lo = sorted.front();
    const double s_hi = sorted.back();

    double inner = 0.0;
    if (s_hi > s_lo) {
        int G = opt.grid_points;
        double coarse = detail::layer_cake_trapezoid(sorted, q, s_lo, s_hi, G / 2);
        inner = detail::layer_cake_trapezoid(sorted, q, s_lo, s_hi, G);
        while (std::abs(inner - coarse) > 0.25 * opt.tolerance * std::abs(inner)) {
            if (2 * G > opt.max_grid_points)
                fail(ErrorKind::GridTooCoarse, "layer-cake grid did not reach the requested tolerance");
            G *= 2;
            coarse = inner;
            inner = detail::layer_cake_trapezoid(sorted, q, s_lo, s_hi, G);
        }
    }

    // Extreme levels: the empirical measure is constant there.
    const double closed = q > 0 ? std::pow(s_lo, q) : std::pow(s_hi, q);

    // Bounds on what lies beyond the sampled radial range, using
    // rho(x) = rho(u)/|x| with rho(u) within the observed [r_in, r_out].
    double r_in = std::numeric_limits<double>::infinity();
    double r_out = 0.0;
    for (std::size_t i = 0; i < sample_rho.size(); ++i) {
        const double ru = sample_rho[i] * sample_norms[i];
        r_in = std::min(r_in, ru);
        r_out = std::max(r_out, ru);
    }
    double tail = 0.0;
    if (q > 0) {
        // gamma_n(|x| <= r) <= r^n / (2^{n/2} Gamma(n/2 + 1)).
        const double cn = std::exp(-0.5 * n * std::numbers::ln2 - std::lgamma(0.5 * n + 1.0));
        tail = q * cn * std::pow(r_out, n) * std::pow(s_hi, q - n) / (n - q);
    } else {
        auto f = [&](double s) {
            if (s <= 0.0) return 0.0;
            const double z = 0.5 * r_in * r_in / (s * s);
            const double Q = boost::math::gamma_q(0.5 * n, z);
            return Q == 0.0 ? 0.0 : std::abs(q) * std::pow(s, q - 1.0) * Q;
        };
        boost::math::quadrature::tanh_sinh<double> ts;
        tail = ts.integrate(f, 0.0, s_lo);
    }

    DualVolumeResult r;
    r.q = q;
    r.formulation = Formulation::LayerCake;
    r.value = closed + inner;
    r.std_error = mean_and_stderr(powered(sample_rho, q)).std_error;
    r.truncation_bound = tail;
    const double c = c_constant(n, q);
    r.dual_volume = r.value / c;
    r.dual_volume_error = r.std_error / c;
    return r;
}

inline DualVolumeResult layer_cake_moment(const ConvexBody& K, double q, const GaussianSample& sample,
                                          const LayerCakeOptions& opt = {}) {
    check_gaussian_exponent(K.dim(), q);
    const auto rho = sample_radials(K, sample);
    std::vector<double> norms(sample.count());
    for (int j = 0; j < sample.count(); ++j) norms[j] = sample.points.col(j).norm();
    return layer_cake_moment(rho, norms, K.dim(), q, opt);
}

inline nlohmann::json result_to_json(const DualVolumeResult& r, const std::string& body_hash,
                                     const nlohmann::json& rule_meta) {
    return {{"body_hash", body_hash},
            {"q", r.q},
            {"formulation", to_string(r.formulation)},
            {"value", r.value},
            {"stderr", r.std_error},
            {"discretization_error", r.discretization_error},
            {"truncation_bound", r.truncation_bound},
            {"dual_volume", r.dual_volume},
            {"dual_volume_error", r.dual_volume_error},
            {"rule_meta", rule_meta}};
}

inline nlohmann::json rule_meta(const SphereRule& rule) {
    return {{"dim", rule.dim}, {"scheme", to_string(rule.scheme)}, {"nodes", rule.size()}, {"seed", rule.seed}};
}

} // namespace dualvol

#endif
