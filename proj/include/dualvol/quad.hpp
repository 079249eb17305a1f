#ifndef DUALVOL_QUAD_HPP
#define DUALVOL_QUAD_HPP

// Quadrature on the unit sphere, Gaussian samples in R^n, and Gaussian
// measure estimates of star bodies.
//
// Every rule stores its nodes in antipodal pairs (columns 2i and 2i+1), so any
// odd integrand integrates to exactly zero. Reductions run serially in node
// order with compensated summation; parallel evaluation only fills per-node
// slots, so results are bitwise independent of the thread count.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dualvol/bodies.hpp"
#include "dualvol/errors.hpp"
#include "dualvol/parallel.hpp"
#include "dualvol/rng.hpp"

namespace dualvol {

/// Volume of the n-dimensional Euclidean unit ball, pi^{n/2} / Gamma(n/2 + 1).
inline double omega(int n) {
    if (n < 1) fail(ErrorKind::MalformedBody, "omega needs n >= 1");
    return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0));
}

/// Surface measure of S^{n-1}: n * omega_n.
inline double sphere_area(int n) { return n * omega(n); }

enum class Scheme { Trapezoid, Fibonacci, McAntipodal };

inline const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::Trapezoid: return "trapezoid";
    case Scheme::Fibonacci: return "fibonacci";
    case Scheme::McAntipodal: return "mc-antipodal";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "trapezoid") return Scheme::Trapezoid;
    if (s == "fibonacci") return Scheme::Fibonacci;
    if (s == "mc-antipodal" || s == "mc") return Scheme::McAntipodal;
    fail(ErrorKind::BadScheme, "unknown scheme '" + s + "'");
}

inline constexpr int kBatchCount = 20;

struct SphereRule {
    int dim = 0;
    Scheme scheme = Scheme::McAntipodal;
    std::uint64_t seed = 0;
    Matrix nodes;   // dim x m, antipodal pairs in adjacent columns
    Vector weights; // surface-measure weights, sum = n * omega_n

    int size() const { return static_cast<int>(nodes.cols()); }
    int pairs() const { return size() / 2; }
    bool stochastic() const { return scheme == Scheme::McAntipodal; }
    Direction node(int i) const { return Direction::normalize(nodes.col(i)); }
};

/// Builds a rule of antipodal pairs.
///   trapezoid    (n = 2): m angles pi k / m over the half circle, mirrored (2m nodes)
///   fibonacci    (n = 3): m/2 golden-angle spiral points on the upper hemisphere, mirrored (m even)
///   mc-antipodal (any n): m/2 normalized Gaussian directions plus antipodes (m even)
/// All weights are equal and sum to the sphere's surface measure.
inline SphereRule sphere_rule(int n, Scheme scheme, int m, std::uint64_t seed = 0) {
    if (scheme == Scheme::Trapezoid ? m < 1 : (m < 2 || m % 2 != 0))
        fail(ErrorKind::BadScheme, "node count must be positive (and even for fibonacci / mc-antipodal)");
    if (scheme == Scheme::Trapezoid && n != 2) fail(ErrorKind::BadScheme, "trapezoid rule is for n = 2 only");
    if (scheme == Scheme::Fibonacci && n != 3) fail(ErrorKind::BadScheme, "fibonacci rule is for n = 3 only");
    if (n < 2) fail(ErrorKind::BadScheme, "sphere rules need n >= 2");
    SphereRule rule;
    rule.dim = n;
    rule.scheme = scheme;
    rule.seed = scheme == Scheme::McAntipodal ? seed : 0;
    const int half = scheme == Scheme::Trapezoid ? m : m / 2;
    rule.nodes.resize(n, 2 * half);
    switch (scheme) {
    case Scheme::Trapezoid:
        for (int k = 0; k < half; ++k) {
            const double th = std::numbers::pi * k / m;
            rule.nodes(0, 2 * k) = std::cos(th);
            rule.nodes(1, 2 * k) = std::sin(th);
        }
        break;
    case Scheme::Fibonacci: {
        const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int k = 0; k < half; ++k) {
            const double z = 1.0 - (k + 0.5) / half;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double frac = std::fmod(k * golden, 1.0);
            const double phi = 2.0 * std::numbers::pi * frac;
            rule.nodes(0, 2 * k) = r * std::cos(phi);
            rule.nodes(1, 2 * k) = r * std::sin(phi);
            rule.nodes(2, 2 * k) = z;
        }
        break;
    }
    case Scheme::McAntipodal: {
        Engine eng = make_engine(seed);
        for (int k = 0; k < half; ++k) rule.nodes.col(2 * k) = random_direction(n, eng).vec();
        break;
    }
    }
    for (int k = 0; k < half; ++k) rule.nodes.col(2 * k + 1) = -rule.nodes.col(2 * k);
    rule.weights = Vector::Constant(2 * half, sphere_area(n) / (2 * half));
    return rule;
}

/// Default rule sizes: 4096 half-circle angles (n=2, trapezoid), 2e4 (n=3, fibonacci), 1e5 (n>=4, mc).
inline SphereRule default_rule(int n, std::uint64_t seed = 0, int m = 0) {
    if (n == 2) return sphere_rule(2, Scheme::Trapezoid, m > 0 ? m : 4096);
    if (n == 3) return sphere_rule(3, Scheme::Fibonacci, m > 0 ? m : 20000);
    return sphere_rule(n, Scheme::McAntipodal, m > 0 ? m : 100000, seed);
}

/// f evaluated at every node, in node order.
template <class F>
std::vector<double> evaluate_nodes(const SphereRule& rule, F&& f) {
    return parallel_map(static_cast<std::size_t>(rule.size()), [&](std::size_t i) {
        return f(Direction::normalize(rule.nodes.col(static_cast<int>(i))));
    });
}

namespace detail {

inline double weighted_sum(const SphereRule& rule, std::span<const double> g, int pair_lo, int pair_hi,
                           int pair_stride = 1) {
    CompensatedSum s;
    for (int p = pair_lo; p < pair_hi; p += pair_stride) {
        s.add(rule.weights[2 * p] * g[2 * p]);
        s.add(rule.weights[2 * p + 1] * g[2 * p + 1]);
    }
    return s.value();
}

inline double weight_total(const SphereRule& rule, int pair_lo, int pair_hi, int pair_stride = 1) {
    CompensatedSum s;
    for (int p = pair_lo; p < pair_hi; p += pair_stride) {
        s.add(rule.weights[2 * p]);
        s.add(rule.weights[2 * p + 1]);
    }
    return s.value();
}

inline std::pair<int, int> batch_range(const SphereRule& rule, int b) {
    const int P = rule.pairs();
    return {static_cast<int>(static_cast<long long>(P) * b / kBatchCount),
            static_cast<int>(static_cast<long long>(P) * (b + 1) / kBatchCount)};
}

} // namespace detail

struct Estimate {
    double value = 0.0;
    double uncertainty = 0.0; // stderr (stochastic) or discretization estimate (deterministic)
};

/// Estimates f(I_1, ..., I_k) where I_j = sum_i w_i g_j(u_i), with an
/// uncertainty that sees the correlation between the integrals:
///  - stochastic rules: jackknife over kBatchCount contiguous batches of pairs;
///  - deterministic rules: |f(full rule) - f(every other pair, reweighted)|.
template <class F>
Estimate rule_estimate(const SphereRule& rule, std::span<const std::vector<double>> integrands, F&& f) {
    const int k = static_cast<int>(integrands.size());
    const int P = rule.pairs();
    std::vector<double> full(k);
    for (int j = 0; j < k; ++j) full[j] = detail::weighted_sum(rule, integrands[j], 0, P);
    Estimate est;
    est.value = f(std::span<const double>(full));
    if (P < 2) return est;
    const double total = detail::weight_total(rule, 0, P);
    if (rule.stochastic() && P >= kBatchCount) {
        std::vector<double> loo(kBatchCount);
        std::vector<double> part(k);
        for (int b = 0; b < kBatchCount; ++b) {
            const auto [lo, hi] = detail::batch_range(rule, b);
            const double wb = detail::weight_total(rule, lo, hi);
            const double rescale = total / (total - wb);
            for (int j = 0; j < k; ++j)
                part[j] = (full[j] - detail::weighted_sum(rule, integrands[j], lo, hi)) * rescale;
            loo[b] = f(std::span<const double>(part));
        }
        double mean = 0.0;
        for (double v : loo) mean += v;
        mean /= kBatchCount;
        double ss = 0.0;
        for (double v : loo) ss += (v - mean) * (v - mean);
        est.uncertainty = std::sqrt((kBatchCount - 1.0) / kBatchCount * ss);
    } else {
        std::vector<double> coarse(k);
        const double rescale = total / detail::weight_total(rule, 0, P, 2);
        for (int j = 0; j < k; ++j) coarse[j] = detail::weighted_sum(rule, integrands[j], 0, P, 2) * rescale;
        est.uncertainty = std::abs(est.value - f(std::span<const double>(coarse)));
    }
    return est;
}

struct IntegralResult {
    double value = 0.0;
    double std_error = 0.0; // batch-means standard error; 0 for deterministic rules
};

/// sum_i w_i f(u_i). Throws NonFiniteIntegrand naming the first bad node.
template <class F>
IntegralResult integrate_sphere(const SphereRule& rule, F&& f) {
    const std::vector<double> g = evaluate_nodes(rule, f);
    for (int i = 0; i < rule.size(); ++i) {
        if (!std::isfinite(g[i])) {
            std::ostringstream msg;
            msg << "integrand is " << g[i] << " at node " << i << " = (" << rule.nodes.col(i).transpose() << ")";
            fail(ErrorKind::NonFiniteIntegrand, msg.str());
        }
    }
    IntegralResult out;
    out.value = detail::weighted_sum(rule, g, 0, rule.pairs());
    if (rule.stochastic() && rule.pairs() >= kBatchCount) {
        const double total = detail::weight_total(rule, 0, rule.pairs());
        std::vector<double> means(kBatchCount);
        for (int b = 0; b < kBatchCount; ++b) {
            const auto [lo, hi] = detail::batch_range(rule, b);
            means[b] = detail::weighted_sum(rule, g, lo, hi) * total / detail::weight_total(rule, lo, hi);
        }
        double mu = 0.0;
        for (double v : means) mu += v;
        mu /= kBatchCount;
        double ss = 0.0;
        for (double v : means) ss += (v - mu) * (v - mu);
        out.std_error = std::sqrt(ss / (kBatchCount - 1.0) / kBatchCount);
    }
    return out;
}

/// CSV dump for audit: coordinates then weight, one node per line.
inline void write_rule_csv(const SphereRule& rule, std::ostream& os) {
    os.precision(17);
    for (int d = 0; d < rule.dim; ++d) os << "u" << d << ',';
    os << "weight\n";
    for (int i = 0; i < rule.size(); ++i) {
        for (int d = 0; d < rule.dim; ++d) os << rule.nodes(d, i) << ',';
        os << rule.weights[i] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Gaussian samples

struct GaussianSample {
    int dim = 0;
    std::uint64_t seed = 0;
    Matrix points; // dim x N

    int count() const { return static_cast<int>(points.cols()); }
};

inline GaussianSample gaussian_sample(int n, int N, std::uint64_t seed) {
    if (n < 1 || N < 2) fail(ErrorKind::BadScheme, "gaussian sample needs n >= 1 and N >= 2");
    GaussianSample s;
    s.dim = n;
    s.seed = seed;
    s.points.resize(n, N);
    Engine eng = make_engine(derive_seed(seed, 0x9a55));
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < n; ++i) s.points(i, j) = nd(eng);
    return s;
}

/// gauge_K at every sample point.
inline std::vector<double> sample_gauges(const ConvexBody& K, const GaussianSample& sample) {
    if (K.dim() != sample.dim) fail(ErrorKind::MalformedBody, "sample dimension does not match body");
    return parallel_map(static_cast<std::size_t>(sample.count()), [&](std::size_t j) {
        return gauge(K, sample.points.col(static_cast<int>(j)));
    });
}

struct Probability {
    double p = 0.0;
    double std_error = 0.0;
};

inline Probability fraction_at_most(std::span<const double> gauges, double t) {
    std::size_t hits = 0;
    for (double g : gauges)
        if (g <= t) ++hits;
    const double N = static_cast<double>(gauges.size());
    const double p = hits / N;
    return {p, std::sqrt(p * (1.0 - p) / N)};
}

/// gamma_n(tK) estimated as the fraction of sample points with gauge_K <= t.
inline Probability gaussian_measure_mc(const ConvexBody& K, double t, const GaussianSample& sample) {
    if (!(t > 0.0)) fail(ErrorKind::MalformedBody, "dilation t must be positive");
    const auto g = sample_gauges(K, sample);
    return fraction_at_most(g, t);
}

} // namespace dualvol

#endif
