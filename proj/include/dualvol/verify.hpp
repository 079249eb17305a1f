#ifndef DUALVOL_VERIFY_HPP
#define DUALVOL_VERIFY_HPP

// Inequality checkers. Every check evaluates both sides on the same nodes or
// sample, reports margin >= 0 when the inequality holds, and classifies the
// margin against its combined uncertainty.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualvol/bodies.hpp"
#include "dualvol/body_io.hpp"
#include "dualvol/errors.hpp"
#include "dualvol/functionals.hpp"
#include "dualvol/john.hpp"
#include "dualvol/quad.hpp"

namespace dualvol {

enum class Verdict { Holds, HoldsWithinNoise, ViolationCandidate };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::HoldsWithinNoise: return "HoldsWithinNoise";
    case Verdict::ViolationCandidate: return "ViolationCandidate";
    }
    return "?";
}

struct CheckReport {
    std::string name;
    double q = 0.0;
    double parameter = std::numeric_limits<double>::quiet_NaN(); // lambda, t or scale factor when relevant
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double uncertainty = 0.0;
    Verdict verdict = Verdict::Holds;
    std::vector<std::string> fingerprints;
};

/// Margins are never trusted below a few hundred ulps of the compared values.
inline double rounding_floor(double scale) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::abs(scale);
}

inline Verdict classify(double margin, double uncertainty) {
    if (margin < -3.0 * uncertainty) return Verdict::ViolationCandidate;
    if (margin < 0.0) return Verdict::HoldsWithinNoise;
    return Verdict::Holds;
}

inline void finalize(CheckReport& r, double raw_uncertainty, double scale) {
    r.uncertainty = std::max(raw_uncertainty, rounding_floor(scale));
    r.verdict = classify(r.margin, r.uncertainty);
}

inline nlohmann::json report_to_json(const CheckReport& r) {
    nlohmann::json j = {{"name", r.name},
                        {"q", r.q},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"margin", r.margin},
                        {"uncertainty", r.uncertainty},
                        {"verdict", to_string(r.verdict)},
                        {"fingerprints", r.fingerprints}};
    if (!std::isnan(r.parameter)) j["parameter"] = r.parameter;
    return j;
}

inline std::string report_line(const CheckReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << r.name << " q=" << r.q;
    if (!std::isnan(r.parameter)) os << " param=" << r.parameter;
    os << " lhs=" << r.lhs << " rhs=" << r.rhs << " margin=" << r.margin << " +- " << r.uncertainty << " "
       << to_string(r.verdict);
    return os.str();
}

// ---------------------------------------------------------------------------
// Brunn-Minkowski type inequalities

struct ExponentPolicy {
    bool allow_beyond_dimension = false; // exploration of q > n
};

inline void check_bm_exponent(int n, double q, const ExponentPolicy& policy) {
    if (!(q > 0.0) || !std::isfinite(q) || (q > n && !policy.allow_beyond_dimension))
        fail(ErrorKind::ExponentOutOfRange, "this check needs 0 < q <= n");
}

/// Radial profiles of K, L and K + L on one rule.
struct PairProfiles {
    std::vector<double> K, L, sum;
};

inline PairProfiles pair_profiles(const ConvexBody& K, const ConvexBody& L, const SphereRule& rule) {
    if (K.dim() != L.dim()) fail(ErrorKind::MalformedBody, "bodies have different dimensions");
    return {radial_profile(K, rule), radial_profile(L, rule), radial_profile(minkowski_sum(K, L), rule)};
}

/// margin = V_q(K+L)^{1/q} - V_q(K)^{1/q} - V_q(L)^{1/q}, from precomputed profiles.
inline CheckReport bm_report(const PairProfiles& pr, double q, const SphereRule& rule) {
    const int n = rule.dim;
    const std::vector<double> g[3] = {powered(pr.K, q), powered(pr.L, q), powered(pr.sum, q)};
    auto root = [n, q](double I) { return std::pow(I / n, 1.0 / q); };
    const Estimate e = rule_estimate(rule, g, [&](std::span<const double> I) {
        return root(I[2]) - root(I[0]) - root(I[1]);
    });
    CheckReport r;
    r.name = "bm";
    r.q = q;
    const double sK = root(detail::weighted_sum(rule, g[0], 0, rule.pairs()));
    const double sL = root(detail::weighted_sum(rule, g[1], 0, rule.pairs()));
    r.lhs = root(detail::weighted_sum(rule, g[2], 0, rule.pairs()));
    r.rhs = sK + sL;
    r.margin = e.value;
    finalize(r, e.uncertainty, r.lhs);
    return r;
}

inline std::vector<CheckReport> check_bm(const ConvexBody& K, const ConvexBody& L, std::span<const double> qs,
                                         const SphereRule& rule, const ExponentPolicy& policy = {}) {
    for (double q : qs) check_bm_exponent(K.dim(), q, policy);
    const PairProfiles pr = pair_profiles(K, L, rule);
    const std::vector<std::string> fp = {body_fingerprint(K), body_fingerprint(L)};
    std::vector<CheckReport> out;
    for (double q : qs) {
        out.push_back(bm_report(pr, q, rule));
        out.back().fingerprints = fp;
    }
    return out;
}

inline CheckReport check_bm(const ConvexBody& K, const ConvexBody& L, double q, const SphereRule& rule,
                            const ExponentPolicy& policy = {}) {
    const double qs[1] = {q};
    return check_bm(K, L, qs, rule, policy).front();
}

/// (1 - lambda) K + lambda L, with the endpoints returned unchanged.
inline ConvexBody convex_combination(const ConvexBody& K, const ConvexBody& L, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorKind::ExponentOutOfRange, "lambda must lie in [0, 1]");
    if (lambda == 0.0) return K;
    if (lambda == 1.0) return L;
    return minkowski_sum(scale(K, 1.0 - lambda), scale(L, lambda));
}

/// margin = log V_q((1-l)K + lL) - (1-l) log V_q(K) - l log V_q(L).
inline std::vector<CheckReport> check_bm_logconcave(const ConvexBody& K, const ConvexBody& L,
                                                    std::span<const double> lambdas, std::span<const double> qs,
                                                    const SphereRule& rule, const ExponentPolicy& policy = {}) {
    for (double q : qs) check_bm_exponent(K.dim(), q, policy);
    if (K.dim() != L.dim()) fail(ErrorKind::MalformedBody, "bodies have different dimensions");
    const auto rK = radial_profile(K, rule);
    const auto rL = radial_profile(L, rule);
    const std::vector<std::string> fp = {body_fingerprint(K), body_fingerprint(L)};
    std::vector<CheckReport> out;
    for (double lambda : lambdas) {
        const ConvexBody C = convex_combination(K, L, lambda);
        const auto rC = lambda == 0.0 ? rK : lambda == 1.0 ? rL : radial_profile(C, rule);
        for (double q : qs) {
            const std::vector<double> g[3] = {powered(rK, q), powered(rL, q), powered(rC, q)};
            auto lhs_of = [lambda](std::span<const double> I) {
                return (1.0 - lambda) * std::log(I[0]) + lambda * std::log(I[1]);
            };
            const Estimate e = rule_estimate(rule, g, [&](std::span<const double> I) {
                return lambda == 0.0 ? 0.0 : lambda == 1.0 ? 0.0 : std::log(I[2]) - lhs_of(I);
            });
            CheckReport r;
            r.name = "logconcave";
            r.q = q;
            r.parameter = lambda;
            const double IK = detail::weighted_sum(rule, g[0], 0, rule.pairs());
            const double IL = detail::weighted_sum(rule, g[1], 0, rule.pairs());
            const double IC = detail::weighted_sum(rule, g[2], 0, rule.pairs());
            const double Iv[2] = {IK, IL};
            r.rhs = std::log(IC / rule.dim);
            r.lhs = lhs_of(Iv) - std::log(static_cast<double>(rule.dim));
            r.margin = e.value;
            r.fingerprints = fp;
            finalize(r, e.uncertainty, std::max(std::abs(r.lhs), 1.0));
            out.push_back(std::move(r));
        }
    }
    return out;
}

/// |V_q(tK) - t^q V_q(K)| / V_q(K), reported as margin = -relerr against tol.
inline CheckReport check_homogeneity(const ConvexBody& K, double q, double t, const SphereRule& rule,
                                     double tol = 1e-9) {
    if (!(t >= 0.1 && t <= 10.0)) fail(ErrorKind::ExponentOutOfRange, "scale factor must lie in [0.1, 10]");
    CheckReport r;
    r.name = "homogeneity";
    r.q = q;
    r.parameter = t;
    r.fingerprints = {body_fingerprint(K)};
    const double base = dual_querm(K, q, rule).value;
    const double scaled = t == 1.0 ? base : dual_querm(scale(K, t), q, rule).value;
    r.lhs = scaled;
    r.rhs = std::pow(t, q) * base;
    r.margin = -std::abs(r.lhs - r.rhs) / base;
    r.uncertainty = tol / 3.0;
    r.verdict = classify(r.margin, r.uncertainty);
    return r;
}

// ---------------------------------------------------------------------------
// Reverse isoperimetric and Gaussian tail inequalities (bodies in John position)

inline ConvexBody john_positioned(const ConvexBody& K, bool auto_john) {
    if (auto_john) return to_john_position(K);
    require_john_position(K);
    return K;
}

/// margin = Vbar_q(B_inf^n) - Vbar_q(K) for each q <= n, both on the same rule.
inline std::vector<CheckReport> check_reverse_isop(const ConvexBody& K, std::span<const double> qs,
                                                   const SphereRule& rule, bool auto_john) {
    const int n = K.dim();
    for (double q : qs)
        if (!(q <= n) || !std::isfinite(q)) fail(ErrorKind::ExponentOutOfRange, "reverse isoperimetric check needs q <= n");
    const ConvexBody J = john_positioned(K, auto_john);
    const auto rJ = radial_profile(J, rule);
    const auto rC = radial_profile(cube(n), rule);
    const double area = sphere_area(n);
    const std::vector<std::string> fp = {body_fingerprint(K)};
    std::vector<CheckReport> out;
    for (double q : qs) {
        std::vector<double> g[2];
        std::function<double(double)> norm;
        if (q == 0.0) {
            g[0] = logged(rC);
            g[1] = logged(rJ);
            norm = [area](double I) { return std::exp(I / area); };
        } else {
            g[0] = powered(rC, q);
            g[1] = powered(rJ, q);
            norm = [area, q](double I) { return std::pow(I / area, 1.0 / q); };
        }
        const Estimate e = rule_estimate(rule, std::span<const std::vector<double>>(g, 2),
                                         [&](std::span<const double> I) { return norm(I[0]) - norm(I[1]); });
        CheckReport r;
        r.name = "rvip";
        r.q = q;
        r.rhs = norm(detail::weighted_sum(rule, g[0], 0, rule.pairs()));
        r.lhs = norm(detail::weighted_sum(rule, g[1], 0, rule.pairs()));
        r.margin = e.value;
        r.fingerprints = fp;
        finalize(r, e.uncertainty, r.rhs);
        out.push_back(std::move(r));
    }
    return out;
}

inline CheckReport check_reverse_isop(const ConvexBody& K, double q, const SphereRule& rule, bool auto_john) {
    const double qs[1] = {q};
    return check_reverse_isop(K, qs, rule, auto_john).front();
}

/// margin = P(gauge_K > t) - P(gauge_cube > t) on one shared sample; the
/// uncertainty is the standard error of the paired difference.
inline std::vector<CheckReport> check_ss_tail(const ConvexBody& K, std::span<const double> ts,
                                              const GaussianSample& sample, bool auto_john) {
    const int n = K.dim();
    if (sample.dim != n) fail(ErrorKind::MalformedBody, "sample dimension does not match body");
    const ConvexBody J = john_positioned(K, auto_john);
    const auto gJ = sample_gauges(J, sample);
    const auto gC = sample_gauges(cube(n), sample);
    const double N = static_cast<double>(sample.count());
    std::vector<CheckReport> out;
    for (double t : ts) {
        if (!(t > 0.0)) fail(ErrorKind::ExponentOutOfRange, "tail level must be positive");
        double sJ = 0, sC = 0, sd = 0, sdd = 0;
        for (int i = 0; i < sample.count(); ++i) {
            const double a = gJ[i] > t ? 1.0 : 0.0;
            const double b = gC[i] > t ? 1.0 : 0.0;
            sJ += a;
            sC += b;
            sd += a - b;
            sdd += (a - b) * (a - b);
        }
        CheckReport r;
        r.name = "ss-tail";
        r.parameter = t;
        r.q = std::numeric_limits<double>::quiet_NaN();
        r.lhs = sC / N;
        r.rhs = sJ / N;
        r.margin = sd / N;
        const double var = std::max(0.0, (sdd / N - r.margin * r.margin)) * N / (N - 1.0);
        r.uncertainty = std::sqrt(var / N);
        r.verdict = classify(r.margin, r.uncertainty);
        r.fingerprints = {body_fingerprint(K)};
        out.push_back(std::move(r));
    }
    return out;
}

inline CheckReport check_ss_tail(const ConvexBody& K, double t, const GaussianSample& sample, bool auto_john) {
    const double ts[1] = {t};
    return check_ss_tail(K, ts, sample, auto_john).front();
}

} // namespace dualvol

#endif
