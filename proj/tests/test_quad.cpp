#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "dualvol/quad.hpp"
#include "oracle.hpp"

using namespace dualvol;
using std::numbers::pi;

TEST(Omega, KnownValues) {
    EXPECT_NEAR(omega(1), 2.0, 1e-14);
    EXPECT_NEAR(omega(2), pi, 1e-14);
    EXPECT_NEAR(omega(3), 4.0 * pi / 3.0, 1e-14);
    EXPECT_NEAR(omega(4), pi * pi / 2.0, 1e-14);
}

TEST(SphereRule, WeightsAndPairs) {
    EXPECT_NEAR(sphere_rule(2, Scheme::Trapezoid, 4).weights.sum(), 2.0 * pi, 1e-12);
    EXPECT_EQ(sphere_rule(2, Scheme::Trapezoid, 4).size(), 8);
    EXPECT_NEAR(sphere_rule(3, Scheme::Fibonacci, 1000).weights.sum(), 4.0 * pi, 1e-12);
    EXPECT_NEAR(sphere_rule(3, Scheme::McAntipodal, 1000, 3).weights.sum(), 4.0 * pi, 1e-12);
    for (Scheme s : {Scheme::Fibonacci, Scheme::McAntipodal}) {
        const SphereRule r = sphere_rule(3, s, 200, 1);
        for (int k = 0; k < r.pairs(); ++k) {
            EXPECT_EQ(r.nodes.col(2 * k + 1), Vector(-r.nodes.col(2 * k)));
            EXPECT_NEAR(r.nodes.col(2 * k).norm(), 1.0, 1e-12);
        }
    }
}

TEST(SphereRule, BadSchemes) {
    EXPECT_THROW(sphere_rule(3, Scheme::Trapezoid, 100), Error);
    EXPECT_THROW(sphere_rule(2, Scheme::Fibonacci, 100), Error);
    EXPECT_THROW(sphere_rule(3, Scheme::McAntipodal, 101), Error);
    try {
        sphere_rule(4, Scheme::Fibonacci, 100);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BadScheme);
    }
    EXPECT_THROW(parse_scheme("lebedev"), Error);
}

TEST(SphereRule, Deterministic) {
    const SphereRule a = sphere_rule(4, Scheme::McAntipodal, 1000, 77);
    const SphereRule b = sphere_rule(4, Scheme::McAntipodal, 1000, 77);
    EXPECT_EQ(a.nodes, b.nodes);
    EXPECT_NE(a.nodes, sphere_rule(4, Scheme::McAntipodal, 1000, 78).nodes);
    EXPECT_EQ(gaussian_sample(3, 100, 5).points, gaussian_sample(3, 100, 5).points);
}

TEST(Integrate, ConstantsAndOddFunctions) {
    const SphereRule r2 = sphere_rule(2, Scheme::Trapezoid, 64);
    EXPECT_NEAR(integrate_sphere(r2, [](const Direction&) { return 1.0; }).value, 2.0 * pi, 1e-12);
    for (int n : {2, 3, 5}) {
        const SphereRule r = default_rule(n, 9, n == 5 ? 2000 : 0);
        Vector c = Vector::LinSpaced(n, 1.0, 2.0);
        EXPECT_EQ(integrate_sphere(r, [&](const Direction& u) { return c.dot(u.vec()); }).value, 0.0);
        EXPECT_NEAR(integrate_sphere(r, [](const Direction&) { return 1.0; }).value, n * omega(n), 1e-11);
    }
}

TEST(Integrate, MomentIdentityMc) {
    const SphereRule r = sphere_rule(4, Scheme::McAntipodal, 100000, 2024);
    const auto res = integrate_sphere(r, [](const Direction& u) { return u.vec()[0] * u.vec()[0]; });
    EXPECT_GT(res.std_error, 0.0);
    EXPECT_NEAR(res.value, omega(4), 3.0 * res.std_error);
}

TEST(Integrate, SquareRadialTrapezoid) {
    // 8 ln(1 + sqrt 2), also reproduced by the independent Simpson oracle.
    const double exact = 8.0 * std::log(1.0 + std::sqrt(2.0));
    EXPECT_NEAR(2.0 * oracle::square_dual_volume(1.0), exact, 1e-12);
    const SphereRule r = sphere_rule(2, Scheme::Trapezoid, 4096);
    const auto res = integrate_sphere(r, [](const Direction& u) { return 1.0 / u.vec().cwiseAbs().maxCoeff(); });
    EXPECT_NEAR(res.value, exact, 1e-5);
    EXPECT_EQ(res.std_error, 0.0);
}

TEST(Integrate, NonFiniteIntegrandNamesNode) {
    const SphereRule r = sphere_rule(2, Scheme::Trapezoid, 8);
    try {
        integrate_sphere(r, [](const Direction& u) { return u.vec()[0] == 1.0 ? NAN : 1.0; });
        FAIL() << "expected NonFiniteIntegrand";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFiniteIntegrand);
        EXPECT_NE(std::string(e.what()).find("node 0"), std::string::npos);
    }
}

TEST(Integrate, StderrCalibratedAcrossSeeds) {
    // Spread of 20 independent estimates vs the mean reported stderr.
    const ConvexBody C = cube(3);
    std::vector<double> values, errors;
    for (int s = 0; s < 20; ++s) {
        const SphereRule r = sphere_rule(3, Scheme::McAntipodal, 20000, 1000 + s);
        const auto res = integrate_sphere(r, [&](const Direction& u) { return radial_unit(C, u); });
        values.push_back(res.value);
        errors.push_back(res.std_error);
    }
    double mean = 0, ss = 0, se = 0;
    for (double v : values) mean += v / values.size();
    for (double v : values) ss += (v - mean) * (v - mean);
    for (double e : errors) se += e / errors.size();
    const double spread = std::sqrt(ss / (values.size() - 1));
    EXPECT_GT(spread / se, 0.5);
    EXPECT_LT(spread / se, 2.0);
}

TEST(Integrate, ThreadCountDoesNotChangeResults) {
    const SphereRule r = sphere_rule(3, Scheme::McAntipodal, 50000, 4);
    const ConvexBody C = cube(3);
    auto f = [&](const Direction& u) { return std::pow(radial_unit(C, u), 1.7); };
    setenv("DUALVOL_THREADS", "1", 1);
    const double a = integrate_sphere(r, f).value;
    setenv("DUALVOL_THREADS", "4", 1);
    const double b = integrate_sphere(r, f).value;
    unsetenv("DUALVOL_THREADS");
    EXPECT_EQ(a, b);
}

TEST(RuleCsv, HasHeaderAndRows) {
    std::ostringstream os;
    write_rule_csv(sphere_rule(2, Scheme::Trapezoid, 3), os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, 13), "u0,u1,weight\n");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 7);
}

TEST(GaussianMeasure, DiskChiSquare) {
    const GaussianSample s = gaussian_sample(2, 200000, 31);
    const Probability p = gaussian_measure_mc(euclidean_ball(2), 1.0, s);
    EXPECT_NEAR(p.p, 1.0 - std::exp(-0.5), 3.0 * p.std_error);
    EXPECT_GT(gaussian_measure_mc(euclidean_ball(2, 50.0), 1.0, s).p, 0.999999);
    // Thin body, shrinking t.
    Matrix A = Matrix::Identity(2, 2);
    Vector b(2);
    b << 1.0, 1e-3;
    const ConvexBody thin = make_hpolytope(A, b);
    EXPECT_LT(gaussian_measure_mc(thin, 0.01, s).p, 1e-3);
}

TEST(GaussianMeasure, MonotoneInT) {
    const GaussianSample s = gaussian_sample(3, 20000, 8);
    const ConvexBody K = random_body({3, BodyFamily::HPolytope, 10}, 8);
    const auto g = sample_gauges(K, s);
    double prev = 0.0;
    for (double t = 0.05; t < 5.0; t *= 1.3) {
        const double p = fraction_at_most(g, t).p;
        EXPECT_GE(p, prev);
        prev = p;
    }
}
