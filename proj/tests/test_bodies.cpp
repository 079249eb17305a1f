#include <gtest/gtest.h>

#include <cmath>

#include "dualvol/bodies.hpp"
#include "dualvol/body_io.hpp"

using namespace dualvol;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Direction dir(const Vector& v) { return Direction::normalize(v); }

ConvexBody square_v() {
    Matrix P(2, 2);
    P << 1, 1, 1, -1;
    return make_vpolytope(P);
}

} // namespace

TEST(Direction, RejectsNonUnit) {
    EXPECT_THROW(Direction(vec2(1, 1)), Error);
    EXPECT_NO_THROW(Direction(vec2(1, 0)));
    EXPECT_THROW(Direction::normalize(vec2(0, 0)), Error);
}

TEST(Construction, ValidatesInput) {
    Matrix A = Matrix::Identity(2, 2);
    EXPECT_THROW(make_hpolytope(A, vec2(1, 0)), Error);      // zero offset
    EXPECT_THROW(make_hpolytope(A.topRows(1), Vector::Ones(1)), Error); // unbounded
    Matrix P(2, 2);
    P << 1, 2, 1, 2;
    EXPECT_THROW(make_vpolytope(P), Error);                 // rank deficient
    EXPECT_THROW(make_lpball(2, 0.5), Error);
    Matrix M(2, 2);
    M << 1, 0, 0, -1;
    EXPECT_THROW(make_ellipsoid(M), Error);
    Matrix T = Matrix::Zero(2, 2);
    T(0, 0) = 1;
    EXPECT_THROW(linear_image(T, cube(2)), Error);
    try {
        linear_image(T, cube(2));
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularTransform);
    }
}

TEST(Radial, Anchors) {
    EXPECT_NEAR(radial_unit(cube(2), dir(vec2(1, 0))), 1.0, 1e-15);
    EXPECT_NEAR(radial_unit(cube(2), dir(vec2(1, 1))), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(radial_unit(square_v(), dir(vec2(1, 0))), 1.0, 1e-12);
    EXPECT_NEAR(radial_unit(make_lpball(2, 1.0), dir(vec2(1, 1))), 1.0 / std::sqrt(2.0), 1e-15);
    Matrix M = 4.0 * Matrix::Identity(2, 2);
    EXPECT_NEAR(gauge(make_ellipsoid(M), vec2(1, 0)), 0.5, 1e-15);
    EXPECT_NEAR(gauge(cube(2), vec2(2, 0)), 2.0, 1e-15);
    EXPECT_EQ(gauge(cube(4), Vector::Zero(4)), 0.0);
    EXPECT_NEAR(radial_homog(euclidean_ball(3), Vector::Constant(3, 2.0 / std::sqrt(3.0))), 0.5, 1e-15);
    EXPECT_NEAR(radial_homog(cube(2), vec2(1, 1)), 1.0, 1e-15);
    EXPECT_NEAR(radial_homog(cube(2), vec2(0.5, 0)), 2.0, 1e-15);
    EXPECT_TRUE(std::isinf(radial_homog(cube(2), vec2(0, 0))));
}

TEST(Support, Anchors) {
    EXPECT_NEAR(support(cube(2), vec2(1, 0)), 1.0, 1e-12);
    EXPECT_NEAR(support(minkowski_sum(cube(2), cube(2)), vec2(0, 1)), 2.0, 1e-12);
    EXPECT_NEAR(support(square_v(), dir(vec2(1, 1))), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(support(make_lpball(3, 2.5, 2.0), Vector::Unit(3, 0)), 2.0, 1e-15);
}

TEST(Sum, Anchors) {
    const ConvexBody S = minkowski_sum(cube(2), cube(2));
    EXPECT_NEAR(radial_unit(S, dir(vec2(1, 0))), 2.0, 1e-12);
    // Thin box [-1,1]x[-0.1,0.1] plus its quarter-turn is the square [-1.1,1.1]^2.
    Matrix A = Matrix::Identity(2, 2);
    const ConvexBody thin = make_vpolytope((Matrix(2, 2) << 1, 1, 0.1, -0.1).finished());
    const ConvexBody turned = make_vpolytope((Matrix(2, 2) << 0.1, 0.1, 1, -1).finished());
    const ConvexBody box = make_hpolytope(A, Vector::Constant(2, 1.1));
    const ConvexBody sum = minkowski_sum(thin, turned);
    Engine eng = make_engine(1);
    for (int i = 0; i < 50; ++i) {
        const Direction u = random_direction(2, eng);
        EXPECT_NEAR(radial_unit(sum, u), radial_unit(box, u), 1e-10);
    }
    EXPECT_NEAR(radial_unit(sum, dir(vec2(1, 0))), support(thin, vec2(1, 0)) + support(turned, vec2(1, 0)), 1e-12);
    EXPECT_THROW(radial_unit(minkowski_sum(euclidean_ball(2), cube(2)), dir(vec2(1, 0))), Error);
}

TEST(Sum, DilatePairs) {
    const ConvexBody K = random_body({3, BodyFamily::VPolytope, 12}, 3);
    const ConvexBody S = minkowski_sum(K, scale(K, 2.0));
    Engine eng = make_engine(2);
    for (int i = 0; i < 100; ++i) {
        const Direction u = random_direction(3, eng);
        EXPECT_NEAR(radial_unit(S, u) / (3.0 * radial_unit(K, u)), 1.0, 1e-10);
    }
}

TEST(Image, Consistency) {
    Engine eng = make_engine(4);
    const ConvexBody K = random_body({3, BodyFamily::HPolytope, 10}, 9);
    const Matrix T = Matrix::Identity(3, 3) + 0.3 * Matrix::Random(3, 3);
    const ConvexBody TK = linear_image(T, K);
    const ConvexBody I = linear_image(Matrix::Identity(3, 3), K);
    const ConvexBody K2 = linear_image(2.0 * Matrix::Identity(3, 3), K);
    for (int i = 0; i < 50; ++i) {
        const Vector x = gaussian_vector(3, eng);
        EXPECT_NEAR(gauge(TK, x), gauge(K, T.inverse() * x), 1e-12);
        const Direction u = random_direction(3, eng);
        EXPECT_EQ(radial_unit(I, u), radial_unit(K, u));
        EXPECT_NEAR(radial_unit(K2, u), 2.0 * radial_unit(K, u), 1e-12);
        EXPECT_NEAR(support(TK, u), support(K, Vector(T.transpose() * u.vec())), 1e-9);
    }
}

TEST(Polar, CubeAndCrossPolytope) {
    const ConvexBody P = polar(cube(3));
    ASSERT_NE(P.as<VPolytope>(), nullptr);
    Engine eng = make_engine(6);
    for (int i = 0; i < 50; ++i) {
        const Direction u = random_direction(3, eng);
        EXPECT_NEAR(radial_unit(P, u), radial_unit(make_lpball(3, 1.0), u), 1e-12);
    }
    const ConvexBody PP = polar(polar(square_v()));
    for (int i = 0; i < 50; ++i) {
        const Vector x = gaussian_vector(2, eng);
        EXPECT_NEAR(gauge(PP, x), gauge(square_v(), x), 1e-12);
    }
    EXPECT_THROW(polar(euclidean_ball(3)), Error);
}

TEST(Properties, SymmetryHomogeneityDuality) {
    Engine eng = make_engine(7);
    for (int trial = 0; trial < 20; ++trial) {
        const BodyFamily fam = trial % 2 ? BodyFamily::HPolytope : BodyFamily::VPolytope;
        const ConvexBody K = random_body({3, fam, 10}, 100 + trial);
        const ConvexBody Kp = polar(K);
        for (int i = 0; i < 30; ++i) {
            const Direction u = random_direction(3, eng);
            EXPECT_NEAR(radial_unit(K, u), radial_unit(K, -u), 1e-12 * radial_unit(K, u));
            const Vector x = gaussian_vector(3, eng);
            const double t = 0.1 + 9.9 * std::uniform_real_distribution<double>(0, 1)(eng);
            EXPECT_NEAR(radial_homog(K, t * x) * t / radial_homog(K, x), 1.0, 1e-10);
            EXPECT_NEAR(radial_unit(Kp, u) * support(K, u), 1.0, 1e-9);
        }
    }
}

TEST(Properties, RepresentationEquivalence) {
    const ConvexBody H = cube(3);
    const ConvexBody V = make_vpolytope(half_sign_vectors(3));
    const ConvexBody B = make_lpball(3, std::numeric_limits<double>::infinity());
    Engine eng = make_engine(8);
    for (int i = 0; i < 1000; ++i) {
        const Direction u = random_direction(3, eng);
        EXPECT_NEAR(radial_unit(H, u), radial_unit(V, u), 1e-9);
        EXPECT_NEAR(radial_unit(B, u), radial_unit(V, u), 1e-9);
        EXPECT_NEAR(support(H, u), support(V, u), 1e-9);
    }
}

TEST(Properties, SumSupportAdditivityAndMonotonicity) {
    Engine eng = make_engine(9);
    for (int trial = 0; trial < 10; ++trial) {
        const ConvexBody K = random_body({3, BodyFamily::VPolytope, 8}, 200 + trial);
        const ConvexBody L = random_body({3, BodyFamily::VPolytope, 8}, 300 + trial);
        const ConvexBody S = minkowski_sum(K, L);
        for (int i = 0; i < 20; ++i) {
            const Direction u = random_direction(3, eng);
            EXPECT_NEAR(support(S, u), support(K, u) + support(L, u), 1e-9);
            // K ⊆ K + L since 0 ∈ L.
            EXPECT_LE(radial_unit(K, u), radial_unit(S, u) * (1 + 1e-12));
        }
    }
}

TEST(RandomBody, DeterministicPairedAndRoomy) {
    const GeneratorSpec spec{3, BodyFamily::VPolytope, 20};
    const ConvexBody a = random_body(spec, 42);
    const ConvexBody b = random_body(spec, 42);
    EXPECT_EQ(body_fingerprint(a), body_fingerprint(b));
    ASSERT_NE(a.as<VPolytope>(), nullptr);
    EXPECT_EQ(2 * a.as<VPolytope>()->points.cols(), 40); // 20 stored representatives of 40 vertices
    EXPECT_GE(inradius(a), spec.r_min);
    Engine eng = make_engine(10);
    for (int i = 0; i < 200; ++i) EXPECT_LE(gauge(a, random_direction(3, eng).vec()), 1.0 / spec.r_min);
    const ConvexBody h = random_body({3, BodyFamily::HPolytope, 20}, 42);
    EXPECT_GE(inradius(h), 0.05);
    EXPECT_NE(body_fingerprint(random_body(spec, 43)), body_fingerprint(a));
}

TEST(RandomBody, NonSymmetricCentered) {
    const ConvexBody K = random_body({3, BodyFamily::VPolytope, 12, 0.05, false}, 5);
    const auto* v = K.as<VPolytope>();
    ASSERT_NE(v, nullptr);
    EXPECT_FALSE(v->symmetric);
    EXPECT_LT(v->points.rowwise().mean().norm(), 1e-12);
}

TEST(BodyIO, RoundTripIsLossless) {
    Engine eng = make_engine(12);
    const ConvexBody V = random_body({3, BodyFamily::VPolytope, 7}, 1);
    const ConvexBody H = random_body({3, BodyFamily::HPolytope, 7}, 2);
    const Matrix T = random_rotation(3, eng);
    const std::vector<ConvexBody> bodies = {
        V, H, make_lpball(3, 2.5, 1.5), make_lpball(3, std::numeric_limits<double>::infinity()),
        make_ellipsoid(Matrix::Identity(3, 3) * 2.0), minkowski_sum(V, scale(V, 0.3)), linear_image(T, H)};
    for (const auto& K : bodies) {
        const ConvexBody back = body_from_json(nlohmann::json::parse(body_to_json(K).dump()));
        EXPECT_EQ(body_fingerprint(back), body_fingerprint(K));
        for (int i = 0; i < 10; ++i) {
            const Direction u = random_direction(3, eng);
            EXPECT_EQ(radial_unit(back, u), radial_unit(K, u));
        }
    }
}

TEST(BodyIO, MalformedInputs) {
    auto kind_of = [](const char* text) {
        try {
            body_from_json(nlohmann::json::parse(text));
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::UnsupportedComposition;
    };
    EXPECT_EQ(kind_of(R"({"type": "hpolytope"})"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of(R"({"dim": 2, "type": "blob"})"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of(R"({"dim": 2, "type": "hpolytope", "normals": [[1, 0], [0]], "offsets": [1, 1]})"),
              ErrorKind::ParseError);
    EXPECT_EQ(kind_of(R"({"dim": 2, "type": "hpolytope", "normals": [[1, 0], [0, 1]], "offsets": [1, -1]})"),
              ErrorKind::MalformedBody);
}
