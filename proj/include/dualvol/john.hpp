#ifndef DUALVOL_JOHN_HPP
#define DUALVOL_JOHN_HPP

// Maximal inscribed (John) ellipsoids of origin-symmetric polytopes, computed
// through the polar body: the John ellipsoid of K is the polar of the
// minimum-volume origin-centered ellipsoid enclosing the vertices of K°.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dualvol/bodies.hpp"
#include "dualvol/errors.hpp"
#include "dualvol/quad.hpp"
#include "dualvol/rng.hpp"

namespace dualvol {

/// The ellipsoid {x : x' M^{-1} x <= 1}.
struct EllipsoidMatrix {
    Matrix M;
    int dim() const { return static_cast<int>(M.rows()); }
};

inline double ellipsoid_volume(const EllipsoidMatrix& E) {
    return omega(E.dim()) * std::sqrt(E.M.determinant());
}

inline EllipsoidMatrix ellipsoid_polar(const EllipsoidMatrix& E) {
    Matrix inv = E.M.inverse();
    return {0.5 * (inv + inv.transpose())};
}

struct MveeOptions {
    double eps = 1e-7;
    long max_iterations = 2'000'000;
    bool record_objective = true;
};

struct MveeResult {
    EllipsoidMatrix ellipsoid;
    long iterations = 0;
    std::vector<double> objective; // log det of the weighted moment matrix, per iteration
    double max_level = 0.0;        // max_i p_i' X^{-1} p_i at exit (n at the optimum)
    Vector weights;
};

/// Minimum-volume origin-centered ellipsoid enclosing the symmetric set
/// {±p_i} (columns of P). Frank-Wolfe on the D-optimal design dual with
/// away steps (Khachiyan / Wolfe-Atwood). The returned ellipsoid is inflated
/// by max_level / n so every point is contained exactly.
inline MveeResult mvee(const Matrix& P, const MveeOptions& opt = {}) {
    const int n = static_cast<int>(P.rows());
    const int m = static_cast<int>(P.cols());
    if (m == 0 || numeric_rank(P) < n) fail(ErrorKind::DegenerateSpan, "points do not span the space");

    Vector u = Vector::Constant(m, 1.0 / m);
    Matrix X(n, n), Xinv(n, n);
    Vector g(m);
    auto refresh = [&] {
        X = P * u.asDiagonal() * P.transpose();
        Eigen::LDLT<Matrix> ldlt(X);
        Xinv = ldlt.solve(Matrix::Identity(n, n));
        g = (P.transpose() * Xinv).cwiseProduct(P.transpose()).rowwise().sum();
    };
    refresh();

    MveeResult res;
    double logdet = std::log(X.determinant());
    if (opt.record_objective) res.objective.push_back(logdet);
    const double nn = static_cast<double>(n);
    long it = 0;
    for (;; ++it) {
        int j = 0;
        g.maxCoeff(&j);
        int k = -1;
        double gk = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
            if (u[i] > 0.0 && g[i] < gk) { gk = g[i]; k = i; }
        const double gj = g[j];
        if (gj <= nn * (1.0 + opt.eps) && gk >= nn * (1.0 - opt.eps)) break;
        if (it >= opt.max_iterations) fail(ErrorKind::IterationLimit, "mvee did not converge");

        int idx;
        double tau;
        if (gj - nn >= nn - gk) {
            idx = j;
            tau = (gj - nn) / (nn * (gj - 1.0));
        } else {
            idx = k;
            const double floor = -u[k] / (1.0 - u[k]);
            tau = gk > 1.0 ? std::max((gk - nn) / (nn * (gk - 1.0)), floor) : floor;
        }
        // X <- (1 - tau) X + tau p p'; rank-one updates of X^{-1} and g.
        const Vector p = P.col(idx);
        const Vector w = Xinv * p;
        const double gi = g[idx];
        const double denom = 1.0 - tau + tau * gi;
        const Vector proj = P.transpose() * w;
        Xinv = (Xinv - (tau / denom) * w * w.transpose()) / (1.0 - tau);
        g = (g - (tau / denom) * proj.cwiseAbs2()) / (1.0 - tau);
        u *= (1.0 - tau);
        u[idx] += tau;
        if (u[idx] < 1e-300) u[idx] = 0.0;
        logdet += (n - 1) * std::log1p(-tau) + std::log(denom);
        if ((it + 1) % 256 == 0) {
            refresh();
            logdet = std::log(X.determinant());
        }
        if (opt.record_objective) res.objective.push_back(logdet);
    }
    refresh();
    res.iterations = it;
    res.max_level = g.maxCoeff();
    res.weights = u;
    Matrix M = std::max(res.max_level, nn) * X;
    res.ellipsoid = {0.5 * (M + M.transpose())};
    return res;
}

/// Largest-volume ellipsoid inside the symmetric polytope K.
inline EllipsoidMatrix john_ellipsoid(const ConvexBody& K, double eps = 1e-7) {
    MveeOptions opt;
    opt.eps = eps;
    opt.record_objective = false;
    return ellipsoid_polar(mvee(polar_points(K), opt).ellipsoid);
}

/// Symmetric M^{-1/2}.
inline Matrix inverse_sqrt(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

/// T = M_john^{-1/2}: maps the John ellipsoid of K onto the unit ball.
inline Matrix john_transform(const ConvexBody& K, double eps = 1e-7) {
    return inverse_sqrt(john_ellipsoid(K, eps).M);
}

/// Image(T, K) with T = M_john^{-1/2}. Nested images are composed.
inline ConvexBody to_john_position(const ConvexBody& K, double eps = 1e-7) {
    const Matrix T = john_transform(K, eps);
    if (const auto* img = K.as<std::shared_ptr<const ImageNode>>())
        return linear_image(T * (*img)->T, (*img)->inner);
    return linear_image(T, K);
}

// ---------------------------------------------------------------------------
// Contacts

/// Contact directions of a John-positioned body (one per ± pair) with
/// nonnegative weights c_i such that sum c_i u_i u_i' approximates I.
/// A weight is the mass of the pair, so the cube carries 1 on each ±e_i.
struct ContactData {
    Matrix directions; // n x k
    Vector weights;
    double residual = 0.0; // || sum c_i u_i u_i' - I ||_F
};

inline double isotropy_residual(const Matrix& U, const Vector& c) {
    const int n = static_cast<int>(U.rows());
    Matrix S = U * c.asDiagonal() * U.transpose();
    return (S - Matrix::Identity(n, n)).norm();
}

/// min ||sum c_i u_i u_i' - I||_F over c >= 0. Accelerated projected
/// gradient, then an exact least-squares polish on the final support.
inline Vector isotropic_weights(const Matrix& U, int max_iterations = 20000) {
    const int k = static_cast<int>(U.cols());
    const Matrix inner = U.transpose() * U;
    const Matrix G = inner.cwiseAbs2();
    const Vector b = Vector::Ones(k); // u_i' I u_i
    const double L = Eigen::SelfAdjointEigenSolver<Matrix>(G, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    Vector c = Vector::Zero(k), y = c, prev = c;
    double t = 1.0;
    for (int it = 0; it < max_iterations; ++it) {
        const Vector grad = G * y - b;
        c = (y - grad / L).cwiseMax(0.0);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = c + ((t - 1.0) / t_next) * (c - prev);
        const double step = (c - prev).norm();
        prev = c;
        t = t_next;
        if (step <= 1e-15 * (1.0 + c.norm()) && it > 10) break;
    }
    std::vector<int> support;
    for (int i = 0; i < k; ++i)
        if (c[i] > 1e-12) support.push_back(i);
    if (!support.empty()) {
        const int s = static_cast<int>(support.size());
        Matrix Gs(s, s);
        for (int a = 0; a < s; ++a)
            for (int bb = 0; bb < s; ++bb) Gs(a, bb) = G(support[a], support[bb]);
        const Vector cs = Gs.completeOrthogonalDecomposition().solve(Vector::Ones(s));
        if (cs.minCoeff() >= 0.0) {
            Vector polished = Vector::Zero(k);
            for (int a = 0; a < s; ++a) polished[support[a]] = cs[a];
            if (isotropy_residual(U, polished) <= isotropy_residual(U, c)) c = polished;
        }
    }
    return c;
}

/// Contacts of K_john with the unit sphere: the facets whose distance from
/// the origin is at most 1 + tol, taken from the polar point set.
inline ContactData contact_points(const ConvexBody& K_john, double tol = 1e-5) {
    const Matrix P = polar_points(K_john);
    const int n = K_john.dim();
    std::vector<int> picked;
    for (int i = 0; i < P.cols(); ++i) {
        const double d = 1.0 / P.col(i).norm();
        if (d <= 1.0 + tol) picked.push_back(i);
    }
    if (picked.empty()) fail(ErrorKind::NoContacts, "no contact points within tolerance");
    ContactData out;
    out.directions.resize(n, static_cast<int>(picked.size()));
    for (int j = 0; j < out.directions.cols(); ++j) out.directions.col(j) = P.col(picked[j]).normalized();
    out.weights = isotropic_weights(out.directions);
    out.residual = isotropy_residual(out.directions, out.weights);
    return out;
}

/// Z_inf^* = {x : |<x, u_i>| <= 1 for all contact directions u_i}.
inline ConvexBody z_infinity_polar(const ContactData& contacts) {
    if (numeric_rank(contacts.directions) < contacts.directions.rows())
        fail(ErrorKind::DegenerateSpan, "contact directions do not span the space");
    return make_hpolytope(contacts.directions.transpose(), Vector::Ones(contacts.directions.cols()));
}

/// As above, also checking K_john ⊆ Z_inf^* on sampled directions.
inline ConvexBody z_infinity_polar(const ContactData& contacts, const ConvexBody& K_john, int samples = 1000,
                                   std::uint64_t seed = 0) {
    ConvexBody Z = z_infinity_polar(contacts);
    Engine eng = make_engine(seed);
    for (int s = 0; s < samples; ++s) {
        const Direction u = random_direction(K_john.dim(), eng);
        if (radial_unit(K_john, u) > radial_unit(Z, u) * (1.0 + 1e-7))
            fail(ErrorKind::NotInJohnPosition, "body is not contained in the contact slab body");
    }
    return Z;
}

// ---------------------------------------------------------------------------
// Position check

struct JohnPositionReport {
    double inradius = 0.0;
    double min_sampled_radial = 0.0;
    double isotropy_residual = std::numeric_limits<double>::infinity();
    int contacts = 0;
    bool ok = false;
};

struct JohnCheckOptions {
    double inradius_low = 1.0 - 1e-5;
    double inradius_high = 1.0 + 1e-4;
    double radial_floor = 1.0 - 1e-5;
    double contact_tol = 1e-4;
    double isotropy_tol = 1e-3;
    int samples = 1000;
    std::uint64_t seed = 0x6a6f686e;
};

/// Inscribed unit ball touching the boundary, no sampled direction closer
/// than the floor, and contacts carrying an isotropic measure.
inline JohnPositionReport john_position_report(const ConvexBody& K, const JohnCheckOptions& opt = {}) {
    JohnPositionReport r;
    r.inradius = inradius(K);
    Engine eng = make_engine(opt.seed);
    r.min_sampled_radial = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opt.samples; ++s)
        r.min_sampled_radial = std::min(r.min_sampled_radial, radial_unit(K, random_direction(K.dim(), eng)));
    try {
        const ContactData c = contact_points(K, opt.contact_tol);
        r.contacts = static_cast<int>(c.directions.cols());
        r.isotropy_residual = c.residual;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoContacts) throw;
    }
    r.ok = r.inradius >= opt.inradius_low && r.inradius <= opt.inradius_high &&
           r.min_sampled_radial >= opt.radial_floor && r.isotropy_residual <= opt.isotropy_tol;
    return r;
}

inline void require_john_position(const ConvexBody& K, const JohnCheckOptions& opt = {}) {
    const auto r = john_position_report(K, opt);
    if (!r.ok)
        fail(ErrorKind::NotInJohnPosition,
             "body is not in John position (inradius " + std::to_string(r.inradius) + ", min radial " +
                 std::to_string(r.min_sampled_radial) + ", isotropy residual " + std::to_string(r.isotropy_residual) +
                 ")");
}

inline nlohmann::json ellipsoid_to_json(const EllipsoidMatrix& E) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < E.M.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < E.M.cols(); ++c) row.push_back(E.M(r, c));
        rows.push_back(std::move(row));
    }
    return {{"dim", E.dim()}, {"type", "ellipsoid"}, {"matrix", rows}};
}

inline nlohmann::json contacts_to_json(const ContactData& c) {
    nlohmann::json dirs = nlohmann::json::array();
    for (int j = 0; j < c.directions.cols(); ++j) {
        nlohmann::json d = nlohmann::json::array();
        for (int i = 0; i < c.directions.rows(); ++i) d.push_back(c.directions(i, j));
        dirs.push_back(std::move(d));
    }
    nlohmann::json w = nlohmann::json::array();
    for (int i = 0; i < c.weights.size(); ++i) w.push_back(c.weights[i]);
    return {{"directions", dirs}, {"weights", w}, {"residual", c.residual}};
}

} // namespace dualvol

#endif
