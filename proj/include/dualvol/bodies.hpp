#ifndef DUALVOL_BODIES_HPP
#define DUALVOL_BODIES_HPP

// Origin-symmetric convex bodies: H- and V-polytopes, l_p balls, ellipsoids,
// Minkowski sums and linear images. Bodies are immutable value handles; every
// evaluation below is a pure function and safe to call from many threads.
//
// Symmetry is structural. Polytopes store one representative per ± pair and
// every evaluation mirrors it, so radial(K,u) == radial(K,-u) holds exactly.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "dualvol/errors.hpp"
#include "dualvol/lp.hpp"
#include "dualvol/rng.hpp"

namespace dualvol {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDegenerateDirectionTol = 1e-14;
inline constexpr double kSingularConditionLimit = 1e12;

/// A unit vector. Construction checks the norm; use normalize() for raw input.
class Direction {
public:
    explicit Direction(Vector v) : v_(std::move(v)) {
        if (std::abs(v_.norm() - 1.0) > 1e-12)
            fail(ErrorKind::MalformedBody, "direction is not a unit vector");
    }
    static Direction normalize(const Vector& v) {
        const double nrm = v.norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            fail(ErrorKind::MalformedBody, "cannot normalize a zero or non-finite vector");
        return Direction(v / nrm, 0);
    }
    const Vector& vec() const { return v_; }
    int dim() const { return static_cast<int>(v_.size()); }
    Direction operator-() const { return Direction(-v_, 0); }

private:
    Direction(Vector v, int) : v_(std::move(v)) {}
    Vector v_;
};

class ConvexBody;

struct HPolytope {
    Matrix normals;       // m x n, one row per ± facet pair: |<a_i, x>| <= b_i
    Vector offsets;       // m, all positive
    Matrix polar_points;  // n x m, columns a_i / b_i
};

struct VPolytope {
    Matrix points;        // n x k, one column per ± pair (or every point when !symmetric)
    bool symmetric = true;
};

struct LpBall {
    int dim = 0;
    double p = 2.0; // in [1, inf]
    double r = 1.0;
};

struct Ellipsoid {
    Matrix M;     // {x : x' M^{-1} x <= 1}
    Matrix M_inv;
};

struct OwnedLeaf {
    Matrix points;
    bool symmetric = true;
};

struct SumNode;
struct ImageNode;

using BodyNode = std::variant<HPolytope, VPolytope, LpBall, Ellipsoid,
                              std::shared_ptr<const SumNode>, std::shared_ptr<const ImageNode>>;

class ConvexBody {
public:
    ConvexBody() = default;
    ConvexBody(BodyNode node, int dim) : node_(std::make_shared<const BodyNode>(std::move(node))), dim_(dim) {}

    int dim() const { return dim_; }
    const BodyNode& node() const { return *node_; }
    bool valid() const { return static_cast<bool>(node_); }

    template <class T>
    const T* as() const { return std::get_if<T>(node_.get()); }

private:
    std::shared_ptr<const BodyNode> node_;
    int dim_ = 0;
};

struct SumNode {
    ConvexBody left, right;
    // Point-set form of the sum when every operand reduces to V-polytopes.
    std::optional<std::vector<OwnedLeaf>> leaves;
};

struct ImageNode {
    Matrix T, T_inv;
    ConvexBody inner;
};

// ---------------------------------------------------------------------------
// Construction

inline int numeric_rank(const Matrix& A) {
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    qr.setThreshold(1e-10);
    return static_cast<int>(qr.rank());
}

inline ConvexBody make_hpolytope(Matrix normals, Vector offsets) {
    const int n = static_cast<int>(normals.cols());
    if (n < 1 || normals.rows() != offsets.size() || normals.rows() == 0)
        fail(ErrorKind::MalformedBody, "hpolytope normals/offsets size mismatch");
    if (!normals.allFinite() || !offsets.allFinite())
        fail(ErrorKind::MalformedBody, "hpolytope has non-finite entries");
    for (int i = 0; i < offsets.size(); ++i)
        if (!(offsets[i] > 0.0)) fail(ErrorKind::MalformedBody, "hpolytope offsets must be positive");
    if (numeric_rank(normals) < n)
        fail(ErrorKind::MalformedBody, "hpolytope normals do not span R^n (body is unbounded)");
    HPolytope h;
    h.polar_points = (normals.array().colwise() / offsets.array()).matrix().transpose();
    h.normals = std::move(normals);
    h.offsets = std::move(offsets);
    return ConvexBody(std::move(h), n);
}

inline ConvexBody make_vpolytope(Matrix points, bool symmetric = true) {
    const int n = static_cast<int>(points.rows());
    if (n < 1 || points.cols() == 0) fail(ErrorKind::MalformedBody, "vpolytope needs points");
    if (!points.allFinite()) fail(ErrorKind::MalformedBody, "vpolytope has non-finite entries");
    if (symmetric) {
        if (numeric_rank(points) < n)
            fail(ErrorKind::MalformedBody, "vpolytope points do not span R^n");
    } else {
        if (points.cols() < n + 1)
            fail(ErrorKind::MalformedBody, "non-symmetric vpolytope needs at least n+1 points");
        Matrix diffs = points.rightCols(points.cols() - 1).colwise() - points.col(0);
        if (numeric_rank(diffs) < n)
            fail(ErrorKind::MalformedBody, "vpolytope points do not affinely span R^n");
        for (int i = 0; i < n; ++i) {
            for (double s : {1.0, -1.0}) {
                Vector e = Vector::Zero(n);
                e[i] = s;
                if (!(lp::radial_vpolytope(points, e, false) > 1e-12))
                    fail(ErrorKind::MalformedBody, "origin is not interior to the vpolytope");
            }
        }
    }
    return ConvexBody(VPolytope{std::move(points), symmetric}, n);
}

inline ConvexBody make_lpball(int n, double p, double r = 1.0) {
    if (n < 1) fail(ErrorKind::MalformedBody, "lpball dimension must be positive");
    if (!(p >= 1.0)) fail(ErrorKind::MalformedBody, "lpball exponent must lie in [1, inf]");
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::MalformedBody, "lpball radius must be positive");
    return ConvexBody(LpBall{n, p, r}, n);
}

inline ConvexBody make_ellipsoid(Matrix M) {
    const int n = static_cast<int>(M.rows());
    if (n < 1 || M.cols() != n) fail(ErrorKind::MalformedBody, "ellipsoid matrix must be square");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
        fail(ErrorKind::MalformedBody, "ellipsoid matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    if (!(es.eigenvalues().minCoeff() > 0.0))
        fail(ErrorKind::MalformedBody, "ellipsoid matrix must be positive definite");
    Matrix Minv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    Minv = 0.5 * (Minv + Minv.transpose());
    return ConvexBody(Ellipsoid{std::move(M), std::move(Minv)}, n);
}

inline ConvexBody euclidean_ball(int n, double r = 1.0) { return make_lpball(n, 2.0, r); }

/// B_inf^n scaled by r, as an H-polytope.
inline ConvexBody cube(int n, double r = 1.0) {
    return make_hpolytope(Matrix::Identity(n, n), Vector::Constant(n, r));
}

/// r * B_1^n, as a V-polytope with vertices ±r e_i.
inline ConvexBody cross_polytope(int n, double r = 1.0) {
    return make_vpolytope(r * Matrix::Identity(n, n));
}

/// Sign vectors with leading +1: one representative per ± pair of cube vertices.
inline Matrix half_sign_vectors(int n) {
    const int count = 1 << (n - 1);
    Matrix S(n, count);
    for (int c = 0; c < count; ++c) {
        S(0, c) = 1.0;
        for (int i = 1; i < n; ++i) S(i, c) = ((c >> (i - 1)) & 1) ? -1.0 : 1.0;
    }
    return S;
}

inline Matrix hpolytope_vertices(const Matrix& normals, const Vector& offsets,
                                 std::uint64_t max_systems = 20'000'000);

namespace detail {

inline std::optional<std::vector<OwnedLeaf>> point_leaves(const ConvexBody& K);

// Vertex enumeration budget when an H-polytope is used as a sum operand.
inline constexpr std::uint64_t kSumVertexBudget = 200'000;

struct LeafVisitor {
    int dim;
    std::optional<std::vector<OwnedLeaf>> operator()(const HPolytope& h) const {
        try {
            return std::vector<OwnedLeaf>{{hpolytope_vertices(h.normals, h.offsets, kSumVertexBudget), true}};
        } catch (const Error&) {
            return std::nullopt;
        }
    }
    std::optional<std::vector<OwnedLeaf>> operator()(const VPolytope& v) const {
        return std::vector<OwnedLeaf>{{v.points, v.symmetric}};
    }
    std::optional<std::vector<OwnedLeaf>> operator()(const LpBall& b) const {
        if (b.dim > 6) return std::nullopt;
        if (b.p == 1.0) return std::vector<OwnedLeaf>{{b.r * Matrix::Identity(b.dim, b.dim), true}};
        if (std::isinf(b.p)) return std::vector<OwnedLeaf>{{b.r * half_sign_vectors(b.dim), true}};
        return std::nullopt;
    }
    std::optional<std::vector<OwnedLeaf>> operator()(const Ellipsoid&) const { return std::nullopt; }
    std::optional<std::vector<OwnedLeaf>> operator()(const std::shared_ptr<const SumNode>& s) const {
        return s->leaves;
    }
    std::optional<std::vector<OwnedLeaf>> operator()(const std::shared_ptr<const ImageNode>& img) const {
        auto inner = point_leaves(img->inner);
        if (!inner) return std::nullopt;
        for (auto& leaf : *inner) leaf.points = img->T * leaf.points;
        return inner;
    }
};

inline std::optional<std::vector<OwnedLeaf>> point_leaves(const ConvexBody& K) {
    return std::visit(LeafVisitor{K.dim()}, K.node());
}

} // namespace detail

/// Point-set (V-polytope) form of K when one exists: V-polytopes, small
/// H-polytopes (by vertex enumeration), l_1/l_inf balls for n <= 6, and
/// sums/images of those.
inline std::optional<std::vector<OwnedLeaf>> point_leaves(const ConvexBody& K) {
    return detail::point_leaves(K);
}

inline ConvexBody minkowski_sum(const ConvexBody& K, const ConvexBody& L) {
    if (K.dim() != L.dim()) fail(ErrorKind::MalformedBody, "minkowski_sum dimension mismatch");
    auto node = std::make_shared<SumNode>();
    node->left = K;
    node->right = L;
    auto lk = point_leaves(K);
    auto ll = point_leaves(L);
    if (lk && ll) {
        lk->insert(lk->end(), ll->begin(), ll->end());
        node->leaves = std::move(lk);
    }
    return ConvexBody(std::shared_ptr<const SumNode>(std::move(node)), K.dim());
}

inline double condition_number(const Matrix& T) {
    Eigen::JacobiSVD<Matrix> svd(T);
    const auto& s = svd.singularValues();
    const double smin = s[s.size() - 1];
    return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

inline ConvexBody linear_image(const Matrix& T, const ConvexBody& K) {
    if (T.rows() != K.dim() || T.cols() != K.dim())
        fail(ErrorKind::MalformedBody, "linear_image transform has wrong shape");
    if (!T.allFinite() || condition_number(T) > kSingularConditionLimit)
        fail(ErrorKind::SingularTransform, "transform is numerically singular");
    auto node = std::make_shared<ImageNode>();
    node->T = T;
    node->T_inv = T.inverse();
    node->inner = K;
    return ConvexBody(std::shared_ptr<const ImageNode>(std::move(node)), K.dim());
}

/// t*K. V-polytopes and l_p balls are rescaled in place; other bodies become images.
inline ConvexBody scale(const ConvexBody& K, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::SingularTransform, "scale factor must be positive");
    if (const auto* v = K.as<VPolytope>()) return make_vpolytope(t * v->points, v->symmetric);
    if (const auto* b = K.as<LpBall>()) return make_lpball(b->dim, b->p, t * b->r);
    if (const auto* h = K.as<HPolytope>()) return make_hpolytope(h->normals, t * h->offsets);
    return linear_image(t * Matrix::Identity(K.dim(), K.dim()), K);
}

// ---------------------------------------------------------------------------
// Evaluation

inline double lp_norm(const Vector& x, double p) {
    if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
    if (p == 1.0) return x.cwiseAbs().sum();
    if (p == 2.0) return x.norm();
    const double m = x.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    return m * std::pow((x.cwiseAbs() / m).array().pow(p).sum(), 1.0 / p);
}

inline double dual_exponent(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

inline double gauge(const ConvexBody& K, const Vector& x);
inline double radial_unit(const ConvexBody& K, const Direction& u);

namespace detail {

inline double radial_from_leaves(const std::vector<OwnedLeaf>& leaves, const Vector& u) {
    std::vector<lp::PointLeaf> refs;
    refs.reserve(leaves.size());
    for (const auto& l : leaves) refs.push_back({&l.points, l.symmetric});
    return lp::radial_leaves(refs, u);
}

struct GaugeVisitor {
    const Vector& x;
    double operator()(const HPolytope& h) const {
        const double g = (h.normals * x).cwiseAbs().cwiseQuotient(h.offsets).maxCoeff();
        if (!(g > kDegenerateDirectionTol * x.norm()))
            fail(ErrorKind::MalformedBody, "degenerate direction: no facet normal has positive inner product");
        return g;
    }
    double operator()(const VPolytope& v) const {
        const double nrm = x.norm();
        return nrm / lp::radial_vpolytope(v.points, x / nrm, v.symmetric);
    }
    double operator()(const LpBall& b) const { return lp_norm(x, b.p) / b.r; }
    double operator()(const Ellipsoid& e) const { return std::sqrt(std::max(0.0, x.dot(e.M_inv * x))); }
    double operator()(const std::shared_ptr<const SumNode>& s) const {
        if (!s->leaves)
            fail(ErrorKind::UnsupportedComposition,
                 "radial/gauge of a Minkowski sum needs operands reducible to V-polytopes");
        const double nrm = x.norm();
        return nrm / radial_from_leaves(*s->leaves, x / nrm);
    }
    double operator()(const std::shared_ptr<const ImageNode>& img) const {
        return gauge(img->inner, img->T_inv * x);
    }
};

struct SupportVisitor {
    const Vector& u;
    double operator()(const HPolytope& h) const {
        // h_K = gauge of the polar body conv(±a_i/b_i).
        const double nrm = u.norm();
        if (nrm == 0.0) return 0.0;
        return nrm / lp::radial_vpolytope(h.polar_points, u / nrm, true);
    }
    double operator()(const VPolytope& v) const {
        const Vector d = v.points.transpose() * u;
        return v.symmetric ? d.cwiseAbs().maxCoeff() : d.maxCoeff();
    }
    double operator()(const LpBall& b) const { return b.r * lp_norm(u, dual_exponent(b.p)); }
    double operator()(const Ellipsoid& e) const { return std::sqrt(std::max(0.0, u.dot(e.M * u))); }
    double operator()(const std::shared_ptr<const SumNode>& s) const;
    double operator()(const std::shared_ptr<const ImageNode>& img) const;
};

} // namespace detail

/// Minkowski functional ||x||_K = inf{t > 0 : x in tK}; zero at the origin.
inline double gauge(const ConvexBody& K, const Vector& x) {
    if (x.size() != K.dim()) fail(ErrorKind::MalformedBody, "gauge argument has wrong dimension");
    if (x.isZero(0.0)) return 0.0;
    return std::visit(detail::GaugeVisitor{x}, K.node());
}

/// rho_K(u) = max{t > 0 : t u in K} for a unit direction u.
inline double radial_unit(const ConvexBody& K, const Direction& u) {
    if (u.dim() != K.dim()) fail(ErrorKind::MalformedBody, "direction has wrong dimension");
    if (const auto* v = K.as<VPolytope>()) return lp::radial_vpolytope(v->points, u.vec(), v->symmetric);
    if (const auto* s = K.as<std::shared_ptr<const SumNode>>()) {
        if (!(*s)->leaves)
            fail(ErrorKind::UnsupportedComposition,
                 "radial of a Minkowski sum needs operands reducible to V-polytopes");
        return detail::radial_from_leaves(*(*s)->leaves, u.vec());
    }
    return 1.0 / gauge(K, u.vec());
}

/// Degree -1 homogeneous extension of the radial function; +inf at the origin.
inline double radial_homog(const ConvexBody& K, const Vector& x) {
    const double g = gauge(K, x);
    return g == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / g;
}

/// h_K(u) = max_{x in K} <x, u>. Defined for any vector u, homogeneous of degree 1.
inline double support(const ConvexBody& K, const Vector& u) {
    if (u.size() != K.dim()) fail(ErrorKind::MalformedBody, "support argument has wrong dimension");
    return std::visit(detail::SupportVisitor{u}, K.node());
}

inline double support(const ConvexBody& K, const Direction& u) { return support(K, u.vec()); }

inline double detail::SupportVisitor::operator()(const std::shared_ptr<const SumNode>& s) const {
    return support(s->left, u) + support(s->right, u);
}

inline double detail::SupportVisitor::operator()(const std::shared_ptr<const ImageNode>& img) const {
    return support(img->inner, Vector(img->T.transpose() * u));
}

// ---------------------------------------------------------------------------
// Polarity and vertex enumeration

/// Vertices of the symmetric H-polytope {y : |<a_i, y>| <= b_i}, one column
/// per ± pair. Brute force over n-subsets of facet pairs and sign patterns;
/// practical for the small n and facet counts used here.
inline Matrix hpolytope_vertices(const Matrix& normals, const Vector& offsets,
                                 std::uint64_t max_systems) {
    const int m = static_cast<int>(normals.rows());
    const int n = static_cast<int>(normals.cols());
    if (m < n) fail(ErrorKind::DegenerateSpan, "fewer facet pairs than dimensions");
    double combos = 1.0;
    for (int i = 0; i < n; ++i) combos = combos * (m - i) / (i + 1);
    if (combos * std::ldexp(1.0, n - 1) > static_cast<double>(max_systems))
        fail(ErrorKind::UnsupportedComposition, "vertex enumeration exceeds its budget");

    const Matrix signs = half_sign_vectors(n);
    const double scale = offsets.cwiseAbs().maxCoeff();
    std::vector<Vector> found;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Matrix As(n, n);
    Vector bs(n);
    while (true) {
        for (int r = 0; r < n; ++r) {
            As.row(r) = normals.row(idx[r]);
            bs[r] = offsets[idx[r]];
        }
        Eigen::FullPivLU<Matrix> lu(As);
        if (lu.rank() == n && std::abs(lu.determinant()) > 1e-12 * As.rowwise().norm().prod()) {
            for (int c = 0; c < signs.cols(); ++c) {
                const Vector y = lu.solve(Vector(signs.col(c).cwiseProduct(bs)));
                const Vector slack = offsets - (normals * y).cwiseAbs();
                if (slack.minCoeff() < -1e-9 * scale) continue;
                Vector canon = y;
                for (int i = 0; i < n; ++i) {
                    if (std::abs(canon[i]) > 1e-12 * (1.0 + canon.norm())) {
                        if (canon[i] < 0) canon = -canon;
                        break;
                    }
                }
                bool dup = false;
                for (const auto& f : found)
                    if ((f - canon).norm() <= 1e-9 * (1.0 + f.norm())) { dup = true; break; }
                if (!dup) found.push_back(std::move(canon));
            }
        }
        int k = n - 1;
        while (k >= 0 && idx[k] == m - n + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (found.empty()) fail(ErrorKind::DegenerateSpan, "no vertices found (unbounded or degenerate polytope)");
    Matrix V(n, static_cast<int>(found.size()));
    for (int j = 0; j < V.cols(); ++j) V.col(j) = found[j];
    return V;
}

/// Points whose symmetric convex hull is the polar body K° (one per ± pair).
/// H-polytope rows may contribute redundant (interior) points.
inline Matrix polar_points(const ConvexBody& K) {
    if (const auto* h = K.as<HPolytope>()) return h->polar_points;
    if (const auto* v = K.as<VPolytope>()) {
        if (!v->symmetric) fail(ErrorKind::UnsupportedComposition, "polar of a non-symmetric polytope");
        return hpolytope_vertices(v->points.transpose(), Vector::Ones(v->points.cols()));
    }
    if (const auto* b = K.as<LpBall>()) {
        if (b->p == 1.0) return (1.0 / b->r) * half_sign_vectors(b->dim);
        if (std::isinf(b->p)) return (1.0 / b->r) * Matrix::Identity(b->dim, b->dim);
    }
    if (const auto* img = K.as<std::shared_ptr<const ImageNode>>())
        return (*img)->T_inv.transpose() * polar_points((*img)->inner);
    fail(ErrorKind::UnsupportedComposition, "polar point set is only available for polytopes");
}

/// Polar body: V-polytope{p_i} -> H-polytope{rows p_i, offsets 1};
/// H-polytope{a_i, b_i} -> V-polytope{a_i / b_i}.
inline ConvexBody polar(const ConvexBody& K) {
    if (const auto* h = K.as<HPolytope>()) return make_vpolytope(h->polar_points);
    if (const auto* v = K.as<VPolytope>()) {
        if (!v->symmetric) fail(ErrorKind::UnsupportedComposition, "polar of a non-symmetric polytope");
        return make_hpolytope(v->points.transpose(), Vector::Ones(v->points.cols()));
    }
    if (const auto* img = K.as<std::shared_ptr<const ImageNode>>())
        return linear_image((*img)->T_inv.transpose(), polar((*img)->inner));
    fail(ErrorKind::UnsupportedComposition, "polar is only defined here for H/V-polytopes");
}

/// Radius of the largest centered Euclidean ball inside a polytope body.
inline double inradius(const ConvexBody& K) {
    const Matrix P = polar_points(K);
    return 1.0 / P.colwise().norm().maxCoeff();
}

// ---------------------------------------------------------------------------
// Random bodies

enum class BodyFamily { VPolytope, HPolytope };

struct GeneratorSpec {
    int dim = 3;
    BodyFamily family = BodyFamily::VPolytope;
    int k = 20;            // generator points (or facet pairs)
    double r_min = 0.05;   // required inscribed centered ball radius
    bool symmetric = true; // false only for V-polytopes, for non-symmetric probing
    int max_attempts = 100;
};

inline Vector gaussian_vector(int n, Engine& eng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(eng);
    return v;
}

inline Direction random_direction(int n, Engine& eng) {
    while (true) {
        Vector v = gaussian_vector(n, eng);
        if (v.norm() > 1e-300) return Direction::normalize(v);
    }
}

namespace detail {

// Sampled lower bound check for non-symmetric bodies: h_K(v) >= r on many directions.
inline bool sampled_contains_ball(const ConvexBody& K, double r, Engine& eng) {
    for (int i = 0; i < 4000; ++i)
        if (support(K, random_direction(K.dim(), eng).vec()) < r) return false;
    return true;
}

} // namespace detail

/// Deterministic function of (spec, seed). Symmetric V-polytopes: k Gaussian
/// generator points mirrored through the origin. H-polytopes: k Gaussian unit
/// normals with offsets uniform in [0.5, 1.5]. Non-symmetric V-polytopes are
/// centered at the vertex centroid. Resamples until the inscribed-ball floor holds.
inline ConvexBody random_body(const GeneratorSpec& spec, std::uint64_t seed) {
    const int n = spec.dim;
    if (n < 2) fail(ErrorKind::GenerationFailed, "dimension must be at least 2");
    if (spec.k < n + 1) fail(ErrorKind::GenerationFailed, "k must be at least n+1");
    if (!spec.symmetric && spec.family != BodyFamily::VPolytope)
        fail(ErrorKind::GenerationFailed, "non-symmetric generation is only available for V-polytopes");
    Engine eng = make_engine(seed);
    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
        try {
            if (spec.family == BodyFamily::HPolytope) {
                Matrix A(spec.k, n);
                Vector b(spec.k);
                std::uniform_real_distribution<double> off(0.5, 1.5);
                for (int i = 0; i < spec.k; ++i) {
                    A.row(i) = random_direction(n, eng).vec().transpose();
                    b[i] = off(eng);
                }
                ConvexBody K = make_hpolytope(std::move(A), std::move(b));
                if (inradius(K) >= spec.r_min) return K;
                continue;
            }
            Matrix P(n, spec.k);
            for (int j = 0; j < spec.k; ++j) P.col(j) = gaussian_vector(n, eng);
            if (spec.symmetric) {
                ConvexBody K = make_vpolytope(std::move(P));
                if (inradius(K) >= spec.r_min) return K;
            } else {
                const Vector centroid = P.rowwise().mean();
                P.colwise() -= centroid;
                ConvexBody K = make_vpolytope(std::move(P), false);
                if (detail::sampled_contains_ball(K, spec.r_min, eng)) return K;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::MalformedBody && e.kind() != ErrorKind::DegenerateSpan) throw;
        }
    }
    fail(ErrorKind::GenerationFailed, "inscribed-ball floor not met after " +
                                          std::to_string(spec.max_attempts) + " attempts");
}

/// Haar-random rotation (QR of a Gaussian matrix with sign fix), det = +1.
inline Matrix random_rotation(int n, Engine& eng) {
    Matrix G(n, n);
    for (int j = 0; j < n; ++j) G.col(j) = gaussian_vector(n, eng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
        if (R(i, i) < 0) Q.col(i) = -Q.col(i);
    if (Q.determinant() < 0) Q.col(0) = -Q.col(0);
    return Q;
}

} // namespace dualvol

#endif
