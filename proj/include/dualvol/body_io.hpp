#ifndef DUALVOL_BODY_IO_HPP
#define DUALVOL_BODY_IO_HPP

// JSON body files:
//   {"dim": n, "type": "hpolytope", "normals": [[...], ...], "offsets": [...]}
//   {"dim": n, "type": "vpolytope", "points": [[...], ...], "symmetric": true}
//   {"dim": n, "type": "lpball", "p": 1 | 2.5 | "inf", "r": 1}
//   {"dim": n, "type": "ellipsoid", "matrix": [[...], ...]}
//   {"dim": n, "type": "sum", "left": {...}, "right": {...}}
//   {"dim": n, "type": "image", "transform": [[...], ...], "inner": {...}}
// V-polytope points list one representative per ± pair. Doubles are written
// in shortest round-trip form (at most 17 significant digits), so
// save -> load is lossless.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dualvol/bodies.hpp"

namespace dualvol {

using json = nlohmann::json;

namespace detail {

inline json matrix_rows(const Matrix& M) {
    json rows = json::array();
    for (int r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_list(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        fail(ErrorKind::ParseError, std::string("missing field '") + key + "'");
    return j.at(key);
}

inline double as_number(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "Infinity" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    fail(ErrorKind::ParseError, std::string("field '") + what + "' must be a number");
}

inline Matrix parse_rows(const json& j, const char* what, int expected_cols) {
    if (!j.is_array() || j.empty()) fail(ErrorKind::ParseError, std::string("'") + what + "' must be a non-empty array");
    Matrix M(static_cast<int>(j.size()), expected_cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != expected_cols)
            fail(ErrorKind::ParseError, std::string("'") + what + "' rows must have length dim");
        for (int c = 0; c < expected_cols; ++c) M(static_cast<int>(r), c) = as_number(row[c], what);
    }
    return M;
}

} // namespace detail

inline json body_to_json(const ConvexBody& K) {
    json j;
    j["dim"] = K.dim();
    if (const auto* h = K.as<HPolytope>()) {
        j["type"] = "hpolytope";
        j["normals"] = detail::matrix_rows(h->normals);
        j["offsets"] = detail::vector_list(h->offsets);
    } else if (const auto* v = K.as<VPolytope>()) {
        j["type"] = "vpolytope";
        j["points"] = detail::matrix_rows(v->points.transpose());
        j["symmetric"] = v->symmetric;
    } else if (const auto* b = K.as<LpBall>()) {
        j["type"] = "lpball";
        if (std::isinf(b->p)) j["p"] = "inf";
        else j["p"] = b->p;
        j["r"] = b->r;
    } else if (const auto* e = K.as<Ellipsoid>()) {
        j["type"] = "ellipsoid";
        j["matrix"] = detail::matrix_rows(e->M);
    } else if (const auto* s = K.as<std::shared_ptr<const SumNode>>()) {
        j["type"] = "sum";
        j["left"] = body_to_json((*s)->left);
        j["right"] = body_to_json((*s)->right);
    } else if (const auto* img = K.as<std::shared_ptr<const ImageNode>>()) {
        j["type"] = "image";
        j["transform"] = detail::matrix_rows((*img)->T);
        j["inner"] = body_to_json((*img)->inner);
    }
    return j;
}

/// Parses a body; malformed JSON structure raises ParseError, geometric
/// problems (non-positive offsets, singular transforms...) their own kinds.
inline ConvexBody body_from_json(const json& j) {
    const json& jd = detail::require(j, "dim");
    if (!jd.is_number_integer() || jd.get<int>() < 1) fail(ErrorKind::ParseError, "'dim' must be a positive integer");
    const int n = jd.get<int>();
    const json& jt = detail::require(j, "type");
    if (!jt.is_string()) fail(ErrorKind::ParseError, "'type' must be a string");
    const std::string type = jt.get<std::string>();
    if (type == "hpolytope") {
        Matrix A = detail::parse_rows(detail::require(j, "normals"), "normals", n);
        const json& jo = detail::require(j, "offsets");
        if (!jo.is_array() || static_cast<int>(jo.size()) != A.rows())
            fail(ErrorKind::ParseError, "'offsets' must match the number of normals");
        Vector b(A.rows());
        for (int i = 0; i < b.size(); ++i) b[i] = detail::as_number(jo[i], "offsets");
        return make_hpolytope(std::move(A), std::move(b));
    }
    if (type == "vpolytope") {
        Matrix P = detail::parse_rows(detail::require(j, "points"), "points", n);
        const bool sym = j.value("symmetric", true);
        return make_vpolytope(P.transpose(), sym);
    }
    if (type == "lpball") {
        return make_lpball(n, detail::as_number(detail::require(j, "p"), "p"),
                           j.contains("r") ? detail::as_number(j.at("r"), "r") : 1.0);
    }
    if (type == "ellipsoid") return make_ellipsoid(detail::parse_rows(detail::require(j, "matrix"), "matrix", n));
    if (type == "sum") {
        ConvexBody L = body_from_json(detail::require(j, "left"));
        ConvexBody R = body_from_json(detail::require(j, "right"));
        if (L.dim() != n || R.dim() != n) fail(ErrorKind::ParseError, "sum operands have the wrong dimension");
        return minkowski_sum(L, R);
    }
    if (type == "image") {
        Matrix T = detail::parse_rows(detail::require(j, "transform"), "transform", n);
        if (T.rows() != n) fail(ErrorKind::ParseError, "'transform' must be dim x dim");
        ConvexBody inner = body_from_json(detail::require(j, "inner"));
        if (inner.dim() != n) fail(ErrorKind::ParseError, "image operand has the wrong dimension");
        return linear_image(T, inner);
    }
    fail(ErrorKind::ParseError, "unknown body type '" + type + "'");
}

inline ConvexBody load_body(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open body file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, path + ": " + e.what());
    }
    return body_from_json(j);
}

inline void save_body(const ConvexBody& K, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::ParseError, "cannot write body file " + path);
    out << body_to_json(K).dump(2) << '\n';
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Content hash of the canonical (compact, key-sorted) serialization.
inline std::string body_fingerprint(const ConvexBody& K) { return fnv1a_hex(body_to_json(K).dump()); }

} // namespace dualvol

#endif
