// dualvol: command-line front end.
//
// Exit codes: 0 success / inequality holds, 2 input error, 3 evaluation
// error, 4 violation candidate.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualvol/body_io.hpp"
#include "dualvol/functionals.hpp"
#include "dualvol/john.hpp"
#include "dualvol/search.hpp"
#include "dualvol/verify.hpp"

namespace fs = std::filesystem;
using namespace dualvol;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitEval = 3;
constexpr int kExitViolation = 4;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::vector<double> qs;
    std::string q_range;
    double step = 0.25;
    std::vector<std::string> formulations = {"sphere"};
    std::string scheme;
    int rule_size = 0;
    int samples = 200000;
    std::uint64_t seed = 42;
    bool auto_john = false;
    std::string out;
    std::string format = "csv";
    std::vector<double> lambdas = {0.5};
    std::vector<double> ts = {1.0};
};

ConvexBody read_body(const std::string& path) {
    try {
        return load_body(path);
    } catch (const Error& e) {
        throw InputError(std::string(to_string(e.kind())) + ": " + e.what());
    }
}

SphereRule make_rule(int n, const Options& o, int size_multiplier = 1) {
    const int m = o.rule_size * size_multiplier;
    if (o.scheme.empty()) return default_rule(n, o.seed, m);
    Scheme s;
    try {
        s = parse_scheme(o.scheme);
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    const int def = n == 2 ? 4096 : n == 3 ? 20000 : 100000;
    return sphere_rule(n, s, m > 0 ? m : def, o.seed);
}

/// Run manifest. Its hash covers everything except the wall time.
struct Manifest {
    json body;
    std::string hash;
};

Manifest make_manifest(const std::string& command, const json& config, const json& rule_meta) {
    Manifest m;
    m.body = {{"command", command}, {"config", config}, {"rule", rule_meta}, {"tool_version", kVersion}};
    m.hash = fnv1a_hex(m.body.dump());
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    m.body["wall_time_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    m.body["manifest_hash"] = m.hash;
    return m;
}

json options_json(const Options& o) {
    return {{"q", o.qs},          {"q_range", o.q_range}, {"step", o.step},     {"formulation", o.formulations},
            {"scheme", o.scheme}, {"rule_size", o.rule_size}, {"samples", o.samples}, {"seed", o.seed},
            {"auto_john", o.auto_john}, {"format", o.format}, {"lambda", o.lambdas}, {"t", o.ts}};
}

/// CSV table: a manifest comment line, a header, then rows at 17 significant digits.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;

    std::string csv(const std::string& manifest_hash) const {
        std::ostringstream os;
        os.precision(17);
        os << "# manifest=" << manifest_hash << '\n';
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << ',';
                if (r[i].is_string()) os << r[i].get<std::string>();
                else if (r[i].is_number()) os << r[i].get<double>();
                else if (r[i].is_boolean()) os << (r[i].get<bool>() ? "true" : "false");
            }
            os << '\n';
        }
        return os.str();
    }

    json as_json(const std::string& manifest_hash) const {
        json recs = json::array();
        for (const auto& r : rows) {
            json rec;
            for (std::size_t i = 0; i < header.size(); ++i) rec[header[i]] = r[i];
            recs.push_back(std::move(rec));
        }
        return {{"manifest", manifest_hash}, {"records", recs}};
    }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

void emit(const Options& o, const std::string& stem, const Table& t, const Manifest& m) {
    const std::string text = o.format == "json" ? t.as_json(m.hash).dump(2) + "\n" : t.csv(m.hash);
    std::cout << text;
    if (o.out.empty()) return;
    fs::create_directories(o.out);
    write_text(fs::path(o.out) / (stem + (o.format == "json" ? ".json" : ".csv")), text);
    write_text(fs::path(o.out) / "manifest.json", m.body.dump(2) + "\n");
}

void require_c_self_test() {
    const double err = c_constant_self_test();
    if (err > 1e-10) fail(ErrorKind::NonFiniteIntegrand, "c(n,q) self-test failed: relative error " + std::to_string(err));
}

// ---------------------------------------------------------------------------

int cmd_compute(const std::string& body_path, const Options& o) {
    const ConvexBody K = read_body(body_path);
    const int n = K.dim();
    if (o.qs.empty()) throw InputError("compute needs at least one --q");
    std::vector<Formulation> forms;
    for (const auto& f : o.formulations) {
        try {
            forms.push_back(parse_formulation(f));
        } catch (const Error& e) {
            throw InputError(e.what());
        }
    }
    require_c_self_test();
    const SphereRule rule = make_rule(n, o);
    const std::string hash = body_fingerprint(K);
    Table t{{"formulation", "q", "dual_volume", "normalized", "stderr", "value", "discretization_error",
             "truncation_bound", "body_hash"},
            {}};
    std::optional<std::vector<double>> rho;
    std::optional<std::vector<double>> srho, snorm;
    for (Formulation f : forms) {
        for (double q : o.qs) {
            DualVolumeResult r;
            if (f == Formulation::Sphere) {
                if (!rho) rho = radial_profile(K, rule);
                r = dual_querm(*rho, q, rule);
            } else {
                if (!srho) {
                    const GaussianSample s = gaussian_sample(n, o.samples, o.seed);
                    srho = sample_radials(K, s);
                    snorm.emplace(s.count());
                    for (int j = 0; j < s.count(); ++j) (*snorm)[j] = s.points.col(j).norm();
                }
                r = f == Formulation::Gaussian ? gaussian_dual_moment(*srho, n, q)
                                               : layer_cake_moment(*srho, *snorm, n, q);
            }
            const double normalized =
                f == Formulation::Sphere ? normalized_dual_querm(*rho, q, rule).value
                : q == 0.0               ? std::numeric_limits<double>::quiet_NaN()
                                         : std::pow(r.dual_volume / omega(n), 1.0 / q);
            t.rows.push_back({to_string(f), q, r.dual_volume, normalized, r.dual_volume_error, r.value,
                              r.discretization_error, r.truncation_bound, hash});
        }
    }
    json cfg = options_json(o);
    cfg["body"] = body_path;
    emit(o, "compute", t, make_manifest("compute", cfg, rule_meta(rule)));
    return kExitOk;
}

int cmd_check(const std::string& name, const std::vector<std::string>& bodies, const Options& o) {
    const bool pair = name == "bm" || name == "logconcave";
    if (!pair && name != "rvip" && name != "ss-tail") throw InputError("unknown check '" + name + "'");
    if (bodies.size() != (pair ? 2u : 1u))
        throw InputError(name + " needs " + (pair ? "two body files" : "one body file"));
    const ConvexBody K = read_body(bodies[0]);
    const int n = K.dim();
    std::vector<CheckReport> reports;
    json rule_info;
    if (name == "ss-tail") {
        reports = check_ss_tail(K, o.ts, gaussian_sample(n, o.samples, o.seed), o.auto_john);
        rule_info = {{"samples", o.samples}, {"seed", o.seed}};
    } else {
        if (o.qs.empty()) throw InputError(name + " needs at least one --q");
        const SphereRule rule = make_rule(n, o);
        rule_info = rule_meta(rule);
        if (name == "rvip") {
            reports = check_reverse_isop(K, o.qs, rule, o.auto_john);
        } else {
            const ConvexBody L = read_body(bodies[1]);
            reports = name == "bm" ? check_bm(K, L, o.qs, rule) : check_bm_logconcave(K, L, o.lambdas, o.qs, rule);
        }
    }
    json cfg = options_json(o);
    cfg["check"] = name;
    cfg["bodies"] = bodies;
    const Manifest m = make_manifest("check", cfg, rule_info);
    json out = {{"manifest", m.hash}, {"reports", json::array()}};
    bool violation = false;
    for (const auto& r : reports) {
        std::cerr << report_line(r) << '\n';
        out["reports"].push_back(report_to_json(r));
        violation = violation || r.verdict == Verdict::ViolationCandidate;
    }
    std::cout << out.dump(2) << '\n';
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_text(fs::path(o.out) / ("check-" + name + ".json"), out.dump(2) + "\n");
        write_text(fs::path(o.out) / "manifest.json", m.body.dump(2) + "\n");
    }
    return violation ? kExitViolation : kExitOk;
}

int cmd_john(const std::string& body_path, const Options& o) {
    const ConvexBody K = read_body(body_path);
    const EllipsoidMatrix E = john_ellipsoid(K);
    const Matrix T = inverse_sqrt(E.M);
    const ConvexBody J = to_john_position(K);
    const ContactData c = contact_points(J);
    const JohnPositionReport rep = john_position_report(J);
    json cfg = options_json(o);
    cfg["body"] = body_path;
    const Manifest m = make_manifest("john", cfg, json::object());
    json transform = json::array();
    for (int r = 0; r < T.rows(); ++r) {
        json row = json::array();
        for (int col = 0; col < T.cols(); ++col) row.push_back(T(r, col));
        transform.push_back(std::move(row));
    }
    json report = {{"manifest", m.hash},
                   {"body_hash", body_fingerprint(K)},
                   {"john_body_hash", body_fingerprint(J)},
                   {"transform", transform},
                   {"ellipsoid", ellipsoid_to_json(E)},
                   {"contacts", contacts_to_json(c)},
                   {"check",
                    {{"inradius", rep.inradius},
                     {"min_sampled_radial", rep.min_sampled_radial},
                     {"isotropy_residual", rep.isotropy_residual},
                     {"in_john_position", rep.ok}}}};
    std::cout << report.dump(2) << '\n';
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        save_body(J, (fs::path(o.out) / "body_john.json").string());
        write_text(fs::path(o.out) / "ellipsoid.json", ellipsoid_to_json(E).dump(2) + "\n");
        write_text(fs::path(o.out) / "contacts.json", report.dump(2) + "\n");
        write_text(fs::path(o.out) / "manifest.json", m.body.dump(2) + "\n");
    }
    return rep.ok ? kExitOk : kExitEval;
}

int cmd_search(const std::string& config_path, const Options& o) {
    SearchConfig cfg;
    try {
        cfg = load_search_config(config_path);
    } catch (const Error& e) {
        throw InputError(std::string(to_string(e.kind())) + ": " + e.what());
    }
    const SearchResult res = search_counterexamples(cfg);
    const Manifest m = make_manifest("search", config_to_json(cfg), json::object());
    const fs::path dir = o.out.empty() ? fs::path("search-out") : fs::path(o.out);
    write_search_outputs(res, dir, m.hash);
    write_text(dir / "manifest.json", m.body.dump(2) + "\n");
    json summary = {{"manifest", m.hash},
                    {"trials", cfg.trials},
                    {"records", res.findings.size()},
                    {"candidates", res.candidates},
                    {"survivors", res.survivors},
                    {"failures", res.failures},
                    {"bodies_archived", res.bodies.size()},
                    {"out", dir.string()}};
    if (!res.findings.empty() && res.findings.front().final_report())
        summary["worst"] = report_to_json(*res.findings.front().final_report());
    std::cout << summary.dump(2) << '\n';
    if (cfg.mode == SearchMode::Exploration) return kExitOk;
    return res.survivors > 0 ? kExitViolation : kExitOk;
}

std::pair<double, double> parse_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw InputError("--q-range must look like a:b");
    try {
        return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InputError("--q-range must look like a:b");
    }
}

int cmd_curve(const std::string& body_path, const Options& o) {
    const ConvexBody K = read_body(body_path);
    const int n = K.dim();
    const auto [a, b] = parse_range(o.q_range.empty() ? "-2:" + std::to_string(n) : o.q_range);
    if (!(a >= -10.0 && b <= n && a <= b) || !(o.step > 0.0))
        throw InputError("q-range must lie within [-10, n] with a positive step");
    const SphereRule rule = make_rule(n, o);
    const auto rK = radial_profile(K, rule);
    const auto rC = radial_profile(cube(n), rule);
    Table t{{"q", "normalized_K", "normalized_cube", "margin", "uncertainty"}, {}};
    const int steps = static_cast<int>(std::floor((b - a) / o.step + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        double q = a + i * o.step;
        if (std::abs(q) < 1e-12) q = 0.0;
        const DualVolumeResult vk = normalized_dual_querm(rK, q, rule);
        const DualVolumeResult vc = normalized_dual_querm(rC, q, rule);
        const double unc = std::hypot(vk.std_error + vk.discretization_error, vc.std_error + vc.discretization_error);
        t.rows.push_back({q, vk.value, vc.value, vc.value - vk.value, unc});
    }
    json cfg = options_json(o);
    cfg["body"] = body_path;
    emit(o, "curve", t, make_manifest("curve", cfg, rule_meta(rule)));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual quermassintegrals, John position and inequality checks for convex bodies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Options o;

    auto add_rule_flags = [&](CLI::App* c) {
        c->add_option("--scheme", o.scheme, "trapezoid | fibonacci | mc-antipodal (default by dimension)");
        c->add_option("--rule-size", o.rule_size, "number of sphere nodes (default by dimension)");
        c->add_option("--samples", o.samples, "Gaussian sample size")->capture_default_str();
        c->add_option("--seed", o.seed, "master seed")->capture_default_str();
        c->add_option("--out", o.out, "output directory");
        c->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    };

    std::string body, config, check_name;
    std::vector<std::string> check_bodies;

    auto* compute = app.add_subcommand("compute", "dual volumes of a body");
    compute->add_option("body", body, "body JSON file")->required();
    compute->add_option("--q", o.qs, "exponents")->delimiter(',');
    compute->add_option("--formulation", o.formulations, "sphere | gaussian | layercake")->delimiter(',');
    add_rule_flags(compute);

    auto* check = app.add_subcommand("check", "inequality checks");
    check->add_option("name", check_name, "bm | logconcave | rvip | ss-tail")
        ->required()
        ->check(CLI::IsMember({"bm", "logconcave", "rvip", "ss-tail"}));
    check->add_option("bodies", check_bodies, "body JSON file(s)")->required();
    check->add_option("--q", o.qs, "exponents")->delimiter(',');
    check->add_option("--lambda", o.lambdas, "interpolation parameters (logconcave)")->delimiter(',');
    check->add_option("--t", o.ts, "tail levels (ss-tail)")->delimiter(',');
    check->add_flag("--auto-john", o.auto_john, "move the body to John position first");
    add_rule_flags(check);

    auto* john = app.add_subcommand("john", "John ellipsoid, position and contacts");
    john->add_option("body", body, "body JSON file")->required();
    john->add_option("--out", o.out, "output directory");

    auto* search = app.add_subcommand("search", "randomized counterexample search");
    search->add_option("config", config, "search config JSON")->required();
    search->add_option("--out", o.out, "output directory");

    auto* curve = app.add_subcommand("curve", "normalized dual volume of a body against the cube over q");
    curve->add_option("body", body, "body JSON file")->required();
    curve->add_option("--q-range", o.q_range, "a:b within [-10, n]");
    curve->add_option("--step", o.step, "q step")->capture_default_str();
    add_rule_flags(curve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*compute) return cmd_compute(body, o);
        if (*check) return cmd_check(check_name, check_bodies, o);
        if (*john) return cmd_john(body, o);
        if (*search) return cmd_search(config, o);
        if (*curve) return cmd_curve(body, o);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.kind() == ErrorKind::ParseError ? kExitInput : kExitEval;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitEval;
    }
    return kExitOk;
}
