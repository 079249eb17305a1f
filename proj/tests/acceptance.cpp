// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [config-dir]

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "dualvol/search.hpp"
#include "oracle.hpp"

#ifndef DUALVOL_CONFIG_DIR
#define DUALVOL_CONFIG_DIR "configs"
#endif

using namespace dualvol;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string config_dir;

ConvexBody rotated_cube(int n, std::uint64_t seed) {
    Engine eng = make_engine(seed);
    return linear_image(random_rotation(n, eng), cube(n));
}

// Fixed suite seeds.
constexpr std::uint64_t kBmSeed = 601;
constexpr std::uint64_t kLogConcaveSeed = 701;
constexpr std::uint64_t kJohnSuiteSeed = 1001;

SearchConfig suite_config(const std::string& check, std::uint64_t seed, int trials) {
    SearchConfig c;
    c.check = check;
    c.dim = 3;
    c.trials = trials;
    c.seed = seed;
    c.scheme = Scheme::Fibonacci;
    c.rule_size = 20000;
    c.samples = 200000;
    c.escalation = 10;
    return c;
}

void summarize(Outcome& o, const SearchResult& r) {
    double worst = INFINITY;
    for (const auto& f : r.findings)
        if (f.final_report()) worst = std::min(worst, f.rank());
    o.detail << r.findings.size() << " reports, " << r.candidates << " candidates, " << r.survivors
             << " survivors, " << r.failures << " trial failures, min margin/unc " << worst << "; ";
    o.require(r.survivors == 0, "surviving ViolationCandidates");
    o.require(r.failures == 0, "trial failures");
}

Outcome c1_ball_normalization() {
    Outcome o;
    const SphereRule rule = default_rule(3);
    double worst = 0.0;
    for (double q : {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0})
        worst = std::max(worst, std::abs(normalized_dual_querm(euclidean_ball(3), q, rule).value - 1.0));
    o.detail << "max |Vbar_q(B) - 1| = " << worst;
    o.require(worst <= 1e-9, "tolerance 1e-9");
    return o;
}

Outcome c2_square_closed_form() {
    Outcome o;
    const double ref = oracle::square_dual_volume(1.0);
    const double v = dual_querm(cube(2), 1.0, sphere_rule(2, Scheme::Trapezoid, 4096)).value;
    o.detail << "V_1 = " << v << ", oracle " << ref << ", 4 ln(1+sqrt2) = " << 4.0 * std::log1p(std::sqrt(2.0));
    o.require(std::abs(ref - 4.0 * std::log1p(std::sqrt(2.0))) <= 1e-12, "oracle vs closed form");
    o.require(std::abs(v - ref) <= 1e-5, "tolerance 1e-5");
    return o;
}

Outcome c3_volume_case() {
    Outcome o;
    const double v3 = dual_querm(cube(3), 3.0, sphere_rule(3, Scheme::Fibonacci, 20000)).value;
    const double v2 = dual_querm(cube(2), 2.0, default_rule(2)).value;
    o.detail << "V_3(cube3) = " << v3 << " (rel " << std::abs(v3 / 8.0 - 1.0) << "), V_2(cube2) = " << v2
             << " (abs " << std::abs(v2 - 4.0) << ")";
    o.require(std::abs(v3 / 8.0 - 1.0) <= 5e-3, "0.5% on the cube");
    o.require(std::abs(v2 - 4.0) <= 1e-6, "1e-6 on the square");
    return o;
}

Outcome c4_formulation_equivalence() {
    Outcome o;
    const ConvexBody K = random_body({3, BodyFamily::VPolytope, 20}, 42);
    const SphereRule rule = sphere_rule(3, Scheme::Fibonacci, 20000);
    const GaussianSample s = gaussian_sample(3, 200000, 42);
    const auto rho = radial_profile(K, rule);
    for (double q : {-1.0, 1.0, 1.5, 2.5}) {
        const auto sp = dual_querm(rho, q, rule);
        const auto ga = gaussian_dual_moment(K, q, s);
        const auto lc = layer_cake_moment(K, q, s);
        const DualVolumeResult* v[3] = {&sp, &ga, &lc};
        double worst = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const double z = std::abs(v[a]->dual_volume - v[b]->dual_volume) /
                                 std::hypot(v[a]->dual_volume_error, v[b]->dual_volume_error);
                worst = std::max(worst, z);
            }
        o.detail << "q=" << q << ": " << sp.dual_volume << " / " << ga.dual_volume << " / " << lc.dual_volume
                 << " max z " << worst << "; ";
        o.require(worst <= 3.0, "3 combined stderr at q=" + std::to_string(q));
    }
    return o;
}

Outcome c5_constants() {
    Outcome o;
    const double a = c_constant(2, 1.0), b = c_constant(2, 0.0);
    const double ea = std::abs(a - oracle::c_constant(2, 1.0)), eb = std::abs(b - oracle::c_constant(2, 0.0));
    o.require(std::abs(oracle::c_constant(2, 1.0) - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 1e-12,
              "oracle c(2,1)");
    o.require(std::abs(oracle::c_constant(2, 0.0) - 1.0 / std::numbers::pi) <= 1e-12, "oracle c(2,0)");
    o.require(ea <= 1e-10 && eb <= 1e-10, "anchors within 1e-10");
    Engine eng = make_engine(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
        const int n = 1 + static_cast<int>(unit(eng) * 6.0);
        const double q = n - 0.1 - (n + 6.0) * unit(eng);
        worst = std::max(worst, std::abs(c_constant(n, q) / oracle::c_constant(n, q) - 1.0));
    }
    o.detail << "|c21 - oracle| = " << ea << ", |c20 - oracle| = " << eb << ", 30 spot checks max rel " << worst;
    o.require(worst <= 1e-10, "spot checks within 1e-10");
    return o;
}

Outcome c6_bm_suite() {
    Outcome o;
    SearchConfig c = suite_config("bm", kBmSeed, 100);
    c.qs = {0.5, 1.0, 2.0, 3.0};
    summarize(o, search_counterexamples(c));
    c.dilates = true;
    c.trials = 20;
    const auto d = search_counterexamples(c);
    double worst = 0.0;
    for (const auto& f : d.findings) worst = std::max(worst, std::abs(f.report->margin) / f.report->lhs);
    o.detail << "dilates: max |margin|/scale " << worst;
    o.require(d.failures == 0 && worst <= 1e-9, "dilate equality 1e-9");
    return o;
}

Outcome c7_logconcave_suite() {
    Outcome o;
    SearchConfig c = suite_config("logconcave", kLogConcaveSeed, 50);
    c.qs = {1.0, 2.0};
    c.lambdas = {0.25, 0.5, 0.75};
    summarize(o, search_counterexamples(c));
    return o;
}

Outcome c8_mvee() {
    Outcome o;
    MveeOptions opt;
    opt.eps = 1e-7;
    double worst_id = 0.0;
    for (int n = 2; n <= 6; ++n)
        worst_id = std::max(worst_id, (mvee(Matrix::Identity(n, n), opt).ellipsoid.M - Matrix::Identity(n, n)).norm());
    bool monotone = true, contained = true;
    long iterations = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int n = 2 + static_cast<int>(seed % 5);
        Engine eng = make_engine(seed);
        Matrix P(n, 50);
        for (int j = 0; j < P.cols(); ++j) P.col(j) = gaussian_vector(n, eng);
        const auto r = mvee(P, opt);
        iterations += r.iterations;
        for (std::size_t i = 1; i < r.objective.size(); ++i)
            if (r.objective[i] < r.objective[i - 1] - 1e-12 * (1.0 + std::abs(r.objective[i - 1]))) monotone = false;
        const Matrix Minv = r.ellipsoid.M.inverse();
        for (int j = 0; j < P.cols(); ++j)
            if (P.col(j).dot(Minv * P.col(j)) > 1.0 + opt.eps) contained = false;
    }
    o.detail << "max ||M - I|| for +-e_i = " << worst_id << "; 10 random clouds, " << iterations
             << " iterations, monotone " << monotone << ", contained " << contained;
    o.require(worst_id <= 1e-6, "identity within 1e-6");
    o.require(monotone, "monotone objective");
    o.require(contained, "containment");
    return o;
}

Outcome c9_john_pipeline() {
    Outcome o;
    double cube_err = 0.0, iso = 0.0;
    for (int n = 2; n <= 4; ++n) {
        cube_err = std::max(cube_err, (john_ellipsoid(cube(n)).M - Matrix::Identity(n, n)).norm());
        iso = std::max(iso, contact_points(cube(n)).residual);
        iso = std::max(iso, contact_points(cross_polytope(n, std::sqrt(double(n)))).residual);
    }
    int ok = 0;
    double worst_self = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BodyFamily fam = seed % 2 ? BodyFamily::HPolytope : BodyFamily::VPolytope;
        const ConvexBody K =
            to_john_position(random_body({3, fam, fam == BodyFamily::HPolytope ? 10 : 20}, derive_seed(909, seed)));
        if (john_position_report(K).ok) ++ok;
        worst_self = std::max(worst_self, (john_ellipsoid(K).M - Matrix::Identity(3, 3)).norm());
    }
    o.detail << "cube ||M - I|| " << cube_err << "; " << ok << "/20 pass the position check, max ||J - I|| "
             << worst_self << "; max isotropy residual " << iso;
    o.require(cube_err <= 1e-5, "cube within 1e-5");
    o.require(ok == 20, "inscribed-ball check");
    o.require(worst_self <= 1e-4, "self-consistency 1e-4");
    o.require(iso <= 1e-8, "isotropy 1e-8");
    return o;
}

SearchConfig john_suite(const std::string& check) {
    SearchConfig c = suite_config(check, kJohnSuiteSeed, 100);
    c.family = BodyFamily::HPolytope;
    c.k = 10;
    c.qs = {-2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
    c.ts = {0.5, 1.0, 2.0};
    return c;
}

Outcome c10_reverse_isop() {
    Outcome o;
    summarize(o, search_counterexamples(john_suite("rvip")));
    const double qs[] = {-2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
    double cube_m = 0.0, rot_m = 0.0;
    for (const auto& r : check_reverse_isop(cube(3), qs, default_rule(3), true)) cube_m = std::max(cube_m, std::abs(r.margin));
    const SphereRule fine = sphere_rule(3, Scheme::Fibonacci, 200000);
    for (std::uint64_t seed = 0; seed < 5; ++seed)
        for (const auto& r : check_reverse_isop(rotated_cube(3, seed), qs, fine, true))
            rot_m = std::max(rot_m, std::abs(r.margin));
    o.detail << "cube max |margin| " << cube_m << ", rotated cube max |margin| " << rot_m << " (200000-node rule)";
    o.require(cube_m <= 1e-6, "cube 1e-6");
    o.require(rot_m <= 1e-5, "rotated cube 1e-5");
    return o;
}

Outcome c11_ss_tail() {
    Outcome o;
    summarize(o, search_counterexamples(john_suite("ss-tail")));
    const double ts[] = {0.5, 1.0, 2.0};
    bool exact = true;
    for (const auto& r : check_ss_tail(cube(3), ts, gaussian_sample(3, 200000, 11), true))
        exact = exact && r.margin == 0.0;
    o.detail << "cube margins exactly 0: " << exact;
    o.require(exact, "cube margin exactly 0");
    return o;
}

Outcome c12_entropy() {
    Outcome o;
    const SphereRule rule = default_rule(3);
    const ConvexBody bodies[] = {cube(3), random_body({3, BodyFamily::VPolytope, 20}, 1212)};
    for (const ConvexBody& K : bodies) {
        const auto rho = radial_profile(K, rule);
        const double v0 = normalized_dual_querm(rho, 0.0, rule).value;
        const double rel = std::max(std::abs(normalized_dual_querm(rho, 1e-3, rule).value - v0),
                                    std::abs(normalized_dual_querm(rho, -1e-3, rule).value - v0)) / v0;
        o.detail << "Vbar_0 = " << v0 << " rel gap " << rel << "; ";
        o.require(rel <= 1e-3, "limit within 1e-3");
    }
    const auto E = dual_entropy(bodies[1], rule);
    const auto Eg = gaussian_dual_entropy(bodies[1], gaussian_sample(3, 200000, 1212));
    const auto c = gaussian_entropy_constants(3);
    const double pred = c.c0 * E.value + c.c1;
    const double z = std::abs(Eg.value - pred) / std::hypot(Eg.std_error, c.c0 * E.discretization_error);
    o.detail << "E_gamma = " << Eg.value << " vs c0 E + c1 = " << pred << " (c1 = " << c.c1 << "), z " << z;
    o.require(z <= 3.0, "identity within 3 stderr");
    return o;
}

Outcome c13_exploration() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const SearchConfig c = load_search_config((fs::path(config_dir) / "exploration_q_above_n.json").string());
    const auto r = search_counterexamples(c);
    const fs::path dir = fs::temp_directory_path() / "dualvol_acceptance_exploration";
    fs::remove_all(dir);
    write_search_outputs(r, dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto archived = std::distance(fs::directory_iterator(dir / "bodies"), fs::directory_iterator{});
    int logged = 0;
    std::ifstream jl(dir / "findings.jsonl");
    for (std::string line; std::getline(jl, line);) {
        const auto j = nlohmann::json::parse(line);
        if (j.contains("retest") && j.contains("decision")) ++logged;
    }
    double lowest = INFINITY;
    for (const auto& f : r.findings)
        if (f.report) lowest = std::min(lowest, f.report->margin);
    o.detail << c.trials << " trials in " << secs << " s, " << archived << " bodies archived, " << r.candidates
             << " candidates (" << r.survivors << " survived, " << logged << " decisions logged), min margin "
             << lowest;
    o.require(r.failures == 0, "all trials completed");
    o.require(archived == static_cast<long>(r.bodies.size()) && archived == 2 * c.trials, "bodies archived");
    o.require(logged == r.candidates, "every candidate re-tested with a logged decision");
    o.require(secs <= 600.0, "10 minute budget");
    fs::remove_all(dir);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    config_dir = argc > 1 ? argv[1] : DUALVOL_CONFIG_DIR;
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"ball normalization", c1_ball_normalization},
        {"square closed form", c2_square_closed_form},
        {"volume case", c3_volume_case},
        {"formulation equivalence", c4_formulation_equivalence},
        {"constant check", c5_constants},
        {"Brunn-Minkowski suite", c6_bm_suite},
        {"log-concavity suite", c7_logconcave_suite},
        {"MVEE", c8_mvee},
        {"John pipeline", c9_john_pipeline},
        {"reverse isoperimetric suite", c10_reverse_isop},
        {"Gaussian tail suite", c11_ss_tail},
        {"entropy consistency", c12_entropy},
        {"exploration mode", c13_exploration},
    };
    std::cout.precision(6);
    int failed = 0, index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        bool pass = false;
        std::string detail;
        try {
            Outcome o = run();
            pass = o.pass;
            detail = o.detail.str();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (pass ? "PASS" : "FAIL") << " " << index << " " << name << " (" << secs << " s): " << detail
                  << std::endl;
        if (!pass) ++failed;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
