#ifndef DUALVOL_SEARCH_HPP
#define DUALVOL_SEARCH_HPP

// Randomized counterexample search: runs one checker over seeded random
// bodies, re-tests every ViolationCandidate at an escalated rule/sample size
// and archives every body it touched. It reports margins and never draws a
// mathematical conclusion.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualvol/bodies.hpp"
#include "dualvol/body_io.hpp"
#include "dualvol/rng.hpp"
#include "dualvol/verify.hpp"

namespace dualvol {

enum class SearchMode { Regression, Exploration };

struct SearchConfig {
    std::string check = "bm"; // bm | logconcave | rvip | ss-tail
    SearchMode mode = SearchMode::Regression;
    int dim = 3;
    std::vector<double> qs = {1.0};
    std::vector<double> lambdas = {0.5}; // logconcave
    std::vector<double> ts = {1.0};      // ss-tail
    BodyFamily family = BodyFamily::VPolytope;
    int k = 20;
    bool symmetric = true;
    bool dilates = false;       // L = dilate_factor * K instead of an independent body
    double dilate_factor = 2.0;
    int trials = 100;
    std::uint64_t seed = 1;
    int escalation = 10;
    Scheme scheme = Scheme::Fibonacci;
    int rule_size = 20000;
    int samples = 200000;
};

inline nlohmann::json config_to_json(const SearchConfig& c) {
    return {{"check", c.check},
            {"mode", c.mode == SearchMode::Regression ? "regression" : "exploration"},
            {"dim", c.dim},
            {"q", c.qs},
            {"lambdas", c.lambdas},
            {"t", c.ts},
            {"family", c.family == BodyFamily::VPolytope ? "vpolytope" : "hpolytope"},
            {"k", c.k},
            {"symmetric", c.symmetric},
            {"pairs", c.dilates ? "dilates" : "random"},
            {"dilate_factor", c.dilate_factor},
            {"trials", c.trials},
            {"seed", c.seed},
            {"escalation", c.escalation},
            {"scheme", to_string(c.scheme)},
            {"rule_size", c.rule_size},
            {"samples", c.samples}};
}

inline void validate(const SearchConfig& c) {
    const bool pair_check = c.check == "bm" || c.check == "logconcave";
    if (!pair_check && c.check != "rvip" && c.check != "ss-tail")
        fail(ErrorKind::ParseError, "unknown check '" + c.check + "'");
    if (c.dim < 2 || c.dim > 8) fail(ErrorKind::ParseError, "dim must lie in [2, 8]");
    if (c.trials < 1 || c.escalation < 1 || c.rule_size < 2 || c.samples < 2 || c.k < 1)
        fail(ErrorKind::ParseError, "trials, escalation, k, rule_size and samples must be positive");
    if (c.qs.empty() && c.check != "ss-tail") fail(ErrorKind::ParseError, "empty q grid");
    if (!c.symmetric && !pair_check)
        fail(ErrorKind::UnsupportedComposition, "John position is only available for symmetric bodies");
    if (c.dilates && !pair_check) fail(ErrorKind::ParseError, "dilate pairs only apply to pair checks");
}

inline SearchConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::ParseError, "search config must be a JSON object");
    SearchConfig c;
    try {
        c.check = j.value("check", c.check);
        const std::string mode = j.value("mode", std::string("regression"));
        if (mode == "regression") c.mode = SearchMode::Regression;
        else if (mode == "exploration") c.mode = SearchMode::Exploration;
        else fail(ErrorKind::ParseError, "mode must be 'regression' or 'exploration'");
        c.dim = j.value("dim", c.dim);
        c.qs = j.value("q", c.qs);
        c.lambdas = j.value("lambdas", c.lambdas);
        c.ts = j.value("t", c.ts);
        const std::string family = j.value("family", std::string("vpolytope"));
        if (family == "vpolytope") c.family = BodyFamily::VPolytope;
        else if (family == "hpolytope") c.family = BodyFamily::HPolytope;
        else fail(ErrorKind::ParseError, "family must be 'vpolytope' or 'hpolytope'");
        c.k = j.value("k", c.k);
        c.symmetric = j.value("symmetric", c.symmetric);
        const std::string pairs = j.value("pairs", std::string("random"));
        if (pairs != "random" && pairs != "dilates") fail(ErrorKind::ParseError, "pairs must be 'random' or 'dilates'");
        c.dilates = pairs == "dilates";
        c.dilate_factor = j.value("dilate_factor", c.dilate_factor);
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        c.escalation = j.value("escalation", c.escalation);
        c.scheme = parse_scheme(j.value("scheme", std::string(to_string(c.scheme))));
        c.rule_size = j.value("rule_size", c.rule_size);
        c.samples = j.value("samples", c.samples);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("search config: ") + e.what());
    } catch (const Error& e) {
        fail(ErrorKind::ParseError, e.what());
    }
    validate(c);
    return c;
}

inline SearchConfig load_search_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open search config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, path + ": " + e.what());
    }
    return config_from_json(j);
}

struct Finding {
    int trial = 0;
    std::optional<CheckReport> report;
    std::optional<CheckReport> retest; // present for every ViolationCandidate
    bool survived = false;             // candidate after re-test
    std::string body_hash_K, body_hash_L;
    std::string error;                 // trial failure, recorded instead of thrown

    const CheckReport* final_report() const { return retest ? &*retest : report ? &*report : nullptr; }
    double rank() const {
        const CheckReport* r = final_report();
        if (!r) return std::numeric_limits<double>::infinity();
        return r->margin / std::max(r->uncertainty, std::numeric_limits<double>::min());
    }
};

struct SearchResult {
    SearchConfig config;
    std::vector<Finding> findings; // ranked, most negative standardized margin first
    std::vector<ConvexBody> bodies; // every body used, unique by fingerprint
    int candidates = 0;
    int survivors = 0;
    int failures = 0;
};

namespace detail {

struct TrialBodies {
    ConvexBody K, L;
};

inline TrialBodies trial_bodies(const SearchConfig& c, std::uint64_t trial_seed) {
    GeneratorSpec spec;
    spec.dim = c.dim;
    spec.family = c.family;
    spec.k = c.k;
    spec.symmetric = c.symmetric;
    TrialBodies b;
    b.K = random_body(spec, derive_seed(trial_seed, 0));
    const bool pair_check = c.check == "bm" || c.check == "logconcave";
    if (pair_check) b.L = c.dilates ? scale(b.K, c.dilate_factor) : random_body(spec, derive_seed(trial_seed, 1));
    return b;
}

inline std::vector<CheckReport> run_check(const SearchConfig& c, const TrialBodies& b, int rule_size, int samples,
                                          std::uint64_t seed) {
    const ExponentPolicy policy{c.mode == SearchMode::Exploration};
    if (c.check == "bm" || c.check == "logconcave" || c.check == "rvip") {
        const SphereRule rule = sphere_rule(c.dim, c.scheme, rule_size, seed);
        if (c.check == "bm") return check_bm(b.K, b.L, c.qs, rule, policy);
        if (c.check == "logconcave") return check_bm_logconcave(b.K, b.L, c.lambdas, c.qs, rule, policy);
        return check_reverse_isop(b.K, c.qs, rule, true);
    }
    return check_ss_tail(b.K, c.ts, gaussian_sample(c.dim, samples, seed), true);
}

} // namespace detail

/// Pure function of the config: trial i uses seeds derived from (cfg.seed, i).
inline SearchResult search_counterexamples(const SearchConfig& cfg) {
    validate(cfg);
    SearchResult out;
    out.config = cfg;
    std::vector<std::string> seen;
    auto archive = [&](const ConvexBody& B, const std::string& h) {
        if (std::find(seen.begin(), seen.end(), h) == seen.end()) {
            seen.push_back(h);
            out.bodies.push_back(B);
        }
    };
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t ts = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
        std::vector<Finding> local;
        try {
            const detail::TrialBodies b = detail::trial_bodies(cfg, ts);
            const std::string hK = body_fingerprint(b.K);
            const std::string hL = b.L.valid() ? body_fingerprint(b.L) : std::string();
            archive(b.K, hK);
            if (b.L.valid()) archive(b.L, hL);
            const auto reports = detail::run_check(cfg, b, cfg.rule_size, cfg.samples, derive_seed(ts, 2));
            std::optional<std::vector<CheckReport>> escalated;
            for (std::size_t i = 0; i < reports.size(); ++i) {
                Finding f;
                f.trial = trial;
                f.report = reports[i];
                f.body_hash_K = hK;
                f.body_hash_L = hL;
                if (reports[i].verdict == Verdict::ViolationCandidate) {
                    ++out.candidates;
                    if (!escalated)
                        escalated = detail::run_check(cfg, b, cfg.rule_size * cfg.escalation,
                                                      cfg.samples * cfg.escalation, derive_seed(ts, 3));
                    f.retest = (*escalated)[i];
                    f.survived = f.retest->verdict == Verdict::ViolationCandidate;
                    if (f.survived) ++out.survivors;
                }
                local.push_back(std::move(f));
            }
        } catch (const Error& e) {
            Finding f;
            f.trial = trial;
            f.error = std::string(to_string(e.kind())) + ": " + e.what();
            ++out.failures;
            local.clear();
            local.push_back(std::move(f));
        }
        for (auto& f : local) out.findings.push_back(std::move(f));
    }
    std::stable_sort(out.findings.begin(), out.findings.end(),
                     [](const Finding& a, const Finding& b) { return a.rank() < b.rank(); });
    return out;
}

inline nlohmann::json finding_to_json(const Finding& f) {
    nlohmann::json j = {{"trial", f.trial}, {"body_hash_K", f.body_hash_K}, {"body_hash_L", f.body_hash_L}};
    if (f.report) j["report"] = report_to_json(*f.report);
    if (f.retest) {
        j["retest"] = report_to_json(*f.retest);
        j["decision"] = f.survived ? "survived" : "dismissed";
    }
    if (!f.error.empty()) j["error"] = f.error;
    return j;
}

/// findings.jsonl, summary.csv and bodies/<fingerprint>.json under dir.
/// The optional manifest hash is stamped on the CSV and on each record.
inline void write_search_outputs(const SearchResult& res, const std::filesystem::path& dir,
                                 const std::string& manifest_hash = {}) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "bodies");
    for (const auto& B : res.bodies) save_body(B, (dir / "bodies" / (body_fingerprint(B) + ".json")).string());

    std::ofstream jl(dir / "findings.jsonl");
    for (const auto& f : res.findings) {
        nlohmann::json j = finding_to_json(f);
        if (!manifest_hash.empty()) j["manifest"] = manifest_hash;
        jl << j.dump() << '\n';
    }

    std::ofstream csv(dir / "summary.csv");
    csv.precision(17);
    if (!manifest_hash.empty()) csv << "# manifest=" << manifest_hash << '\n';
    csv << "trial,q,margin,uncertainty,verdict,body_hash_K,body_hash_L\n";
    for (const auto& f : res.findings) {
        const CheckReport* r = f.final_report();
        csv << f.trial << ',';
        if (r) {
            const double q = r->name == "ss-tail" ? r->parameter : r->q;
            csv << q << ',' << r->margin << ',' << r->uncertainty << ',' << to_string(r->verdict);
        } else {
            csv << ",,,Error";
        }
        csv << ',' << f.body_hash_K << ',' << f.body_hash_L << '\n';
    }
}

} // namespace dualvol

#endif
