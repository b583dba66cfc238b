// Command-line driver: computes steady-state candidates of the triangular
// cross-diffusion system, proves their existence and (where possible) linear
// instability, and emits machine-checkable JSON certificates.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crossdiff/certio.hpp"
#include "crossdiff/numerics.hpp"

namespace fs = std::filesystem;
using namespace crossdiff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProofFailure = 10;
constexpr int kExitNoUnstable = 20;
constexpr int kExitConfig = 1;
constexpr int kExitInternal = 2;

struct CommonOpts {
    std::string params = "r1=5,r2=2,a1=3,a2=3,b1=1,b2=1,d12=3";
    std::string d = "0.005";
    int m = 100;
    std::string nu = "1.06";
    int workers = 1;
};

ModelParams parse_params(const std::string& spec, const std::string& d) {
    std::map<std::string, std::string> kv = {{"r1", "5"}, {"r2", "2"}, {"a1", "3"}, {"a2", "3"},
                                             {"b1", "1"}, {"b2", "1"}, {"d12", "3"}};
    std::string item;
    std::istringstream ss(spec);
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("bad --params entry: " + item);
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (!kv.count(key) && key != "d1" && key != "d2") throw ConfigError("unknown parameter: " + key);
        kv[key] = val;
    }
    std::string d1 = kv.count("d1") ? kv["d1"] : d;
    std::string d2 = kv.count("d2") ? kv["d2"] : d;
    return ModelParams::from_strings({kv["r1"], kv["r2"], kv["a1"], kv["a2"], kv["b1"], kv["b2"],
                                      kv["d12"], d1, d2});
}

// "k<N>-plus" / "k<N>-minus" -> (N, sign); throws on anything else.
std::pair<int, double> parse_mode_seed(const std::string& seed_mode) {
    if (seed_mode.size() < 3 || seed_mode[0] != 'k') throw ConfigError("unknown --seed-mode: " + seed_mode);
    auto dash = seed_mode.find('-');
    if (dash == std::string::npos) throw ConfigError("unknown --seed-mode: " + seed_mode);
    int k = std::stoi(seed_mode.substr(1, dash - 1));
    std::string half = seed_mode.substr(dash + 1);
    if (half == "plus") return {k, 1.0};
    if (half == "minus") return {k, -1.0};
    throw ConfigError("unknown --seed-mode: " + seed_mode);
}

int cmd_validate_steady(const CommonOpts& opts, const std::string& candidate_file,
                        const std::string& out_path, double newton_tol) {
    ModelParams params = parse_params(opts.params, opts.d);
    Weight nu = Weight::from_decimal(opts.nu);

    SteadyCandidate cand;
    if (!candidate_file.empty()) {
        cand = candidate_from_json(read_text_file(candidate_file));
    } else {
        NewtonConfig ncfg;
        ncfg.m = opts.m;
        ncfg.residual_tol = newton_tol;
        ncfg.nu = nu.approx();
        cand = newton_steady(equilibrium_candidate(params), params, ncfg).x;
    }
    SteadyCertificate cert = validate_steady(cand, params, opts.m, nu, opts.nu);
    std::string doc = steady_cert_to_json(cert);
    if (!out_path.empty()) write_text_file(out_path, doc);
    std::printf("steady: %s  r=%.6g  Y=%.6g  Z0+Z1=%.6g  margins=(%.6g, %.6g)\n",
                cert.valid ? "VALID" : ("FAILED: " + cert.failure).c_str(), cert.r_star, cert.Y.hi,
                cert.Z0.hi + cert.Z1.hi, cert.margin_v.lo, cert.margin_w.lo);
    return cert.valid ? kExitOk : kExitProofFailure;
}

struct BranchRow {
    double d = 0.0;
    double v0 = 0.0;
    double radius = 0.0;
    std::string status;
    bool ok = false;
};

int cmd_validate_branch(const CommonOpts& opts, const std::string& d_range,
                        const std::string& seed_mode, const std::string& seed_d_str, double amp,
                        const std::string& out_csv, const std::string& out_dir) {
    ModelParams base = parse_params(opts.params, opts.d);
    Weight nu = Weight::from_decimal(opts.nu);

    // range "a:b:N"
    double a, b;
    int N;
    {
        auto c1 = d_range.find(':');
        auto c2 = d_range.rfind(':');
        if (c1 == std::string::npos || c2 == c1) throw ConfigError("--d-range expects a:b:N");
        if (!parse_double_exact(d_range.substr(0, c1), a) ||
            !parse_double_exact(d_range.substr(c1 + 1, c2 - c1 - 1), b))
            throw ConfigError("--d-range expects numbers a:b:N");
        N = std::stoi(d_range.substr(c2 + 1));
        if (N < 0) throw ConfigError("--d-range count must be nonnegative");
    }
    std::vector<double> ds;
    for (int i = 0; i < N; ++i)
        ds.push_back(N == 1 ? a : a + (b - a) * static_cast<double>(i) / (N - 1));
    std::sort(ds.begin(), ds.end(), std::greater<double>());

    // candidates per row
    std::vector<SteadyCandidate> cands(ds.size());
    if (seed_mode == "equilibrium") {
        for (size_t i = 0; i < ds.size(); ++i) {
            NewtonConfig ncfg;
            ncfg.m = opts.m;
            ncfg.nu = nu.approx();
            cands[i] = newton_steady(equilibrium_candidate(with_d(base, ds[i])), with_d(base, ds[i]), ncfg).x;
        }
    } else {
        auto [mode_k, sign] = parse_mode_seed(seed_mode);
        double seed_d;
        if (!parse_double_exact(seed_d_str, seed_d)) throw ConfigError("--seed-d expects a number");
        double signed_amp = sign * amp;
        // walk the branch through the grid points, largest d first
        SteadyCandidate cur;
        double cur_d = seed_d;
        for (size_t i = 0; i < ds.size(); ++i) {
            if (i == 0) {
                cur = trace_mode_branch(base, mode_k, seed_d, ds[i], signed_amp, opts.m, 48);
            } else {
                ContinuationConfig ccfg;
                ccfg.d_to = ds[i];
                ccfg.initial_step = std::max(std::fabs(cur_d - ds[i]) / 10.0, 1e-5);
                ccfg.m_max = opts.m;
                ccfg.newton.nu = nu.approx();
                ccfg.newton.residual_tol = 1e-11;
                std::vector<BranchPoint> pts = continuation_branch({cur_d, cur, 0.0, 0.0}, base, ccfg);
                NewtonConfig fin;
                fin.m = opts.m;
                fin.nu = nu.approx();
                fin.residual_tol = 1e-11;
                cur = newton_steady(pts.back().candidate, with_d(base, ds[i]), fin).x;
            }
            cur_d = ds[i];
            cands[i] = cur;
        }
    }

    // validate rows (worker pool)
    std::vector<BranchRow> rows(ds.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= ds.size()) return;
            BranchRow row;
            row.d = ds[i];
            try {
                SteadyCertificate cert =
                    validate_steady(cands[i], with_d(base, ds[i]), opts.m, nu, opts.nu);
                row.v0 = cert.v_at_zero;
                row.radius = cert.r_star;
                row.ok = cert.valid;
                row.status = cert.valid ? "VALID" : "FAILED:" + cert.failure;
                if (!out_dir.empty()) {
                    char name[64];
                    std::snprintf(name, sizeof name, "steady_d%.6f.json", ds[i]);
                    write_text_file((fs::path(out_dir) / name).string(), steady_cert_to_json(cert));
                }
            } catch (const std::exception& e) {
                row.status = std::string("ERROR:") + e.what();
            }
            rows[i] = row;
        }
    };
    int nw = std::max(1, opts.workers);
    std::vector<std::thread> pool;
    for (int t = 1; t < nw; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::string csv = "d,v0,radius,status\n";
    bool all_ok = true;
    for (const auto& row : rows) {
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%s\n", row.d, row.v0, row.radius,
                      row.status.c_str());
        csv += line;
        all_ok = all_ok && row.ok;
    }
    if (!out_csv.empty()) write_text_file(out_csv, csv);
    std::fputs(csv.c_str(), stdout);
    return (all_ok || rows.empty()) ? kExitOk : kExitProofFailure;
}

int cmd_continue_branch(const CommonOpts& opts, const std::string& seed_mode,
                        const std::string& seed_d_str, double amp, const std::string& to_d_str,
                        const std::string& out_path) {
    ModelParams base = parse_params(opts.params, opts.d);
    double seed_d, to_d;
    if (!parse_double_exact(seed_d_str, seed_d) || !parse_double_exact(to_d_str, to_d))
        throw ConfigError("--seed-d/--to-d expect numbers");
    auto [mode_k, sign] = parse_mode_seed(seed_mode);
    SteadyCandidate cand = trace_mode_branch(base, mode_k, seed_d, to_d, sign * amp, opts.m, 48);
    write_text_file(out_path, candidate_to_json(cand, to_d, opts.m));
    RSeq v = promote_candidate(cand, with_d(base, to_d), opts.m).v;
    std::printf("candidate at d=%s written to %s (v(0)=%.6f, m=%d)\n", to_d_str.c_str(),
                out_path.c_str(), midpoint(eval_at_zero(v)), opts.m);
    return kExitOk;
}

int cmd_prove_instability(const std::string& steady_cert_path, int n, const std::string& gamma_str,
                          std::string gamma_tilde_str, const std::string& target_str,
                          const std::string& out_path) {
    std::string steady_text = read_text_file(steady_cert_path);
    SteadyCertificate scert = steady_cert_from_json(steady_text);
    std::string why;
    if (!scert.valid || !recheck_certificate(scert, &why))
        throw ConfigError("steady certificate is not VALID (" + (why.empty() ? scert.failure : why) +
                          "); refusing to build on it");
    std::string steady_hash = cert_content_hash(steady_text);

    Weight nu = Weight::from_decimal(scert.nu_string);
    Weight gamma = Weight::from_decimal(gamma_str);
    Interval gt;
    if (gamma_tilde_str.empty()) {
        gt = isqrt(gamma.nu * nu.nu);
        gamma_tilde_str = double_to_string(midpoint(gt));
        gt = interval_from_decimal(gamma_tilde_str);
    } else {
        gt = interval_from_decimal(gamma_tilde_str);
    }
    Weight gamma_tilde{gt};

    SteadyX X = promote_candidate(scert.candidate, scert.params, scert.m);
    CjEnclosure cj = cj_enclose(X, scert.r_star, nu);

    // eigenpairs are located at a moderate truncation and Newton-refined at
    // the requested one, which avoids a dense eigensolve at large n
    int n_guess = std::min(n, 400);
    std::vector<EigenGuess> guesses = eigen_guess(cj, n_guess, 12);
    std::complex<double> target;
    bool have_target = false;
    if (!target_str.empty()) {
        auto comma = target_str.find(',');
        double re, im = 0.0;
        if (!parse_double_exact(target_str.substr(0, comma), re) ||
            (comma != std::string::npos && !parse_double_exact(target_str.substr(comma + 1), im)))
            throw ConfigError("--target-lambda expects re or re,im");
        target = {re, im};
        have_target = true;
    }
    const EigenGuess* best = pick_unstable(guesses, have_target ? &target : nullptr);
    if (!best) {
        nlohmann::json marker;
        marker["schema"] = "crossdiff-no-unstable-v1";
        marker["steady_hash"] = steady_hash;
        marker["n"] = n;
        marker["leading_re"] = double_to_string(guesses.front().lambda.real());
        if (!out_path.empty()) write_text_file(out_path, marker.dump(2) + "\n");
        std::printf("no unstable eigenvalue found (leading Re lambda = %.6g)\n",
                    guesses.front().lambda.real());
        return kExitNoUnstable;
    }

    EigenX EX = promote_eigen_guess(*best, n_guess);
    EX = eigen_polish(cj, EX, n, n > n_guess ? 3 : 1);
    EigenCertificate cert = prove_instability(EX, cj, gamma, gamma_tilde, gamma_str, gamma_tilde_str);
    cert.steady_hash = steady_hash;
    if (!out_path.empty()) write_text_file(out_path, eigen_cert_to_json(cert));
    std::printf("instability: %s  lambda=%.6g%+.6gi  r=%.6g  margin=%.6g\n",
                cert.valid ? "VALID" : ("FAILED: " + cert.failure).c_str(), cert.lambda.real(),
                cert.lambda.imag(), cert.r_star, cert.re_margin.lo);
    return cert.valid ? kExitOk : kExitProofFailure;
}

int cmd_export_diagram(const std::string& dir, const std::string& out_path) {
    struct Entry { double d; double v0; std::string status; };
    std::vector<Entry> entries;
    std::vector<std::pair<std::string, bool>> eigen_refs; // steady hash -> proved unstable
    std::vector<std::string> no_unstable_refs;

    std::vector<fs::path> files;
    if (fs::exists(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    struct SteadyEntry { double d; double v0; std::string hash; };
    std::vector<SteadyEntry> steadies;
    for (const auto& f : files) {
        std::string text;
        try {
            text = read_text_file(f.string());
            nlohmann::json j = nlohmann::json::parse(text);
            std::string schema = j.value("schema", "");
            if (schema == "crossdiff-steady-certificate-v1") {
                SteadyCertificate c = steady_cert_from_json(text);
                if (!c.valid) {
                    std::fprintf(stderr, "warning: %s is not a valid proof, skipped\n", f.c_str());
                    continue;
                }
                double d = midpoint(c.params.d1);
                steadies.push_back({d, c.v_at_zero, cert_content_hash(text)});
            } else if (schema == "crossdiff-eigen-certificate-v1") {
                EigenCertificate c = eigen_cert_from_json(text);
                if (c.valid) eigen_refs.emplace_back(c.steady_hash, true);
            } else if (schema == "crossdiff-no-unstable-v1") {
                no_unstable_refs.push_back(j.value("steady_hash", ""));
            }
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: skipping %s: %s\n", f.c_str(), e.what());
        }
    }
    std::string csv = "d,v0,status\n";
    for (const auto& s : steadies) {
        std::string status = "proved";
        for (const auto& [h, unst] : eigen_refs)
            if (h == s.hash && unst) status = "proved+unstable";
        if (status == "proved")
            for (const auto& h : no_unstable_refs)
                if (h == s.hash) status = "proved+no-unstable-found";
        char line[160];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%s\n", s.d, s.v0, status.c_str());
        csv += line;
    }
    if (!out_path.empty()) write_text_file(out_path, csv);
    std::fputs(csv.c_str(), stdout);
    return kExitOk;
}

int cmd_verify(const std::string& cert_path) {
    std::string text = read_text_file(cert_path);
    nlohmann::json j = nlohmann::json::parse(text);
    std::string schema = j.value("schema", "");
    std::string stored_hash = j.value("hash", "");
    if (stored_hash != cert_content_hash(text)) {
        std::printf("verify: FAILED (content hash mismatch)\n");
        return kExitProofFailure;
    }
    std::string why;
    bool ok = false;
    if (schema == "crossdiff-steady-certificate-v1") {
        SteadyCertificate c = steady_cert_from_json(text);
        ok = c.valid && recheck_certificate(c, &why);
        if (c.valid != ok) why = "stored validity flag disagrees with bounds";
    } else if (schema == "crossdiff-eigen-certificate-v1") {
        EigenCertificate c = eigen_cert_from_json(text);
        ok = c.valid && recheck_certificate(c, &why);
        if (c.valid != ok) why = "stored validity flag disagrees with bounds";
    } else {
        throw ConfigError("unknown certificate schema: " + schema);
    }
    std::printf("verify: %s%s%s\n", ok ? "OK" : "FAILED", ok ? "" : ": ", ok ? "" : why.c_str());
    return ok ? kExitOk : kExitProofFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigorous steady states and instability proofs for a 1-D triangular cross-diffusion system"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string candidate_file, out_path, out_dir, d_range, seed_mode = "equilibrium";
    std::string seed_d = "0.03", to_d = "0.005", gamma = "1.0001", gamma_tilde, cert_path;
    std::string config_path;
    double amp = 0.12, newton_tol = 1e-11;
    int n = 400;

    auto add_common = [&](CLI::App* c, bool with_m = true) {
        c->add_option("--config", config_path, "JSON run configuration (flags override)");
        c->add_option("--params", opts.params, "model parameters as k=v pairs");
        c->add_option("--d", opts.d, "diffusion parameter d1=d2=d (decimal string)");
        if (with_m) c->add_option("--m", opts.m, "truncation dimension for the proof");
        c->add_option("--nu", opts.nu, "sequence-space weight nu > 1 (decimal string)");
        c->add_option("--workers", opts.workers, "row-level worker count");
    };

    CLI::App* vs = app.add_subcommand("validate-steady", "prove existence near a candidate");
    add_common(vs);
    vs->add_option("--candidate", candidate_file, "candidate coefficients (JSON)");
    vs->add_option("--newton-tol", newton_tol, "residual tolerance for the Newton front end");
    vs->add_option("--out", out_path, "certificate output path");

    CLI::App* vb = app.add_subcommand("validate-branch", "sweep d and validate every point");
    add_common(vb);
    vb->add_option("--d-range", d_range, "sweep as a:b:N")->required();
    vb->add_option("--seed-mode", seed_mode, "equilibrium | k<N>-plus | k<N>-minus");
    vb->add_option("--seed-d", seed_d, "branch seeding parameter value");
    vb->add_option("--amp", amp, "seeding perturbation amplitude");
    vb->add_option("--out", out_path, "CSV output path");
    vb->add_option("--out-dir", out_dir, "directory for per-point certificates");

    CLI::App* cb = app.add_subcommand("continue-branch", "trace a branch and emit a candidate");
    add_common(cb);
    cb->add_option("--seed-mode", seed_mode, "k<N>-plus | k<N>-minus");
    cb->add_option("--seed-d", seed_d, "branch seeding parameter value");
    cb->add_option("--amp", amp, "seeding perturbation amplitude");
    cb->add_option("--to-d", to_d, "target parameter value");
    cb->add_option("--out", out_path, "candidate output path")->required();

    CLI::App* pi = app.add_subcommand("prove-instability", "prove an unstable eigenvalue");
    std::string target_lambda;
    pi->add_option("--steady-cert", cert_path, "VALID steady certificate (JSON)")->required();
    pi->add_option("--n", n, "eigen truncation dimension");
    pi->add_option("--gamma", gamma, "eigen space weight (decimal string)");
    pi->add_option("--gamma-tilde", gamma_tilde, "intermediate weight (default sqrt(gamma*nu))");
    pi->add_option("--target-lambda", target_lambda,
                   "validate the unstable eigenvalue nearest re[,im] instead of the largest");
    pi->add_option("--out", out_path, "certificate output path");

    CLI::App* ed = app.add_subcommand("export-diagram", "collect certificates into diagram data");
    ed->add_option("--dir", out_dir, "certificate directory")->required();
    ed->add_option("--out", out_path, "CSV output path");

    CLI::App* vf = app.add_subcommand("verify", "re-assert a certificate from stored bounds");
    vf->add_option("--cert", cert_path, "certificate path")->required();

    pi->add_option("--config", config_path, "JSON run configuration (flags override)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        // one JSON document per run; explicitly given flags keep precedence
        if (!config_path.empty()) {
            nlohmann::json j = nlohmann::json::parse(read_text_file(config_path));
            CLI::App* sub = app.get_subcommands().front();
            auto not_given = [&](const char* flag) {
                const CLI::Option* o = sub->get_option_no_throw(flag);
                return o == nullptr || o->count() == 0;
            };
            if (j.contains("params") && not_given("--params")) opts.params = j["params"].get<std::string>();
            if (j.contains("d") && not_given("--d")) opts.d = j["d"].get<std::string>();
            if (j.contains("m") && not_given("--m")) opts.m = j["m"].get<int>();
            if (j.contains("nu") && not_given("--nu")) opts.nu = j["nu"].get<std::string>();
            if (j.contains("n") && not_given("--n")) n = j["n"].get<int>();
            if (j.contains("gamma") && not_given("--gamma")) gamma = j["gamma"].get<std::string>();
            if (j.contains("gamma_tilde") && not_given("--gamma-tilde"))
                gamma_tilde = j["gamma_tilde"].get<std::string>();
            if (j.contains("workers") && not_given("--workers")) opts.workers = j["workers"].get<int>();
            if (j.contains("out") && not_given("--out")) out_path = j["out"].get<std::string>();
        }
        if (vs->parsed()) return cmd_validate_steady(opts, candidate_file, out_path, newton_tol);
        if (vb->parsed()) return cmd_validate_branch(opts, d_range, seed_mode, seed_d, amp, out_path, out_dir);
        if (cb->parsed()) return cmd_continue_branch(opts, seed_mode, seed_d, amp, to_d, out_path);
        if (pi->parsed()) return cmd_prove_instability(cert_path, n, gamma, gamma_tilde, target_lambda, out_path);
        if (ed->parsed()) return cmd_export_diagram(out_dir, out_path);
        if (vf->parsed()) return cmd_verify(cert_path);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const WeightOrder& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitConfig;
}
