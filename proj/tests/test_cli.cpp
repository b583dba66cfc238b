#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "crossdiff/certio.hpp"
#include "crossdiff/numerics.hpp"

using namespace crossdiff;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(CROSSDIFF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path work_dir() {
    fs::path p = fs::temp_directory_path() / "crossdiff_cli_test";
    fs::create_directories(p);
    return p;
}

SteadyCertificate make_valid_cert() {
    ModelParams params = ModelParams::reference_set("0.01");
    NewtonConfig ncfg;
    ncfg.m = 110;
    SteadyCandidate cand = newton_steady(equilibrium_candidate(params), params, ncfg).x;
    return validate_steady(cand, params, 110, Weight(interval_from_decimal("1.06")), "1.06");
}

const SteadyCertificate& valid_cert() {
    static SteadyCertificate c = make_valid_cert();
    return c;
}

} // namespace

TEST_CASE("steady certificate round trips bit-exactly") {
    SteadyCertificate c = valid_cert();
    std::string doc = steady_cert_to_json(c);
    SteadyCertificate back = steady_cert_from_json(doc);
    CHECK(back.Y.lo == c.Y.lo);
    CHECK(back.Y.hi == c.Y.hi);
    CHECK(back.Z1.hi == c.Z1.hi);
    CHECK(back.r_star == c.r_star);
    CHECK(back.margin_v.lo == c.margin_v.lo);
    CHECK(back.candidate.v == c.candidate.v);
    CHECK(back.valid == c.valid);
    CHECK(back.params.source == c.params.source);

    // determinism: identical inputs give identical documents up to timestamp
    std::string doc2 = steady_cert_to_json(c);
    CHECK(cert_content_hash(doc) == cert_content_hash(doc2));
}

TEST_CASE("hash detects tampering") {
    std::string doc = steady_cert_to_json(valid_cert());
    std::string bent = doc;
    auto pos = bent.find("\"r_star\"");
    REQUIRE(pos != std::string::npos);
    bent[pos + 12] = '9';
    CHECK(cert_content_hash(bent) != cert_content_hash(doc));
}

TEST_CASE("candidate files round trip") {
    SteadyCandidate c;
    c.v = {0.125, -1e-3};
    c.w = {0.61, 2e-4};
    c.p = {2.63, 1e-5};
    c.s = {0.0, 3e-3};
    std::string doc = candidate_to_json(c, 0.005, 64);
    double d = 0;
    int m = 0;
    SteadyCandidate back = candidate_from_json(doc, &d, &m);
    CHECK(back.v == c.v);
    CHECK(back.s == c.s);
    CHECK(d == 0.005);
    CHECK(m == 64);
}

TEST_CASE("cli validates, writes and verifies a certificate") {
    fs::path dir = work_dir();
    fs::path cert = dir / "steady_ok.json";
    int rc = run_cli("validate-steady --d 0.01 --m 110 --nu 1.06 --out " + cert.string());
    CHECK(rc == 0);
    REQUIRE(fs::exists(cert));
    CHECK(run_cli("verify --cert " + cert.string()) == 0);

    // tampering breaks verification
    std::string text = read_text_file(cert.string());
    auto pos = text.find("\"valid\": true");
    if (pos == std::string::npos) pos = text.find("\"valid\":true");
    REQUIRE(pos != std::string::npos);
    write_text_file((dir / "tampered.json").string(),
                    text.replace(pos, 14, "\"valid\": false"));
    CHECK(run_cli("verify --cert " + (dir / "tampered.json").string()) != 0);
}

TEST_CASE("cli exit codes distinguish failure classes") {
    fs::path dir = work_dir();
    // config rejection before any computation
    CHECK(run_cli("validate-steady --d 0.01 --m 20 --nu 0.9") == 1);
    // proof failure (truncation too short for the constraint tail)
    CHECK(run_cli("validate-steady --d 0.01 --m 50 --nu 1.06") == 10);
    // usage error
    CHECK(run_cli("no-such-command") == 1);
    CHECK(run_cli("prove-instability") == 1);
    // stale/invalid upstream certificate is a config error
    write_text_file((dir / "garbage.json").string(), "{\"schema\":\"nope\"}\n");
    CHECK(run_cli("verify --cert " + (dir / "garbage.json").string()) != 0);
}

TEST_CASE("cli branch sweep emits a CSV with one row per point") {
    fs::path dir = work_dir();
    fs::path csv = dir / "branch.csv";
    int rc = run_cli("validate-branch --d-range 0.02:0.05:4 --m 110 --nu 1.06 --seed-mode equilibrium --out " +
                     csv.string());
    CHECK(rc == 0);
    std::ifstream f(csv);
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "d,v0,radius,status");
    int rows = 0;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) {
            ++rows;
            CHECK(line.find("VALID") != std::string::npos);
            CHECK(line.find("0.125") != std::string::npos);
        }
    CHECK(rows == 4);

    // empty range: header-only file, success
    fs::path empty_csv = dir / "empty.csv";
    CHECK(run_cli("validate-branch --d-range 0.02:0.05:0 --m 16 --out " + empty_csv.string()) == 0);
    std::ifstream ef(empty_csv);
    std::getline(ef, header);
    CHECK(header == "d,v0,radius,status");
    CHECK(!std::getline(ef, line));
}

TEST_CASE("cli instability round trip with hash integrity") {
    fs::path dir = work_dir();
    fs::path scert = dir / "steady_d005.json";
    REQUIRE(run_cli("validate-steady --d 0.005 --m 110 --nu 1.06 --out " + scert.string()) == 0);

    fs::path ecert = dir / "eigen_d005.json";
    int rc = run_cli("prove-instability --steady-cert " + scert.string() + " --n 48 --gamma 1.0001 --out " +
                     ecert.string());
    CHECK(rc == 0);
    REQUIRE(fs::exists(ecert));
    CHECK(run_cli("verify --cert " + ecert.string()) == 0);
    EigenCertificate ec = eigen_cert_from_json(read_text_file(ecert.string()));
    CHECK(ec.steady_hash == cert_content_hash(read_text_file(scert.string())));

    // stale reference: a different steady certificate does not match
    fs::path other = dir / "steady_other.json";
    REQUIRE(run_cli("validate-steady --d 0.012 --m 110 --nu 1.06 --out " + other.string()) == 0);
    CHECK(ec.steady_hash != cert_content_hash(read_text_file(other.string())));

    // no-unstable path: the stable homogeneous state at d = 0.06
    fs::path scert2 = dir / "steady_d06.json";
    REQUIRE(run_cli("validate-steady --d 0.06 --m 110 --nu 1.06 --out " + scert2.string()) == 0);
    fs::path marker = dir / "nounstable_d06.json";
    CHECK(run_cli("prove-instability --steady-cert " + scert2.string() + " --n 48 --out " +
                  marker.string()) == 20);

    // diagram export sees all three outcomes
    fs::path diagram = dir / "diagram.csv";
    CHECK(run_cli("export-diagram --dir " + dir.string() + " --out " + diagram.string()) == 0);
    std::string csv = read_text_file(diagram.string());
    CHECK(csv.find("d,v0,status") == 0);
    CHECK(csv.find("proved+unstable") != std::string::npos);
    CHECK(csv.find("proved+no-unstable-found") != std::string::npos);
}

TEST_CASE("diagram export of an empty directory is header-only") {
    fs::path dir = work_dir() / "empty_dir";
    fs::create_directories(dir);
    fs::path out = work_dir() / "empty_diagram.csv";
    CHECK(run_cli("export-diagram --dir " + dir.string() + " --out " + out.string()) == 0);
    CHECK(read_text_file(out.string()) == "d,v0,status\n");
}
