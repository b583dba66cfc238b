#include "crossdiff/certio.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace crossdiff {

using nlohmann::json;

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json interval_to_json(const Interval& a) {
    return json::array({double_to_string(a.lo), double_to_string(a.hi)});
}

Interval interval_from_json(const json& j) {
    double lo, hi;
    if (!parse_double_exact(j.at(0).get<std::string>(), lo) ||
        !parse_double_exact(j.at(1).get<std::string>(), hi))
        throw ConfigError("bad interval in certificate");
    return {lo, hi};
}

json dvec_to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(double_to_string(x));
    return a;
}

std::vector<double> dvec_from_json(const json& j) {
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) {
        double x;
        if (!parse_double_exact(e.get<std::string>(), x)) throw ConfigError("bad number in certificate");
        v.push_back(x);
    }
    return v;
}

json params_to_json(const ModelParams& p) {
    const char* names[9] = {"r1", "r2", "a1", "a2", "b1", "b2", "d12", "d1", "d2"};
    json j;
    for (int i = 0; i < 9; ++i) j[names[i]] = p.source[static_cast<size_t>(i)];
    return j;
}

ModelParams params_from_json(const json& j) {
    const char* names[9] = {"r1", "r2", "a1", "a2", "b1", "b2", "d12", "d1", "d2"};
    std::array<std::string, 9> s;
    for (int i = 0; i < 9; ++i) s[static_cast<size_t>(i)] = j.at(names[i]).get<std::string>();
    return ModelParams::from_strings(s);
}

std::string timestamp_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string finalize_document(json j) {
    j.erase("timestamp");
    j.erase("hash");
    std::string canonical = j.dump();
    j["hash"] = fnv1a_hex(canonical);
    j["timestamp"] = timestamp_now();
    return j.dump(2) + "\n";
}

} // namespace

std::string cert_content_hash(const std::string& json_text) {
    json j = json::parse(json_text);
    j.erase("timestamp");
    j.erase("hash");
    return fnv1a_hex(j.dump());
}

std::string steady_cert_to_json(const SteadyCertificate& cert) {
    json j;
    j["schema"] = "crossdiff-steady-certificate-v1";
    j["params"] = params_to_json(cert.params);
    j["m"] = cert.m;
    j["nu"] = cert.nu_string;
    j["Y"] = interval_to_json(cert.Y);
    j["Z0"] = interval_to_json(cert.Z0);
    j["Z1"] = interval_to_json(cert.Z1);
    j["Z2"] = json::array({interval_to_json(cert.Z2_coeffs[0]), interval_to_json(cert.Z2_coeffs[1]),
                           interval_to_json(cert.Z2_coeffs[2])});
    j["radius_found"] = cert.radius_found;
    j["r_star"] = double_to_string(cert.r_star);
    j["r_min"] = double_to_string(cert.r_min);
    j["r_max"] = double_to_string(cert.r_max);
    j["margin_v"] = interval_to_json(cert.margin_v);
    j["margin_w"] = interval_to_json(cert.margin_w);
    j["u_error"] = interval_to_json(cert.u_err);
    j["v0"] = double_to_string(cert.v_at_zero);
    j["candidate"] = {{"v", dvec_to_json(cert.candidate.v)},
                      {"w", dvec_to_json(cert.candidate.w)},
                      {"p", dvec_to_json(cert.candidate.p)},
                      {"s", dvec_to_json(cert.candidate.s)}};
    j["tainted"] = cert.tainted;
    j["valid"] = cert.valid;
    j["failure"] = cert.failure;
    j["timestamp"] = "";
    j["hash"] = "";
    return finalize_document(std::move(j));
}

SteadyCertificate steady_cert_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "crossdiff-steady-certificate-v1")
        throw ConfigError("not a steady certificate");
    SteadyCertificate c;
    c.params = params_from_json(j.at("params"));
    c.m = j.at("m").get<int>();
    c.nu_string = j.at("nu").get<std::string>();
    c.Y = interval_from_json(j.at("Y"));
    c.Z0 = interval_from_json(j.at("Z0"));
    c.Z1 = interval_from_json(j.at("Z1"));
    for (int i = 0; i < 3; ++i) c.Z2_coeffs[static_cast<size_t>(i)] = interval_from_json(j.at("Z2").at(i));
    c.radius_found = j.at("radius_found").get<bool>();
    parse_double_exact(j.at("r_star").get<std::string>(), c.r_star);
    parse_double_exact(j.at("r_min").get<std::string>(), c.r_min);
    parse_double_exact(j.at("r_max").get<std::string>(), c.r_max);
    c.margin_v = interval_from_json(j.at("margin_v"));
    c.margin_w = interval_from_json(j.at("margin_w"));
    c.u_err = interval_from_json(j.at("u_error"));
    parse_double_exact(j.at("v0").get<std::string>(), c.v_at_zero);
    c.candidate.v = dvec_from_json(j.at("candidate").at("v"));
    c.candidate.w = dvec_from_json(j.at("candidate").at("w"));
    c.candidate.p = dvec_from_json(j.at("candidate").at("p"));
    c.candidate.s = dvec_from_json(j.at("candidate").at("s"));
    c.tainted = j.at("tainted").get<bool>();
    c.valid = j.at("valid").get<bool>();
    c.failure = j.at("failure").get<std::string>();
    return c;
}

std::string eigen_cert_to_json(const EigenCertificate& cert) {
    json j;
    j["schema"] = "crossdiff-eigen-certificate-v1";
    j["params"] = params_to_json(cert.params);
    j["n"] = cert.n;
    j["k0"] = cert.k0;
    j["gamma"] = cert.gamma_string;
    j["gamma_tilde"] = cert.gamma_tilde_string;
    j["Y"] = interval_to_json(cert.Y);
    j["Z0"] = interval_to_json(cert.Z0);
    j["Z1"] = interval_to_json(cert.Z1);
    j["Z2"] = interval_to_json(cert.Z2);
    j["radius_found"] = cert.radius_found;
    j["r_star"] = double_to_string(cert.r_star);
    j["r_min"] = double_to_string(cert.r_min);
    j["r_max"] = double_to_string(cert.r_max);
    j["lambda_re"] = double_to_string(cert.lambda.real());
    j["lambda_im"] = double_to_string(cert.lambda.imag());
    j["re_margin"] = interval_to_json(cert.re_margin);
    std::vector<double> xr, xi, er, ei;
    for (auto z : cert.xi) { xr.push_back(z.real()); xi.push_back(z.imag()); }
    for (auto z : cert.eta) { er.push_back(z.real()); ei.push_back(z.imag()); }
    j["xi_re"] = dvec_to_json(xr);
    j["xi_im"] = dvec_to_json(xi);
    j["eta_re"] = dvec_to_json(er);
    j["eta_im"] = dvec_to_json(ei);
    j["steady_hash"] = cert.steady_hash;
    j["tainted"] = cert.tainted;
    j["valid"] = cert.valid;
    j["failure"] = cert.failure;
    j["timestamp"] = "";
    j["hash"] = "";
    return finalize_document(std::move(j));
}

EigenCertificate eigen_cert_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "crossdiff-eigen-certificate-v1")
        throw ConfigError("not an eigen certificate");
    EigenCertificate c;
    c.params = params_from_json(j.at("params"));
    c.n = j.at("n").get<int>();
    c.k0 = j.at("k0").get<int>();
    c.gamma_string = j.at("gamma").get<std::string>();
    c.gamma_tilde_string = j.at("gamma_tilde").get<std::string>();
    c.Y = interval_from_json(j.at("Y"));
    c.Z0 = interval_from_json(j.at("Z0"));
    c.Z1 = interval_from_json(j.at("Z1"));
    c.Z2 = interval_from_json(j.at("Z2"));
    c.radius_found = j.at("radius_found").get<bool>();
    parse_double_exact(j.at("r_star").get<std::string>(), c.r_star);
    parse_double_exact(j.at("r_min").get<std::string>(), c.r_min);
    parse_double_exact(j.at("r_max").get<std::string>(), c.r_max);
    double lre, lim;
    parse_double_exact(j.at("lambda_re").get<std::string>(), lre);
    parse_double_exact(j.at("lambda_im").get<std::string>(), lim);
    c.lambda = {lre, lim};
    c.re_margin = interval_from_json(j.at("re_margin"));
    std::vector<double> xr = dvec_from_json(j.at("xi_re")), xi = dvec_from_json(j.at("xi_im"));
    std::vector<double> er = dvec_from_json(j.at("eta_re")), ei = dvec_from_json(j.at("eta_im"));
    for (size_t i = 0; i < xr.size(); ++i) c.xi.emplace_back(xr[i], xi[i]);
    for (size_t i = 0; i < er.size(); ++i) c.eta.emplace_back(er[i], ei[i]);
    c.steady_hash = j.at("steady_hash").get<std::string>();
    c.tainted = j.at("tainted").get<bool>();
    c.valid = j.at("valid").get<bool>();
    c.failure = j.at("failure").get<std::string>();
    return c;
}

std::string candidate_to_json(const SteadyCandidate& cand, double d, int m) {
    json j;
    j["schema"] = "crossdiff-candidate-v1";
    j["d"] = double_to_string(d);
    j["m"] = m;
    j["v"] = dvec_to_json(cand.v);
    j["w"] = dvec_to_json(cand.w);
    j["p"] = dvec_to_json(cand.p);
    j["s"] = dvec_to_json(cand.s);
    return j.dump(2) + "\n";
}

SteadyCandidate candidate_from_json(const std::string& text, double* d, int* m) {
    json j = json::parse(text);
    SteadyCandidate c;
    c.v = dvec_from_json(j.at("v"));
    c.w = dvec_from_json(j.at("w"));
    c.p = dvec_from_json(j.at("p"));
    c.s = dvec_from_json(j.at("s"));
    if (d && j.contains("d")) parse_double_exact(j.at("d").get<std::string>(), *d);
    if (m && j.contains("m")) *m = j.at("m").get<int>();
    return c;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace crossdiff
