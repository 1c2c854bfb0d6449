// test_cli.cpp — command-line dispatch, output formats and run manifests

#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using qtrans::cli::parse_and_dispatch;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = parse_and_dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qt_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("plan-transfer reproduces the 10 GHz / 10 kHz plan") {
    const auto r = run({"plan-transfer", "--omega-hz", "1e10", "--lambda-hz", "1e4"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["kappa"] == 2048);
    CHECK(doc["m"] == 32);
    CHECK(doc["c2"] == 15625);
    CHECK(doc["j"] == 7812);
    CHECK(doc["j_prime"] == 0);
}

TEST_CASE("plan-transfer with an odd reduced denominator is a domain error") {
    const auto r = run({"plan-transfer", "--omega-rad", "3", "--lambda-rad", "1"});
    CHECK(r.code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("no odd-ratio solution (reduced denominator is odd)") != std::string::npos);
}

TEST_CASE("mixed Hz and rad/s inputs are refused") {
    const auto r = run({"plan-transfer", "--omega-hz", "1e10", "--lambda-rad", "1e4"});
    CHECK(r.code == 1);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"no-such-command"}).code == 2);
    CHECK(run({"spectrum", "--no-such-flag"}).code == 2);
    CHECK(run({"spectrum", "--N", "abc"}).code == 2);
    CHECK(run({"fidelity-map", "--panel", "temperature=3"}).code == 2);
    CHECK(run({"fidelity-map", "--gamma-over-lambda", "0:1"}).code == 2);
    CHECK(run({"fidelity", "--kappa", "2", "--nbar", "0.1"}).code == 2);
    const auto r = run({"spectrum", "--json", "--csv"});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("help and version exit cleanly") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--version"}).code == 0);
    CHECK(run({"fidelity-map", "--help"}).code == 0);
}

TEST_CASE("fidelity-map writes the panel CSV and a manifest") {
    const auto csv = scratch("fig2.csv");
    const auto r = run({"fidelity-map", "--panel", "kbt-over-hnu=0.5", "--gamma-over-lambda", "0:1:100", "--kappa",
                        "1:60", "--out", csv.string()});
    REQUIRE(r.code == 0);
    const std::string text = slurp(csv);
    CHECK(text.rfind("gamma_over_lambda,kBT_over_hnu,kappa,nbar,fbar\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 100 * 60);
    CHECK(text.find('\r') == std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(csv.string() + ".manifest.json"));
    CHECK(manifest["subcommand"] == "fidelity-map");
    CHECK(manifest["config"]["panel"] == "kbt-over-hnu=0.5");
    CHECK(manifest["config"]["measure"] == "alpha-uniform");
    CHECK(manifest["outputs"].size() == 1);
    CHECK(manifest.contains("version"));
    CHECK(manifest["wall_clock_seconds"].get<double>() >= 0.0);
}

TEST_CASE("re-running from a manifest reproduces the CSV byte for byte") {
    const auto first = scratch("first.csv");
    const auto second = scratch("second.csv");
    REQUIRE(run({"fidelity-map", "--panel", "kappa=7", "--gamma-over-lambda", "0:0.5:11", "--kbt-over-hnu",
                 "0:1.5:13", "--measure", "haar", "--out", first.string()})
                .code == 0);
    // Flags given next to --config are overridden by the manifest.
    REQUIRE(run({"fidelity-map", "--config", first.string() + ".manifest.json", "--panel", "kappa=3", "--out",
                 second.string()})
                .code == 0);
    CHECK(slurp(first) == slurp(second));
    CHECK_FALSE(slurp(first).empty());
}

TEST_CASE("config keys must name options of the subcommand") {
    const auto cfg = scratch("bad.json");
    std::ofstream(cfg) << R"({"kappa": 3, "flux": 1})";
    CHECK(run({"spectrum", "--config", cfg.string()}).code == 2);
    CHECK(run({"spectrum", "--config", scratch("missing.json").string()}).code == 2);
}

TEST_CASE("fidelity-map output does not depend on the worker count") {
    const std::vector<std::string> base{"fidelity-map", "--panel", "kbt-over-hnu=0.5", "--gamma-over-lambda",
                                        "0:1:40", "--kappa", "1:25"};
    auto with = [&](const char* k) {
        auto args = base;
        args.insert(args.end(), {"--workers", k});
        return run(args);
    };
    const auto one = with("1");
    REQUIRE(one.code == 0);
    for (const char* k : {"2", "3", "8"}) CHECK(with(k).out == one.out);
}

TEST_CASE("out-of-range thermal rows warn on stderr") {
    const auto r = run({"fidelity-map", "--panel", "kappa=2", "--gamma-over-lambda", "0.1", "--kbt-over-hnu",
                        "0:3:4"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
}

TEST_CASE("spectrum and evolve emit both formats") {
    const std::vector<std::string> net{"--omega", "1", "--lambda", "0.05", "--N", "3", "--kappa", "1", "--delta",
                                       "2"};
    auto args = net;
    args.insert(args.begin(), "spectrum");
    auto j = args;
    j.push_back("--json");
    const auto rj = run(j);
    REQUIRE(rj.code == 0);
    CHECK(nlohmann::json::parse(rj.out)["eigenvalues"].size() == 5);

    auto c = args;
    c.push_back("--csv");
    const auto rc = run(c);
    REQUIRE(rc.code == 0);
    CHECK(std::count(rc.out.begin(), rc.out.end(), '\n') == 6);

    auto e = net;
    e.insert(e.begin(), "evolve");
    e.insert(e.end(), {"--times", "0:10:5", "--alpha", "0.6"});
    const auto re = run(e);
    REQUIRE(re.code == 0);
    CHECK(re.out.rfind("t,p_s,p_d,", 0) == 0);
    CHECK(std::count(re.out.begin(), re.out.end(), '\n') == 6);
}

TEST_CASE("block-check and design-gate") {
    const auto b = run({"block-check", "--lambda", "1e-4", "--N", "4", "--kappa", "0", "--delta", "1"});
    REQUIRE(b.code == 0);
    CHECK(nlohmann::json::parse(b.out)["in_blocking_regime"] == true);

    const auto g = run({"design-gate", "--phi", "1.5707963267948966", "--lambda", "1", "--kappa", "1"});
    REQUIRE(g.code == 0);
    const auto plan = nlohmann::json::parse(g.out);
    CHECK(plan["solved"] == "omega");
    CHECK(plan["ell"] == 1);

    const auto partial = std::vector<std::string>{"design-gate", "--phi", "1.5707963267948966", "--lambda", "1",
                                                  "--kappa", "1", "--N", "3", "--delta", "0.5"};
    CHECK(run(partial).code == 1);
    auto allowed = partial;
    allowed.push_back("--allow-partial-bus");
    CHECK(run(allowed).code == 0);
}

TEST_CASE("fidelity and optimal-kappa") {
    const auto f = run({"fidelity", "--kappa", "4", "--gamma-over-lambda", "0", "--nbar", "0.2"});
    REQUIRE(f.code == 0);
    CHECK(nlohmann::json::parse(f.out)["fbar"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(run({"fidelity", "--kappa", "4", "--x", "0.1", "--nbar", "2"}).code == 1);

    const auto o = run({"optimal-kappa", "--gamma-over-lambda", "0.1", "--kbt-over-hnu", "0.5"});
    REQUIRE(o.code == 0);
    CHECK(nlohmann::json::parse(o.out)["kappa_star"] == 6);
}

TEST_CASE("range syntax") {
    using qtrans::cli::parse_int_range;
    using qtrans::cli::parse_linspace;
    const auto v = parse_linspace("0:1:5");
    REQUIRE(v.size() == 5);
    CHECK(v[1] == 0.25);
    CHECK(v.back() == 1.0);
    CHECK(parse_linspace("0.3") == std::vector<double>{0.3});
    CHECK(parse_int_range("3:6") == std::vector<int>{3, 4, 5, 6});
    CHECK_THROWS(parse_linspace("0:1:0"));
    CHECK_THROWS(parse_int_range("5:2"));
}
