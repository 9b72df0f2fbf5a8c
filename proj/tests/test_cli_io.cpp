// Unit tests for the CLI surface: output schemas, exit codes, manifests,
// config round trips, and the byte-identical rerun contract.  The path to
// the CLI binary arrives as argv[1].

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "betawalk/report_io.hpp"

namespace {

std::string g_cli_path;

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = "cli_stdout.tmp";
    const std::string cmd = g_cli_path + " " + args + " > " + out_file + " 2> cli_stderr.tmp";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

}  // namespace

TEST_CASE("rate command reproduces the closed-form values") {
    const RunResult r = run_cli("rate --alpha 1 --beta 1 --xi1 0.8 --seed 1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("iq").get<double>() == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(j.at("ia").get<double>() == doctest::Approx(0.19274475702175742).epsilon(1e-9));
    CHECK(j.at("lambda").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j.at("branch").get<std::string>() == "right");
}

TEST_CASE("dual command emits the full schema") {
    const RunResult r = run_cli("dual --alpha 1 --beta 2 --lambda 0.7 --seed 1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    for (const char* key : {"alpha", "beta", "xi1", "lambda", "branch", "tilt", "iq", "ia", "iq_star"})
        CHECK(j.contains(key));
}

TEST_CASE("dual at the LLN velocity reports lambda = infinity as null") {
    const RunResult r = run_cli("dual --alpha 1 --beta 1 --xi1 0.5 --seed 1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("lambda").is_null());
    CHECK(j.at("branch").get<std::string>() == "at_lln");
    CHECK(j.at("iq").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exponent reruns are byte-identical") {
    const std::string flags =
        "exponent --alpha 1 --beta 1 --xi1 0.8 --n-list 64,128,256 --replicas 50 --seed 7 "
        "--format csv -o expo_a.csv";
    REQUIRE(run_cli(flags).exit_code == 0);
    REQUIRE(run_cli("exponent --alpha 1 --beta 1 --xi1 0.8 --n-list 64,128,256 --replicas 50 "
                    "--seed 7 --format csv -o expo_b.csv")
                .exit_code == 0);
    CHECK(slurp("expo_a.csv") == slurp("expo_b.csv"));
    std::remove("expo_a.csv");
    std::remove("expo_b.csv");
    std::remove("expo_a.csv.manifest.json");
    std::remove("expo_b.csv.manifest.json");
}

TEST_CASE("variance scan CSV carries the documented header") {
    const RunResult r = run_cli(
        "exponent --alpha 1 --beta 1 --lambda 1 --n-list 64,128 --replicas 50 --seed 3 "
        "--format csv -o scan.csv");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp("scan.csv");
    CHECK(csv.rfind("N,m,n,var_log_rho,stderr,replicas\n", 0) == 0);
    std::remove("scan.csv");
    std::remove("scan.csv.manifest.json");
}

TEST_CASE("manifest records config, seed, and version") {
    REQUIRE(run_cli("variance-id --alpha 1 --beta 1 --lambda 1 --n-scale 16 --replicas 100 "
                    "--seed 11 -o vid.json")
                .exit_code == 0);
    const auto manifest = nlohmann::json::parse(slurp("vid.json.manifest.json"));
    CHECK(manifest.at("seed").get<std::uint64_t>() == 11u);
    CHECK(manifest.at("version").get<std::string>() == "1.0.0");
    CHECK(manifest.at("config").contains("alpha"));
    CHECK(manifest.at("wall_seconds").get<double>() >= 0.0);
    std::remove("vid.json");
    std::remove("vid.json.manifest.json");
}

TEST_CASE("config file round trip with flag overrides") {
    write_file("cfg.json",
               R"({"command":"rate","alpha":1.0,"beta":1.0,"xi1":0.6,"seed":5})");
    const RunResult base = run_cli("rate --config cfg.json");
    REQUIRE(base.exit_code == 0);
    const auto j0 = nlohmann::json::parse(base.output);
    CHECK(j0.at("xi1").get<double>() == doctest::Approx(0.6));

    // An explicit flag wins over the config value.
    const RunResult over = run_cli("rate --config cfg.json --xi1 0.8");
    REQUIRE(over.exit_code == 0);
    const auto j1 = nlohmann::json::parse(over.output);
    CHECK(j1.at("xi1").get<double>() == doctest::Approx(0.8));
    CHECK(j1.at("iq").get<double>() == doctest::Approx(0.2).epsilon(1e-9));
    std::remove("cfg.json");
}

TEST_CASE("exit codes: validation failures return 2") {
    CHECK(run_cli("rate --alpha 1 --beta 1 --xi1 1.7 --seed 1").exit_code == 2);
    CHECK(run_cli("rate --alpha -1 --beta 1 --xi1 0.5 --seed 1").exit_code == 2);
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("rate --no-such-flag 1").exit_code == 2);
}

TEST_CASE("selftest --quick passes within its budget") {
    const RunResult r = run_cli("selftest --quick --seed 1");
    CHECK(r.exit_code == 0);
}

TEST_CASE("empty report serializes as a header-only CSV") {
    betawalk::ExperimentReport empty;
    CHECK(betawalk::report_to_csv(empty) == "name,value,stderr\n");
}

TEST_CASE("report JSON has stable key order and 17-digit doubles") {
    betawalk::ExperimentReport rep;
    rep.name = "unit";
    rep.estimates.push_back({"x", 1.0 / 3.0, 0.0});
    const std::string a = betawalk::report_to_json(rep);
    const std::string b = betawalk::report_to_json(rep);
    CHECK(a == b);
    CHECK(betawalk::format_double(1.0 / 3.0) == "0.33333333333333331");
}

int main(int argc, char** argv) {
    if (argc > 1 && argv[1][0] != '-') g_cli_path = argv[1];
    if (g_cli_path.empty()) {
        std::fprintf(stderr, "usage: test_cli_io <path-to-cli-binary>\n");
        return 1;
    }
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv + 1);
    return ctx.run();
}
