#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MSLAB_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) res.output += buf.data();
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("list prints the experiments and exits zero") {
    const RunResult r = run_cli("list");
    REQUIRE(r.exit_code == 0);
    for (int i = 1; i <= 11; ++i)
        REQUIRE(r.output.find("E" + std::to_string(i)) != std::string::npos);
}

TEST_CASE("usage errors exit with code two") {
    REQUIRE(run_cli("").exit_code == 2);
    REQUIRE(run_cli("bogus").exit_code == 2);
    REQUIRE(run_cli("run E99 --trials 2").exit_code == 2);
    REQUIRE(run_cli("run").exit_code == 2);
    REQUIRE(run_cli("matrix --symbol \"nonsense\"").exit_code == 2);
}

TEST_CASE("run writes a deterministic report and exits zero on pass") {
    const std::string out1 = "/tmp/mslab_cli_r1.json", out2 = "/tmp/mslab_cli_r2.json";
    const RunResult r1 = run_cli("run E2 --seed 7 --trials 50 --out " + out1);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r1.output.find("pass=50") != std::string::npos);
    const RunResult r2 = run_cli("run E2 --seed 7 --trials 50 --out " + out2);
    REQUIRE(r2.exit_code == 0);
    const std::string b1 = slurp(out1), b2 = slurp(out2);
    REQUIRE_FALSE(b1.empty());
    REQUIRE(b1 == b2);

    const RunResult rep = run_cli("report " + out1);
    REQUIRE(rep.exit_code == 0);
    REQUIRE(rep.output.find("E2") != std::string::npos);

    std::ofstream bad("/tmp/mslab_cli_bad.json");
    bad << "{\"not\": \"a report\"}";
    bad.close();
    REQUIRE(run_cli("report /tmp/mslab_cli_bad.json").exit_code == 2);
    REQUIRE(run_cli("report /tmp/mslab_cli_missing.json").exit_code == 2);
}

TEST_CASE("matrix emits the pinned 2x2 compression") {
    const std::string csv = "/tmp/mslab_cli_m.csv";
    const RunResult r = run_cli(
        "matrix --theta \"zeros=0,0\" --symbol \"u:zeros=0.5; v:\" --op tto --emit-matrix " + csv);
    REQUIRE(r.exit_code == 0);

    // conj(u) with u = (z-1/2)/(1-z/2) compressed to K_{z^2}: the adjoint of
    // [[-1/2, 0], [3/4, -1/2]]
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string line1, line2;
    std::getline(in, line1);
    std::getline(in, line2);
    double a[4] = {0, 0, 0, 0}, b[4] = {0, 0, 0, 0};
    REQUIRE(std::sscanf(line1.c_str(), "%lf,%lf,%lf,%lf", &a[0], &a[1], &a[2], &a[3]) == 4);
    REQUIRE(std::sscanf(line2.c_str(), "%lf,%lf,%lf,%lf", &b[0], &b[1], &b[2], &b[3]) == 4);
    REQUIRE(std::abs(a[0] - -0.5) < 1e-10);
    REQUIRE(std::abs(a[2] - 0.75) < 1e-10);
    REQUIRE(std::abs(b[0] - 0.0) < 1e-10);
    REQUIRE(std::abs(b[2] - -0.5) < 1e-10);
    REQUIRE(std::abs(a[1]) + std::abs(a[3]) + std::abs(b[1]) + std::abs(b[3]) < 1e-10);

    // the analytic orientation gives the matrix itself
    const RunResult r2 = run_cli(
        "matrix --theta \"zeros=0,0\" --symbol \"u:; v:zeros=0.5\" --op tto --emit-matrix " + csv);
    REQUIRE(r2.exit_code == 0);
    std::ifstream in2(csv);
    std::getline(in2, line1);
    std::getline(in2, line2);
    REQUIRE(std::sscanf(line1.c_str(), "%lf,%lf,%lf,%lf", &a[0], &a[1], &a[2], &a[3]) == 4);
    REQUIRE(std::sscanf(line2.c_str(), "%lf,%lf,%lf,%lf", &b[0], &b[1], &b[2], &b[3]) == 4);
    REQUIRE(std::abs(a[0] - -0.5) < 1e-10);
    REQUIRE(std::abs(a[2] - 0.0) < 1e-10);
    REQUIRE(std::abs(b[0] - 0.75) < 1e-10);
    REQUIRE(std::abs(b[2] - -0.5) < 1e-10);
}

TEST_CASE("matrix exports the requested frame") {
    const std::string csv = "/tmp/mslab_cli_f.csv";
    const RunResult r = run_cli(
        "matrix --theta \"zeros=0,0,0\" --symbol \"u:; v:zeros=0\" --op tto --grid 256 "
        "--emit-frame " + csv);
    REQUIRE(r.exit_code == 0);
    std::ifstream in(csv);
    std::string line;
    int rows = 0;
    size_t fields = 0;
    while (std::getline(in, line)) {
        ++rows;
        fields = static_cast<size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    }
    REQUIRE(rows == 256);          // one row per grid node
    REQUIRE(fields == 2 + 3 * 2);  // node + three model-basis functions, re/im each
}
