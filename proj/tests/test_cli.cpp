// Exercises the installed front door end to end: spawns the real binary,
// parses its records, and checks exit codes, determinism, and seed plumbing.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

namespace {

std::string cli_path;

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd =
        "env -u BSL_SEED " + env_prefix + " " + cli_path + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

nlohmann::json parse_record(const std::string& text) {
    return nlohmann::json::parse(text);
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("exact count through the front door") {
    const RunResult r = run_cli("pn exact --n 2");
    REQUIRE(r.code == 0);
    const auto j = parse_record(r.out);
    CHECK(j["singular_count"] == "8");
    CHECK(j["total"] == "16");
    CHECK(j["p_exact"] == "1/2");
    CHECK(j["tolerance"] == "exact");
    CHECK(j["seed"] == 0);
    CHECK(j["config_canonical"].get<std::string>().find("command=pn.exact") !=
          std::string::npos);
}

TEST_CASE("zero sign-combination count through the front door") {
    const RunResult r = run_cli("lo count --coeffs 1,1,1,1");
    REQUIRE(r.code == 0);
    CHECK(parse_record(r.out)["count"] == "6");
}

TEST_CASE("transform bridge values through the front door") {
    const RunResult r = run_cli("fourier probs --coeffs 1,1,1,1");
    REQUIRE(r.code == 0);
    const auto j = parse_record(r.out);
    CHECK(j["p"] == 17);
    CHECK(j["p_x_exact"] == "3/8");
    CHECK(std::fabs(j["p_x"].get<double>() - 0.375) <= 1e-9);
    CHECK(j["p_x_residual"].get<double>() <= 1e-9);
}

TEST_CASE("records are byte-identical across reruns and worker counts") {
    const RunResult a = run_cli("structure scan --coeffs 1,1,1,1,1,1 --threads 1");
    const RunResult b = run_cli("structure scan --coeffs 1,1,1,1,1,1 --threads 1");
    const RunResult c = run_cli("structure scan --coeffs 1,1,1,1,1,1 --threads 4");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const RunResult d = run_cli("pn exact --n 4 --threads 1");
    const RunResult e = run_cli("pn exact --n 4 --threads 8");
    REQUIRE(d.code == 0);
    CHECK(d.out == e.out);
}

TEST_CASE("selftest passes and does not depend on the worker count") {
    const RunResult one = run_cli("selftest --threads 1");
    const RunResult eight = run_cli("selftest --threads 8");
    REQUIRE(one.code == 0);
    REQUIRE(eight.code == 0);
    CHECK(one.out == eight.out);
    const auto lines = lines_of(one.out);
    REQUIRE(!lines.empty());
    const auto summary = parse_record(lines.back());
    CHECK(summary["failures"] == 0);
    CHECK(summary["ok"] == true);
    CHECK(summary["checks"].get<int>() == static_cast<int>(lines.size()) - 1);
}

TEST_CASE("usage errors exit with code two") {
    CHECK(run_cli("pn exact").code == 2);             // missing required option
    CHECK(run_cli("no-such-command").code == 2);      // unknown subcommand
    CHECK(run_cli("pn exact --n 2 --format csv").code == 2); // csv is table-only
    CHECK(run_cli("lo erdos --coeffs 0,1").code == 2);       // zero coefficient
    CHECK(run_cli("lattice properize --basis 1,2 --lengths 5,3 --modulus 15")
              .code == 2); // composite modulus
}

TEST_CASE("resource refusals exit with code three") {
    CHECK(run_cli("pn exact --n 12").code == 3);
}

TEST_CASE("the seed flag and the environment fallback agree") {
    const RunResult flag = run_cli("pn mc --n 6 --trials 2000 --seed 123");
    const RunResult env = run_cli("pn mc --n 6 --trials 2000", "BSL_SEED=123");
    const RunResult both = run_cli("pn mc --n 6 --trials 2000 --seed 123", "BSL_SEED=1");
    REQUIRE(flag.code == 0);
    CHECK(flag.out == env.out);  // env fills in when the flag is absent
    CHECK(flag.out == both.out); // the flag wins over the env
    const RunResult other = run_cli("pn mc --n 6 --trials 2000 --seed 124");
    CHECK(flag.out != other.out);
}

TEST_CASE("a config file supplies defaults the command line can override") {
    const std::string path =
        "/tmp/bsl_cli_test_" + std::to_string(getpid()) + ".ini";
    {
        std::ofstream f(path);
        f << "seed=55\n";
    }
    const RunResult from_file =
        run_cli("pn mc --n 5 --trials 500 --config " + path);
    const RunResult from_flag = run_cli("pn mc --n 5 --trials 500 --seed 55");
    std::remove(path.c_str());
    REQUIRE(from_file.code == 0);
    CHECK(from_file.out == from_flag.out);
}

TEST_CASE("csv table output carries a comment header and aligned rows") {
    const RunResult r = run_cli("pn report --n-max 4 --format csv");
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() >= 6); // comment, header, four rows
    CHECK(lines[0].rfind("# tool_version=", 0) == 0);
    CHECK(lines[1].rfind("n,exact_available,", 0) == 0);
    CHECK(lines[2].rfind("1,", 0) == 0);
    CHECK(lines[5].rfind("4,", 0) == 0);
}

TEST_CASE("human format renders key-value lines") {
    const RunResult r = run_cli("pn exact --n 2 --format human");
    REQUIRE(r.code == 0);
    CHECK(r.out.find('{') == std::string::npos);
    CHECK(r.out.find("p_exact") != std::string::npos);
}

TEST_CASE("the progression scan alias and the structure scan emit the same bytes") {
    const RunResult a = run_cli("gap scan --coeffs 1,1,1,1");
    const RunResult b = run_cli("structure scan --coeffs 1,1,1,1");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

int main(int argc, char** argv) {
    doctest::Context ctx;
    std::vector<char*> pass{argv[0]};
    for (int i = 1; i < argc; ++i) {
        if (cli_path.empty() && argv[i][0] != '-') {
            cli_path = argv[i];
        } else {
            pass.push_back(argv[i]);
        }
    }
    if (cli_path.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-cli> [doctest options]\n");
        return 2;
    }
    ctx.applyCommandLine(static_cast<int>(pass.size()), pass.data());
    return ctx.run();
}
