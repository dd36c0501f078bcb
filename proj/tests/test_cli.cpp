// End-to-end checks of the command-line tool. The binary path arrives as the
// last argv entry (wired up by CTest).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe))
        r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("predict reproduces the reference operating point") {
    fs::path dir = fs::temp_directory_path() / "advdist_cli_predict";
    fs::remove_all(dir);
    auto r = run("predict --T 1e-3 --q 1024 --alpha -0.55 --gamma 1.45 "
                 "--sigma-x2 134 --n 41 --out " + dir.string());
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp(dir / "predict.json"));
    CHECK(std::fabs(j["skr"].get<double>() / 0.00095 - 1.0) < 0.15);
    CHECK(std::fabs(j["p_ta"].get<double>() / 0.038 - 1.0) < 0.15);
    CHECK(j["n"].get<int>() == 41);
    CHECK(fs::exists(dir / "manifest.json"));

    // negative rate below unit code rate
    auto neg = run("predict --T 1e-3 --q 1024 --alpha -0.55 --gamma 0.5 --sigma-x2 134");
    CHECK(neg.exit_code == 0);
    CHECK(neg.out.find("SKR          -") != std::string::npos);
}

TEST_CASE("mc output is byte-identical across runs with the same seed") {
    fs::path d1 = fs::temp_directory_path() / "advdist_cli_mc1";
    fs::path d2 = fs::temp_directory_path() / "advdist_cli_mc2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    const std::string flags =
        "mc --T 1e-3 --q 64 --alpha -0.4 --gamma 1.2 --sigma-x2 134 --n 16 "
        "--trials 3000 --seed 42 --threads 2 --out ";
    auto r1 = run(flags + d1.string());
    auto r2 = run(flags + d2.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    const std::string t1 = slurp(d1 / "mc_tally.json");
    const std::string t2 = slurp(d2 / "mc_tally.json");
    CHECK(!t1.empty());
    CHECK(t1 == t2);
    CHECK(r1.out.find("z = ") != std::string::npos);
}

TEST_CASE("degenerate threshold rejects everything with a warning") {
    auto r = run("mc --T 1e-3 --q 16 --alpha -99 --gamma 1.2 --sigma-x2 134 --n 8 "
                 "--trials 200 --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("warning: no accepted trials") != std::string::npos);
}

TEST_CASE("validation failures exit with code 2") {
    CHECK(run("predict --T 1.5 --q 1024").exit_code == 2);
    CHECK(run("predict --q 1024").exit_code == 2);          // no T or distance
    CHECK(run("predict --T 1e-3 --q 1").exit_code == 2);    // q below range
    CHECK(run("reproduce --target fig9").exit_code == 2);   // unknown target
    CHECK(run("bogus-subcommand").exit_code == 2);
}

TEST_CASE("landscape csv has the documented schema") {
    fs::path dir = fs::temp_directory_path() / "advdist_cli_land";
    fs::remove_all(dir);
    auto r = run("landscape --T 1e-3 --q 1024 --sigma-x2 163 "
                 "--alpha-min -0.8 --alpha-max -0.4 --alpha-steps 3 "
                 "--gamma-min 1.2 --gamma-max 1.6 --gamma-steps 3 --out " +
                 dir.string());
    CHECK(r.exit_code == 0);
    std::istringstream csv(slurp(dir / "landscape.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "alpha,gamma,sigma_x2,n,p_ta,p_fa,ser,skr");
    int rows = 0;
    std::string line;
    while (std::getline(csv, line))
        if (!line.empty())
            ++rows;
    CHECK(rows == 9);
}

TEST_CASE("reproduce fig5 emits a csv and a passing report") {
    fs::path dir = fs::temp_directory_path() / "advdist_cli_fig5";
    fs::remove_all(dir);
    auto r = run("reproduce --target fig5 --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("fig5: PASS") != std::string::npos);
    CHECK(r.out.find("KNOWN-DEVIATION") != std::string::npos);
    auto j = nlohmann::json::parse(slurp(dir / "fig5_report.json"));
    CHECK(j["pass"].get<bool>());
    std::istringstream csv(slurp(dir / "fig5.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "beta,max_f,argmax_x");
}

TEST_CASE("distance flag converts to transmission") {
    auto r = run("predict --distance-km 136 --q 1024 --alpha -0.55 --gamma 1.45 "
                 "--sigma-x2 134");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("T            0.00101") != std::string::npos);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli [doctest options] <cli-binary>\n");
        return 1;
    }
    g_cli_path = argv[argc - 1];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv);
    return ctx.run();
}
