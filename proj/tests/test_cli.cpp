#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string output; // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const fs::path dir = fs::temp_directory_path() / "minar_cli_tests";
    fs::create_directories(dir);
    const fs::path log = dir / "out.log";
    const std::string cmd =
        std::string(MINAR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

fs::path sandbox() {
    const fs::path dir = fs::temp_directory_path() / "minar_cli_tests";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kTrivariateModel = R"({"n": 3,
  "A": [0.3, 0.1, 0.2, 0.2, 0.4, 0.2, 0.3, 0.2, 0.2],
  "innovations": {"mode": "constant", "lambda": [1.0, 1.0, 1.0]}})";

} // namespace

TEST_CASE("cli: usage errors exit 1") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("simulate").code == 1);          // missing required flags
    CHECK(run_cli("frobnicate --x 1").code == 1);  // unknown subcommand
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("cli: simulate is deterministic and honors the format") {
    const auto dir = sandbox();
    write_file(dir / "m1.json",
               R"({"n":1,"A":[0.0],"innovations":{"mode":"constant","lambda":[1.0]}})");
    const std::string out1 = (dir / "s1.csv").string();
    const std::string out2 = (dir / "s2.csv").string();
    const std::string base = "simulate --model " + (dir / "m1.json").string() +
                             " --length 5 --seed 7 --out ";
    REQUIRE(run_cli(base + out1).code == 0);
    REQUIRE(run_cli(base + out2).code == 0);
    const std::string text = slurp(out1);
    CHECK(text == slurp(out2));
    // Header plus 5 rows.
    CHECK(text.rfind("t,x1\n", 0) == 0);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 6);

    write_file(dir / "m3.json", kTrivariateModel);
    const std::string s3 = (dir / "s3.csv").string();
    REQUIRE(run_cli("simulate --model " + (dir / "m3.json").string() +
                    " --length 200 --seed 11 --out " + s3)
                .code == 0);
    CHECK(slurp(s3).rfind("t,x1,x2,x3\n", 0) == 0);
}

TEST_CASE("cli: MINAR_SEED provides the default seed, flags win") {
    const auto dir = sandbox();
    write_file(dir / "m1.json",
               R"({"n":1,"A":[0.0],"innovations":{"mode":"constant","lambda":[1.0]}})");
    auto run_env = [&](const std::string& env, const std::string& out) {
        const std::string cmd = env + " " + MINAR_CLI_PATH + " simulate --model " +
                                (dir / "m1.json").string() + " --length 20 --out " + out +
                                " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    REQUIRE(run_env("MINAR_SEED=777", (dir / "e1.csv").string()) == 0);
    REQUIRE(run_env("MINAR_SEED=777", (dir / "e2.csv").string()) == 0);
    REQUIRE(run_env("MINAR_SEED=778", (dir / "e3.csv").string()) == 0);
    CHECK(slurp(dir / "e1.csv") == slurp(dir / "e2.csv"));
    CHECK(slurp(dir / "e1.csv") != slurp(dir / "e3.csv"));

    // An explicit --seed overrides the environment.
    const std::string cmd = std::string("MINAR_SEED=777 ") + MINAR_CLI_PATH +
                            " simulate --model " + (dir / "m1.json").string() +
                            " --length 20 --seed 778 --out " + (dir / "e4.csv").string() +
                            " > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(dir / "e4.csv") == slurp(dir / "e3.csv"));
}

TEST_CASE("cli: invalid model file exits 2") {
    const auto dir = sandbox();
    write_file(dir / "bad.json", "{\"n\": 2}");
    const auto r = run_cli("simulate --model " + (dir / "bad.json").string() +
                           " --length 5 --out " + (dir / "x.csv").string());
    CHECK(r.code == 2);
    CHECK_FALSE(fs::exists(dir / "x.csv"));
    CHECK(run_cli("simulate --model /nonexistent.json --length 5 --out " +
                  (dir / "y.csv").string())
              .code == 2);
}

TEST_CASE("cli: fit round trip and malformed CSV handling") {
    const auto dir = sandbox();
    write_file(dir / "m3.json", kTrivariateModel);
    const std::string data = (dir / "train.csv").string();
    REQUIRE(run_cli("simulate --model " + (dir / "m3.json").string() +
                    " --length 150 --seed 5 --out " + data)
                .code == 0);

    const std::string fit_path = (dir / "fit.json").string();
    const auto r = run_cli("fit --data " + data + " --out " + fit_path);
    REQUIRE(r.code == 0);
    CHECK(r.output.find("alpha_11") != std::string::npos);
    CHECK(r.output.find("lambda_3") != std::string::npos);
    CHECK(fs::exists(fit_path));

    // Diagonal layout exposes n + n parameters.
    const auto rd =
        run_cli("fit --data " + data + " --layout diagonal --out " + (dir / "fitd.json").string());
    REQUIRE(rd.code == 0);
    CHECK(rd.output.find("alpha_11") != std::string::npos);
    CHECK(rd.output.find("alpha_12") == std::string::npos);

    // Malformed row: wrong field count.
    write_file(dir / "broken.csv", "t,x1,x2,x3\n1,1,2,3\n2,4,5\n");
    const auto rb =
        run_cli("fit --data " + (dir / "broken.csv").string() + " --out " +
                (dir / "nope.json").string());
    CHECK(rb.code == 2);
    CHECK_FALSE(fs::exists(dir / "nope.json"));
}

TEST_CASE("cli: monitor flags an injected outbreak and stays quiet on zeros") {
    const auto dir = sandbox();
    write_file(dir / "m3.json", kTrivariateModel);

    // All-zero operational file: conditioning row + 3 monitored rows.
    write_file(dir / "zeros.csv", "t,x1,x2,x3\n1,0,0,0\n2,0,0,0\n3,0,0,0\n4,0,0,0\n");
    const auto rz = run_cli("monitor --fit " + (dir / "m3.json").string() + " --data " +
                            (dir / "zeros.csv").string() + " --out " +
                            (dir / "rz.csv").string());
    REQUIRE(rz.code == 0);
    CHECK(rz.output.find("0 alarm(s)") != std::string::npos);

    // A blatant outbreak row under the known model.
    write_file(dir / "spike.csv", "t,x1,x2,x3\n1,3,3,3\n2,40,40,40\n");
    const auto rs = run_cli("monitor --fit " + (dir / "m3.json").string() + " --data " +
                            (dir / "spike.csv").string() + " --alpha 0.05 --out " +
                            (dir / "rs.csv").string());
    REQUIRE(rs.code == 0);
    CHECK(rs.output.find("alarm at t=2") != std::string::npos);
    const std::string report = slurp(dir / "rs.csv");
    CHECK(report.rfind("t,x1,x2,x3,ub1,ub2,ub3,flag1,flag2,flag3,alarm", 0) == 0);

    // Dimension mismatch between fit and data.
    write_file(dir / "two.csv", "t,x1,x2\n1,0,0\n2,0,0\n");
    CHECK(run_cli("monitor --fit " + (dir / "m3.json").string() + " --data " +
                  (dir / "two.csv").string() + " --out " + (dir / "r2.csv").string())
              .code == 2);
}

TEST_CASE("cli: evaluate desk-scale run is reproducible") {
    const auto dir = sandbox();
    write_file(dir / "exp.json", std::string("{\"model\": ") + kTrivariateModel +
                                     R"(, "total_length": 200, "setup_length": 150,
        "outbreak_time": 170, "kappas": [10], "alphas": [0.05],
        "approaches": ["trivariate"], "replicates": 2, "base_seed": 5})");
    const std::string base = "evaluate --spec " + (dir / "exp.json").string() + " --threads 2";
    REQUIRE(run_cli(base + " --out-dir " + (dir / "ev1").string()).code == 0);
    REQUIRE(run_cli(base + " --out-dir " + (dir / "ev2").string()).code == 0);
    for (const char* name : {"table3_arl.csv", "table4_rates.csv", "alarms.csv"}) {
        CHECK(slurp(dir / "ev1" / name) == slurp(dir / "ev2" / name));
        CHECK(!slurp(dir / "ev1" / name).empty());
    }
    // Headers + one aggregate row at a single-cell grid.
    std::istringstream rates(slurp(dir / "ev1" / "table4_rates.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(rates, line)) ++lines;
    CHECK(lines == 2);

    // Spec problems are reported before computing anything.
    write_file(dir / "bad.json", std::string("{\"model\": ") + kTrivariateModel +
                                     R"(, "outbreak_time": 10, "kappas": [5], "replicates": 1})");
    const auto rb = run_cli("evaluate --spec " + (dir / "bad.json").string() + " --out-dir " +
                            (dir / "ev3").string());
    CHECK(rb.code == 2);
    CHECK(rb.output.find("spec error") != std::string::npos);
}
