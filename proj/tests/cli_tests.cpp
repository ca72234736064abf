// End-to-end tests that drive the installed binary through a shell, checking
// exit codes, console text, and the files each subcommand leaves behind.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "celltraj/dataset.hpp"
#include "celltraj/report.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace celltraj;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    const fs::path p = fs::temp_directory_path() / "celltraj_cli_tests";
    fs::create_directories(p);
    return p;
}

std::string path_in(const std::string& name) { return (work_dir() / name).string(); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string write_file(const std::string& name, const std::string& text) {
    const std::string path = path_in(name);
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args) {
    const std::string out_path = path_in("stdout.txt");
    const std::string err_path = path_in("stderr.txt");
    const std::string cmd =
        std::string(CELLTRAJ_BIN) + " " + args + " >" + out_path + " 2>" + err_path;
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = read_file(out_path);
    res.err = read_file(err_path);
    return res;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits cleanly and names every subcommand") {
    const CliResult res = run_cli("--help");
    CHECK(res.exit_code == 0);
    for (const char* sub : {"analyze", "simulate", "bench", "eval"})
        CHECK(contains(res.out, sub));
}

TEST_CASE("usage mistakes are configuration errors") {
    CHECK(run_cli("").exit_code == 4);  // a subcommand is required
    CHECK(run_cli("analyze --frobnicate").exit_code == 4);
    const CliResult res =
        run_cli("simulate --sine-form triangle --out " + path_in("x.csv"));
    CHECK(res.exit_code == 4);
    CHECK(contains(res.err, "unknown sine form"));
    const CliResult bad =
        run_cli("simulate --changes 1,x --out " + path_in("x.csv"));
    CHECK(bad.exit_code == 4);
    CHECK(contains(bad.err, "cannot parse change time"));
}

TEST_CASE("a missing dataset is an input error") {
    const CliResult res = run_cli("analyze --input " + path_in("nowhere.csv") +
                                  " --out " + path_in("nowhere_out"));
    CHECK(res.exit_code == 2);
    CHECK(contains(res.err, "input error:"));
    CHECK(contains(res.err, "cannot open dataset file"));
}

TEST_CASE("simulate writes a parseable dataset and a truth sidecar") {
    const std::string csv = path_in("sim_basic.csv");
    const CliResult res = run_cli(
        "simulate --d 4 --t 6 --g 3 --n 200 --nu 0.1 --eta 0.8 --changes 3 --seed 5 --out " +
        csv);
    REQUIRE(res.exit_code == 0);
    CHECK(contains(res.out, "dataset:"));
    CHECK(contains(res.out, "truth:"));

    const Dataset ds = parse_dataset(csv);
    CHECK(ds.num_records() == 7 * 200);
    CHECK(ds.num_times() == 7);
    CHECK(ds.num_types() == 4);
    CHECK(ds.feature_names == std::vector<std::string>{"g1", "g2", "g3"});

    const std::string sidecar = path_in("sim_basic.truth.json");
    REQUIRE(fs::exists(sidecar));
    CHECK(read_change_set(sidecar) == std::set<int>{3});
    const nlohmann::json j = nlohmann::json::parse(read_file(sidecar));
    CHECK(j.at("kind") == "truth");
    CHECK(j.at("config").at("seed") == 5);
}

TEST_CASE("simulated frequencies track the generating marginal") {
    const std::string csv = path_in("sim_flat.csv");
    const CliResult res = run_cli(
        "simulate --d 4 --t 4 --g 2 --n 2000 --nu 0 --eta 0 --changes none --seed 1 --out " +
        csv);
    REQUIRE(res.exit_code == 0);
    const Dataset ds = parse_dataset(csv);
    // Uniform generator: every empirical frequency sits within 5 sigma of 1/4.
    for (const Marginal& q : empirical_marginals(ds))
        for (int j = 0; j < 4; ++j) CHECK(std::abs(q[j] - 0.25) < 0.05);
}

TEST_CASE("analyze emits the report, heatmaps, and a summary line") {
    const std::string csv = path_in("sim_loud.csv");
    REQUIRE(run_cli("simulate --d 4 --t 6 --g 3 --n 400 --nu 0.1 --eta 1.5 --changes 3 "
                    "--seed 7 --out " +
                    csv)
                .exit_code == 0);

    const std::string out_dir = path_in("loud_out");
    const CliResult res = run_cli("analyze --input " + csv + " --out " + out_dir);
    REQUIRE(res.exit_code == 0);
    CHECK(contains(res.out, "parsed 2800 cells, 4 types, 7 time points"));
    CHECK(contains(res.out, "detected change points: 3"));
    CHECK(contains(res.out, "report:"));

    const AnalysisReport report =
        read_analysis_report((fs::path(out_dir) / "report.json").string());
    CHECK(report.pairs.size() == 6);
    CHECK(report.type_labels.size() == 4);
    CHECK(report.detected == std::vector<int>{3});
    for (int t = 0; t < 6; ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "pair_%03d.svg", t);
        const std::string svg = read_file((fs::path(out_dir) / name).string());
        CHECK(svg.rfind("<svg ", 0) == 0);
    }
}

TEST_CASE("analyze rejects a dataset with a single time point") {
    const std::string csv = write_file("onetime.csv",
                                       "time,cell_type,g1\n"
                                       "0,A,1.0\n"
                                       "0,B,2.0\n");
    const CliResult res = run_cli("analyze --input " + csv + " --out " + path_in("one_out"));
    CHECK(res.exit_code == 2);
    CHECK(contains(res.err, "need >= 2 time points"));
}

TEST_CASE("simulate, analyze, eval closes the loop at a perfect score") {
    const std::string csv = path_in("loop.csv");
    REQUIRE(run_cli("simulate --d 4 --t 6 --g 3 --n 400 --nu 0.1 --eta 2 --changes 3 "
                    "--seed 21 --out " +
                    csv)
                .exit_code == 0);
    const std::string out_dir = path_in("loop_out");
    REQUIRE(run_cli("analyze --input " + csv + " --out " + out_dir).exit_code == 0);

    const CliResult res =
        run_cli("eval --truth " + path_in("loop.truth.json") + " --detected " +
                (fs::path(out_dir) / "report.json").string());
    REQUIRE(res.exit_code == 0);
    CHECK(contains(res.out, "precision: 1\n"));
    CHECK(contains(res.out, "recall: 1\n"));
    CHECK(contains(res.out, "f_score: 1\n"));
}

TEST_CASE("eval scores partial detections from plain change-set files") {
    const std::string truth = write_file("truth_pair.json", "{\"change_times\": [10, 20]}");
    const std::string detected =
        write_file("detected_four.json", "{\"detected\": [10, 20, 30, 40]}");
    const CliResult res = run_cli("eval --truth " + truth + " --detected " + detected);
    REQUIRE(res.exit_code == 0);
    CHECK(contains(res.out, "precision: 0.5\n"));
    CHECK(contains(res.out, "recall: 1\n"));
    CHECK(contains(res.out, "f_score: 0.666667\n"));

    const CliResult bad = run_cli("eval --truth " + truth + " --detected " +
                                  write_file("no_fields.json", "{}"));
    CHECK(bad.exit_code == 2);
    CHECK(contains(bad.err, "no change_times or detected field"));
}

TEST_CASE("bench flags a single run and writes the report") {
    const std::string out = path_in("bench_single.json");
    const CliResult res = run_cli(
        "bench --runs 1 --d 4 --t 6 --g 3 --n 150 --nu 0.1 --eta 1.5 --changes 3 --seed 9 "
        "--out " +
        out);
    REQUIRE(res.exit_code == 0);
    CHECK(contains(res.out, "runs: 1"));
    CHECK(contains(res.out, "single run: standard errors are zero by construction"));
    CHECK(contains(res.out, "mean F-score:"));
    const nlohmann::json j = nlohmann::json::parse(read_file(out));
    CHECK(j.at("kind") == "benchmark");
    CHECK(j.at("summary").at("single_run") == true);
    CHECK(j.at("per_run").size() == 1);
}

TEST_CASE("bench artifacts are identical across reruns and thread counts") {
    const std::string base =
        "bench --runs 4 --d 4 --t 5 --g 3 --n 100 --nu 0.1 --eta 1.5 --changes 2 --seed 13 ";
    const std::string a = path_in("bench_a.json");
    const std::string b = path_in("bench_b.json");
    const std::string c = path_in("bench_c.json");
    REQUIRE(run_cli(base + "--out " + a).exit_code == 0);
    REQUIRE(run_cli(base + "--out " + b).exit_code == 0);
    REQUIRE(run_cli(base + "--threads 4 --out " + c).exit_code == 0);
    const std::string text = read_file(a);
    CHECK(text == read_file(b));
    CHECK(text == read_file(c));
    CHECK_FALSE(text.empty());
}

}  // TEST_SUITE
