// End-to-end checks that drive the built simwt binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "simwt/csv.hpp"
#include "simwt/scm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SIMWT_BIN) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "simwt_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char ch : s)
        if (ch == '\n') ++n;
    return n;
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("simulate writes the expected shape and is byte-stable") {
    const fs::path out = temp_dir() / "sim.csv";
    const std::string args = "simulate --scenario covariate --externals 3 --similarity similar "
                             "--target-n 15 --external-n 30 --seed 7 --out " +
                             out.string();
    const auto r = run_cli(args);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("shift vector: 0 0.3333333333333333 0.6666666666666666 1") !=
          std::string::npos);

    const std::string first = slurp(out);
    CHECK(count_lines(first) == 1 + 15 + 3 * 30);
    std::istringstream header(first.substr(0, first.find('\n')));
    std::string head;
    std::getline(header, head);
    CHECK(head == "subgroup,y,x_s1,x_s2,x_s3,x_g1");

    const auto again = run_cli(args);
    CHECK(again.exit_code == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("simulate rejects zero externals with a usage error") {
    const auto r = run_cli("simulate --externals 0 --out " + (temp_dir() / "x.csv").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("weigh reports auc near one half for a duplicate of the target") {
    const fs::path data = temp_dir() / "null.csv";
    REQUIRE(run_cli("simulate --externals 1 --shifts 0,0 --target-n 500 --external-n 500 "
                    "--k 1 --c 0 --seed 3 --out " +
                    data.string())
                .exit_code == 0);
    const fs::path wcsv = temp_dir() / "weights.csv";
    const fs::path wjson = temp_dir() / "weights.json";
    const auto r = run_cli("weigh --input " + data.string() + " --target 0 --out-weights " +
                           wcsv.string() + " --out-json " + wjson.string());
    CHECK(r.exit_code == 0);
    const json diag = slurp_json(wjson);
    const double auc = diag["externals"][0]["auc"].get<double>();
    CHECK(auc > 0.45);
    CHECK(auc < 0.6);
    CHECK(diag["externals"][0]["mean_weight"].get<double>() > 0.8);
    CHECK(diag["externals"][0]["mean_weight"].get<double>() < 1.2);
}

TEST_CASE("weigh truncation zeroes dissimilar external rows") {
    const fs::path data = temp_dir() / "shifted.csv";
    REQUIRE(run_cli("simulate --externals 1 --similarity dissimilar --target-n 30 "
                    "--external-n 30 --seed 11 --out " +
                    data.string())
                .exit_code == 0);
    const fs::path wcsv = temp_dir() / "wtrunc.csv";
    const fs::path wjson = temp_dir() / "wtrunc.json";
    const auto r = run_cli("weigh --input " + data.string() +
                           " --target 0 --truncate-pct 5 --out-weights " + wcsv.string() +
                           " --out-json " + wjson.string());
    CHECK(r.exit_code == 0);
    const json diag = slurp_json(wjson);
    CHECK(diag["truncation_percentile"] == 5.0);
    const int zeros_json = diag["externals"][0]["zero_weights"].get<int>();
    CHECK(zeros_json > 0);

    // the weights CSV agrees with the diagnostics
    std::istringstream in(slurp(wcsv));
    std::string line;
    std::getline(in, line);  // header
    int zeros_csv = 0;
    while (std::getline(in, line)) {
        if (line.rfind("1,0,", 0) == 0) ++zeros_csv;
    }
    CHECK(zeros_csv == zeros_json);
}

TEST_CASE("weigh without externals fails with the available labels") {
    const fs::path data = temp_dir() / "solo.csv";
    {
        std::ofstream out(data);
        out << "subgroup,y,x1\nA,1.0,0.5\nA,2.0,0.6\nA,1.5,0.7\n";
    }
    const auto r = run_cli("weigh --input " + data.string() + " --target A");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("no external subgroups") != std::string::npos);

    const auto unknown = run_cli("weigh --input " + data.string() + " --target B");
    CHECK(unknown.exit_code == 3);
    CHECK(unknown.output.find("available: 'A'") != std::string::npos);
}

TEST_CASE("csv schema violations exit with the data code and a location") {
    const fs::path bad = temp_dir() / "bad.csv";
    {
        std::ofstream out(bad);
        out << "subgroup,y,x1\nA,1.0,2.0\nB,oops,2.0\nA,1,1\nB,2,2\n";
    }
    const auto r = run_cli("weigh --input " + bad.string() + " --target A");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find(":3: invalid number 'oops' in column 'y'") != std::string::npos);
}

TEST_CASE("grid summary carries the table fields and jobs do not change results") {
    const fs::path results1 = temp_dir() / "r1.csv";
    const fs::path results8 = temp_dir() / "r8.csv";
    const fs::path summary = temp_dir() / "summary.json";
    const std::string base =
        "grid --kinds covariate --similarities similar --external-counts 1,3 "
        "--external-sizes 10 --target-sizes 10 --replicates 3 --n-test 20 --seed 21 ";
    const auto r1 = run_cli(base + "--jobs 1 --out-results " + results1.string() +
                            " --out-summary " + summary.string());
    CHECK(r1.exit_code == 0);
    const auto r8 = run_cli(base + "--jobs 8 --out-results " + results8.string());
    CHECK(r8.exit_code == 0);
    CHECK(slurp(results1) == slurp(results8));

    const json s = slurp_json(summary);
    for (const char* key : {"weighted", "p_only", "local", "global"})
        CHECK(s["average_rmse"].contains(key));
    CHECK(s["average_ess_ratio"].contains("weighted"));
    CHECK(s["average_ess_ratio"].contains("p_only"));
    CHECK(s["cells"] == 6);
}

TEST_CASE("grid rejects an empty kinds set") {
    const auto r = run_cli("grid --kinds \"\" --replicates 1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("bootstrap over five synthetic centers mirroring the clinical sizes") {
    // five centers with sizes 27, 24, 16, 26, 64 and a positive outcome
    simwt::ScenarioSpec spec;
    spec.kind = simwt::ScenarioKind::CovariateOutcome;
    spec.subgroup_sizes = {27, 24, 16, 26, 64};
    spec.shift_vector = {0.0, 0.3, 0.6, 0.9, 1.2};
    spec.k = 2;
    spec.c = 2;
    spec.seed = 2024;
    simwt::Dataset data = simwt::simulate(spec).data;
    data.outcome.array() += -data.outcome.minCoeff() + 1.0;
    const fs::path csv = temp_dir() / "centers.csv";
    simwt::write_dataset_csv_file(csv.string(), data);

    const fs::path report = temp_dir() / "boot.json";
    const fs::path obs = temp_dir() / "boot_obs.csv";
    const fs::path cdf = temp_dir() / "boot_cdf.csv";
    const auto r = run_cli("bootstrap --input " + csv.string() +
                           " --all-targets -B 20 --boxcox-lambda 2 --seed 5 --out-json " +
                           report.string() + " --out-obs " + obs.string() + " --out-cdf " +
                           cdf.string());
    CHECK(r.exit_code == 0);
    const json reports = slurp_json(report);
    REQUIRE(reports.is_array());
    CHECK(reports.size() == 5);
    for (const auto& rep : reports) {
        CHECK(rep["methods"].size() == 3);
        for (const auto& m : rep["methods"]) CHECK(m["estimate_632plus"].is_number());
    }
    CHECK(slurp(obs).rfind("method,row,outcome,mean_loss,p5,p95,n_oob", 0) == 0);
    CHECK(slurp(cdf).rfind("method,value,cumulative", 0) == 0);

    // single-replicate boundary still produces a report
    const auto b1 = run_cli("bootstrap --input " + csv.string() + " --target 0 -B 1 --seed 9 " +
                            "--out-json " + (temp_dir() / "b1.json").string());
    CHECK(b1.exit_code == 0);
}

TEST_CASE("bootstrap without a target is a usage error") {
    const fs::path csv = temp_dir() / "centers.csv";
    const auto r = run_cli("bootstrap --input " + csv.string() + " -B 5");
    CHECK(r.exit_code == 2);
}

TEST_CASE("simulate output round-trips through weigh and bootstrap") {
    const fs::path data = temp_dir() / "round.csv";
    REQUIRE(run_cli("simulate --externals 3 --similarity medium --target-n 20 --external-n 25 "
                    "--seed 13 --out " +
                    data.string())
                .exit_code == 0);
    CHECK(run_cli("weigh --input " + data.string() + " --target 0").exit_code == 0);
    CHECK(run_cli("bootstrap --input " + data.string() + " --target 0 -B 10 --seed 1")
              .exit_code == 0);
}

TEST_CASE("identical configuration gives identical outputs") {
    const fs::path a = temp_dir() / "det_a.json";
    const fs::path b = temp_dir() / "det_b.json";
    const fs::path data = temp_dir() / "round.csv";  // written by the round-trip test
    REQUIRE(fs::exists(data));
    const std::string cmd = "bootstrap --input " + data.string() +
                            " --target 0 -B 25 --seed 42 --jobs 2 --out-json ";
    REQUIRE(run_cli(cmd + a.string()).exit_code == 0);
    REQUIRE(run_cli(cmd + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("config file supplies defaults and flags win") {
    const fs::path cfg = temp_dir() / "simwt.cfg";
    const fs::path out_cfg = temp_dir() / "cfg_run.csv";
    {
        std::ofstream out(cfg);
        out << "[simulate]\n"
            << "externals=2\n"
            << "target-n=9\n"
            << "external-n=7\n"
            << "seed=31\n"
            << "out=" << out_cfg.string() << "\n";
    }
    const auto r = run_cli("--config " + cfg.string() + " simulate");
    CHECK(r.exit_code == 0);
    CHECK(count_lines(slurp(out_cfg)) == 1 + 9 + 2 * 7);

    // a flag overrides the config value
    const auto r2 = run_cli("--config " + cfg.string() + " simulate --target-n 4");
    CHECK(r2.exit_code == 0);
    CHECK(count_lines(slurp(out_cfg)) == 1 + 4 + 2 * 7);

    // the environment variable selects the default config path
    const std::string env_cmd = std::string("SIMWT_CONFIG=") + cfg.string() + " " + SIMWT_BIN +
                                " simulate --target-n 5 2>&1";
    FILE* pipe = popen(env_cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[1024];
    while (fread(buf, 1, sizeof(buf), pipe) > 0) {}
    const int status = pclose(pipe);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(count_lines(slurp(out_cfg)) == 1 + 5 + 2 * 7);
}
