#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracle.hpp"
#include "spassoc/codispersion.hpp"
#include "spassoc/mttest.hpp"
#include "spassoc/serialize.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "spassoc_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = scratch_dir() / ("stdout_" + std::to_string(++counter) + ".txt");
    const fs::path err = scratch_dir() / ("stderr_" + std::to_string(counter) + ".txt");
    const std::string cmd = std::string("'") + SPASSOC_CLI_PATH + "' " + args + " > '" +
                            out.string() + "' 2> '" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    RunResult result;
    if (raw != -1 && WIFEXITED(raw)) result.code = WEXITSTATUS(raw);
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

/// A reusable scattered-points fixture written once per process.
const std::string& points_path() {
    static const std::string path =
        write_file("points.csv", spassoc::points_csv(oracle::random_sample(7001, 30)));
    return path;
}

std::string data_file(const char* name) {
    return std::string(SPASSOC_DATA_DIR) + "/" + name;
}

} // namespace

TEST_CASE("usage problems exit 64, help exits 0") {
    CHECK(run_cli("").code == 64);
    CHECK(run_cli("frobnicate").code == 64);
    CHECK(run_cli("ttest --no-such-flag").code == 64);
    CHECK(run_cli("ttest").code == 64); // no input source
    CHECK(run_cli("comovement --x a.csv").code == 64); // missing required --y
    CHECK(run_cli("ttest --coords x.csv --format yaml").code == 64);
    CHECK(run_cli("codisp --coords x.csv --nclass 5 --sturges").code == 64);

    const auto help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("ttest") != std::string::npos);
    CHECK(run_cli("ttest --help").code == 0);

    const auto no_input = run_cli("ttest --format json");
    CHECK(no_input.code == 64);
    CHECK(no_input.err.find("usage error") != std::string::npos);
}

TEST_CASE("input and degeneracy failures map to exit 2 and 3") {
    CHECK(run_cli("ttest --coords " + std::string("/nonexistent/points.csv")).code == 2);

    const auto bad = write_file("bad_points.csv", "s1,s2,x,y\n1,2,3\n");
    CHECK(run_cli("ttest --coords " + bad).code == 2);

    const auto constant =
        write_file("const_points.csv", "s1,s2,x,y\n0,0,5,1\n1,0,5,2\n0,1,5,3\n");
    const auto degen = run_cli("ttest --coords " + constant);
    CHECK(degen.code == 3);
    CHECK(degen.err.find("constant variable") != std::string::npos);
}

TEST_CASE("ttest output matches the library result") {
    const auto sample = oracle::random_sample(7001, 30);
    const auto want = spassoc::modified_ttest(sample);

    const auto run = run_cli("ttest --coords " + points_path());
    REQUIRE(run.code == 0);
    const auto doc = json::parse(run.out);
    CHECK(doc["fstat"].get<double>() == want.fstat);
    CHECK(doc["p_value"].get<double>() == want.p_value);
    CHECK(doc["ess"].get<double>() == want.ess);
    REQUIRE(doc["card"].size() == 13);

    const auto csv = run_cli("ttest --coords " + points_path() + " --format csv");
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("key,index,value\n", 0) == 0);

    const auto text = run_cli("ttest --coords " + points_path() + " --format summary");
    REQUIRE(text.code == 0);
    CHECK(text.out.find("Modified t-test") != std::string::npos);

    const auto clifford =
        run_cli("ttest --coords " + points_path() + " --estimator clifford");
    REQUIRE(clifford.code == 0);
    const auto cdoc = json::parse(clifford.out);
    CHECK(cdoc["sigma2_r"].get<double>() != doc["sigma2_r"].get<double>());
}

TEST_CASE("threaded runs agree with the single-threaded reference") {
    const auto one = run_cli("ttest --coords " + points_path() + " --threads 1");
    const auto six = run_cli("ttest --coords " + points_path() + " --threads 6");
    REQUIRE(one.code == 0);
    REQUIRE(six.code == 0);
    const auto a = json::parse(one.out);
    const auto b = json::parse(six.out);
    CHECK(a["fstat"].get<double>() ==
          doctest::Approx(b["fstat"].get<double>()).epsilon(1e-12));
    CHECK(a["ess"].get<double>() == doctest::Approx(b["ess"].get<double>()).epsilon(1e-12));
}

TEST_CASE("tjostheim subcommand") {
    const auto run = run_cli("tjostheim --coords " + points_path());
    REQUIRE(run.code == 0);
    const auto doc = json::parse(run.out);
    CHECK(std::abs(doc["coef"].get<double>()) <= 1.0);
    CHECK(doc["variance"].get<double>() > 0.0);
}

TEST_CASE("codisp row count follows the class count") {
    const auto run = run_cli("codisp --coords " + points_path() + " --nclass 5 --format csv");
    REQUIRE(run.code == 0);
    std::size_t lines = 0;
    for (char ch : run.out) lines += ch == '\n' ? 1 : 0;
    CHECK(lines == 6);
    CHECK(run.out.rfind("upper_bound,card,coef\n", 0) == 0);

    const auto dflt = run_cli("codisp --coords " + points_path());
    REQUIRE(dflt.code == 0);
    CHECK(json::parse(dflt.out)["coef"].size() == 13);
}

TEST_CASE("comovement on the shipped series fixtures") {
    const std::string args = "comovement --x " + data_file("mdeaths.csv") + " --y " +
                             data_file("fdeaths.csv");
    const auto run = run_cli(args + " --max-lag 5 --format csv");
    REQUIRE(run.code == 0);
    std::istringstream lines(run.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "lag,coef");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        const auto comma = line.find(',');
        const double value = std::strtod(line.c_str() + comma + 1, nullptr);
        CHECK(value > 0.9); // strongly comonotone series
        CHECK(value <= 1.0);
    }
    CHECK(rows == 5);

    // Default horizon: ceil(72 / 2) = 36 lags.
    const auto dflt = run_cli(args);
    REQUIRE(dflt.code == 0);
    CHECK(json::parse(dflt.out)["coef"].size() == 36);
}

TEST_CASE("map subcommand on an image pair") {
    const auto img_x = write_file("img_x.txt",
                                  "1 2 3 4\n5 6 7 8\n9 10 11 12\n13 14 15 16\n");
    const auto img_y = write_file("img_y.txt",
                                  "2 4 5 8\n10 11 14 16\n17 20 22 24\n25 28 30 33\n");
    const auto run = run_cli("map --image-x " + img_x + " --image-y " + img_y +
                             " --angles 4 --radii 3 --format csv");
    REQUIRE(run.code == 0);
    std::size_t lines = 0;
    for (char ch : run.out) lines += ch == '\n' ? 1 : 0;
    CHECK(lines == 1 + 4 * 3);

    // Mixing --coords with --image-x is rejected by the parser.
    CHECK(run_cli("map --coords c.csv --image-x " + img_x + " --image-y " + img_y).code == 64);
    // --image-x without --image-y likewise.
    CHECK(run_cli("map --image-x " + img_x).code == 64);
}

TEST_CASE("simulate is reproducible and ships its provenance") {
    const std::string args = "simulate --nrow 4 --ncol 5 --seed 11";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto doc = json::parse(a.out);
    CHECK(doc["rng"] == "mt19937_64-boxmuller");
    CHECK(doc["seed"].get<int>() == 11);
    CHECK(doc["x"].size() == 20);
    CHECK(doc["s1"].size() == 20);

    const auto c = run_cli(args + " --seed 12");
    CHECK(c.out != a.out);

    // CSV mode: clean points stream on stdout, sidecar JSON on stderr.
    const auto csv = run_cli(args + " --format csv");
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("s1,s2,x,y\n", 0) == 0);
    const auto sidecar = json::parse(csv.err);
    CHECK(sidecar["seed"].get<int>() == 11);
    CHECK(sidecar["nrow"].get<int>() == 4);

    // With --out, the sidecar lands next to the file.
    const auto out_path = (scratch_dir() / "sim_out.csv").string();
    const auto filed = run_cli(args + " --format csv --out " + out_path);
    REQUIRE(filed.code == 0);
    CHECK(slurp(out_path).rfind("s1,s2,x,y\n", 0) == 0);
    const auto side = json::parse(slurp(out_path + ".json"));
    CHECK(side["ncol"].get<int>() == 5);

    CHECK(run_cli("simulate --gamma 9").code == 2); // invalid covariance parameter
}

TEST_CASE("bench emits one row per size and method") {
    const auto run = run_cli("bench --sizes 4 --reps 1 --method codisp --format csv");
    REQUIRE(run.code == 0);
    std::istringstream lines(run.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "size,n,method,reps,mean_seconds,op_count");
    REQUIRE(static_cast<bool>(std::getline(lines, row)));
    CHECK(row.rfind("4,16,codisp,1,", 0) == 0);
    CHECK(row.substr(row.rfind(',') + 1) == "1680");
    CHECK_FALSE(static_cast<bool>(std::getline(lines, row)));

    const auto both = run_cli("bench --sizes 4,5 --reps 1");
    REQUIRE(both.code == 0);
    CHECK(json::parse(both.out).size() == 4);
}
