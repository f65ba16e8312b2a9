// End-to-end checks of the built qreduce binary.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qreduce/io.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return QREDUCE_CLI_PATH; }

int run(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("qreduce_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out);
    out << text;
}

const std::string kFastConfig = R"(omega = 0
nu = 0
g = 3
lambda = 0.3
alpha_re = 2
dt = 1e-3
sample_interval = 1e-2
t_max = 2.0
n_paths = 6
seed = 9
)";

} // namespace

TEST_CASE("cli help and argument errors") {
    CHECK(run("--help") == 0);
    CHECK(run("") != 0);
    CHECK(run("frobnicate") != 0);
    CHECK(run("trajectory /nonexistent/config.conf") == 4); // unreadable config file
}

TEST_CASE("cli trajectory run is reproducible byte for byte") {
    const fs::path dir = temp_dir("traj");
    write_file(dir / "run.conf", kFastConfig + "out_dir = " + (dir / "out").string() + "\n");

    REQUIRE(run("trajectory " + (dir / "run.conf").string()) == 0);
    REQUIRE(fs::exists(dir / "out" / "trajectory.csv"));
    const std::string first = slurp(dir / "out" / "trajectory.csv");
    CHECK(first.rfind("t,re_a,im_a,var_a,", 0) == 0);

    REQUIRE(run("trajectory " + (dir / "run.conf").string()) == 0);
    CHECK(slurp(dir / "out" / "trajectory.csv") == first);
}

TEST_CASE("cli ensemble writes artifacts and honors overrides") {
    const fs::path dir = temp_dir("ens");
    write_file(dir / "run.conf", kFastConfig + "out_dir = " + (dir / "out").string() + "\n");

    REQUIRE(run("ensemble " + (dir / "run.conf").string() + " t_max=1.5") == 0);
    REQUIRE(fs::exists(dir / "out" / "paths.csv"));
    REQUIRE(fs::exists(dir / "out" / "summary.json"));

    const auto j = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
    CHECK(j["config"]["t_max"] == 1.5); // override beat the file value
    CHECK(j["n_paths"] == 6);
}

TEST_CASE("cli rejects invalid ensembles without writing files") {
    const fs::path dir = temp_dir("bad");
    write_file(dir / "run.conf", kFastConfig + "out_dir = " + (dir / "out").string() + "\n");
    CHECK(run("ensemble " + (dir / "run.conf").string() + " n_paths=0") == 2);
    CHECK_FALSE(fs::exists(dir / "out" / "paths.csv"));
    CHECK_FALSE(fs::exists(dir / "out" / "summary.json"));
}

TEST_CASE("cli sweep emits sweep.csv and fit.json") {
    const fs::path dir = temp_dir("sweep");
    write_file(dir / "run.conf",
               "omega = 0\nnu = 0\nlambda = 0.3\nalpha_re = 1\ndt = 1e-3\n"
               "sample_interval = 1e-2\nn_paths = 4\nseed = 3\ng_list = 2,3,4\n"
               "out_dir = " +
                   (dir / "out").string() + "\n");
    REQUIRE(run("sweep " + (dir / "run.conf").string()) == 0);
    REQUIRE(fs::exists(dir / "out" / "sweep.csv"));
    REQUIRE(fs::exists(dir / "out" / "fit.json"));
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "fit.json"));
    CHECK(j.contains("k_fixed_exponent"));
    CHECK(j["points"].size() == 3);
}

TEST_CASE("cli oracle-check reports and exits cleanly") {
    const fs::path dir = temp_dir("oracle");
    CHECK(run("oracle-check out_dir=" + (dir / "out").string()) == 0);
    REQUIRE(fs::exists(dir / "out" / "report.json"));
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(j["all_pass"] == true);
    CHECK(j["checks"].size() >= 5);
}
