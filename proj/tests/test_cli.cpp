#include "cli.hpp"

#include "fbma/error.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using fbma::Json;
using fbma::cli::Params;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("fbma_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

int fbma_exe(const std::string& args)
{
    const std::string cmd = std::string(FBMA_EXE) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Json read_json(const fs::path& p)
{
    return Json::parse(slurp(p));
}

}  // namespace

TEST_CASE("parameter sets reject unknown keys and bad values")
{
    Params p = fbma::cli::command_params("solve-liouville");
    CHECK(p.known("max_iter"));
    CHECK_THROWS_AS(p.set("bogus", "1"), fbma::ConfigError);
    p.set("tol", "abc");
    CHECK_THROWS_AS(p.real("tol"), fbma::ConfigError);
    p.set("max_iter", "3.5");
    CHECK_THROWS_AS(p.integer("max_iter"), fbma::ConfigError);
    CHECK_THROWS_AS(fbma::cli::command_params("frobnicate"), fbma::ConfigError);

    Params s = fbma::cli::command_params("sweep");
    s.set("R_list", " 2, 4 ,8 ");
    CHECK(s.reals("R_list") == std::vector<double>{2.0, 4.0, 8.0});
    s.set("R_list", "");
    CHECK_THROWS_AS(s.reals("R_list"), fbma::ConfigError);
}

TEST_CASE("exit status 2 on configuration errors")
{
    const fs::path out = scratch("config");
    CHECK(fbma_exe("solve-liouville --R 1 --out " + out.string()) == 2);
    CHECK(read_json(out / "run.json")["exit_code"] == 2);
    CHECK(fbma_exe("solve-liouville --no-such-flag 3") == 2);
    CHECK(fbma_exe("") == 2);

    fs::create_directories(out);
    std::ofstream(out / "bad.cfg") << "# comment\nn_r = 17\nbogus = 1\n";
    CHECK(fbma_exe("solve-liouville --config " + (out / "bad.cfg").string() + " --out " + out.string()) == 2);
    CHECK(fbma_exe("rebuild --out " + out.string()) == 2);
    CHECK(fbma_exe("weierstrass-eval --data nothing --out " + out.string()) == 2);
}

TEST_CASE("config file values are overridden by flags")
{
    const fs::path out = scratch("precedence");
    fs::create_directories(out);
    std::ofstream(out / "run.cfg") << "n_r = 17\nn_theta = 32\nmax_iter = 7\n";
    const int code = fbma_exe("solve-liouville --config " + (out / "run.cfg").string() + " --n-theta 48 --out " +
                              (out / "o").string());
    CHECK(code == 0);
    const Json run = read_json(out / "o" / "run.json");
    CHECK(run["parameters"]["n_r"] == "17");
    CHECK(run["parameters"]["n_theta"] == "48");
    CHECK(run["parameters"]["max_iter"] == "7");
    CHECK(run["tolerances"].contains("liouville"));
}

TEST_CASE("catenoid pipeline end to end")
{
    const fs::path out = scratch("pipeline");
    CHECK(fbma_exe("pipeline-catenoid --n_r 129 --n_theta 256 --out " + out.string()) == 0);
    const Json run = read_json(out / "run.json");
    CHECK(run["exit_code"] == 0);
    for (const auto& name : run["artifacts"]) CHECK(fs::exists(out / name.get<std::string>()));
    const Json rep = read_json(out / "report.json");
    for (const auto& c : rep["checks"]) CHECK_MESSAGE(c["pass"].get<bool>(), c["name"].get<std::string>());
    CHECK(rep["spheres"]["concentric"] == true);
    CHECK(rep["decomposition"]["classification"] == "identity");
    CHECK(fs::file_size(out / "surface.obj") > 0);
}

TEST_CASE("rebuild, certify and diagnose chain through files")
{
    const fs::path out = scratch("chain");
    REQUIRE(fbma_exe("solve-liouville --n-r 65 --n-theta 128 --out " + (out / "s").string()) == 0);
    REQUIRE(fbma_exe("rebuild --solution " + (out / "s" / "solution.csv").string() + " --out " + (out / "r").string()) == 0);
    const Json rep = read_json(out / "r" / "report.json");
    CHECK(rep["spheres"]["concentric"] == true);
    CHECK(fbma_exe("certify-sphere --patch " + (out / "r" / "surface.obj").string() + " --row -1 --out " +
                   (out / "c").string()) == 0);
    const Json cert = read_json(out / "c" / "certificate.json");
    CHECK(cert["certificate"]["radius"].get<double>() == doctest::Approx(1.0).epsilon(1e-4));

    REQUIRE(fbma_exe("weierstrass-eval --data catenoid --n-r 65 --n-theta 256 --out " + (out / "w").string()) == 0);
    CHECK(fbma_exe("diagnose --patch " + (out / "w" / "patch.obj").string() + " --out " + (out / "d").string()) == 0);
    const Json d = read_json(out / "d" / "diagnose.json");
    CHECK(d["injectivity"]["verdict"] == "consistent with injectivity");
    CHECK(d["hopf"]["deviation"].get<double>() < 1e-4);
    CHECK(d["kappa_g"]["inner"]["max_difference_to_curve"].get<double>() < 1e-4);
}

TEST_CASE("sweep marks divergent pairs and still succeeds")
{
    const fs::path out = scratch("sweep");
    CHECK(fbma_exe("sweep --R-list 2,50 --C0-list 0.25,5 --n-r 33 --n-theta 64 --out " + out.string()) == 0);
    const Json table = read_json(out / "sweep.json");
    REQUIRE(table.size() == 4);
    CHECK(table[0]["status"] == "converged");
    CHECK(table[3]["status"] == "divergent");
    for (const auto& row : table) CHECK(fs::exists(out / row["report"].get<std::string>()));
    setenv("FBMA_THREADS", "0", 1);
    CHECK(fbma_exe("sweep --out " + out.string()) == 2);
    unsetenv("FBMA_THREADS");
}

TEST_CASE("artifacts are byte-identical across runs and thread counts")
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    setenv("FBMA_THREADS", "1", 1);
    REQUIRE(fbma_exe("sweep --R-list 2,3 --C0-list 0.25,0.5 --n-r 33 --n-theta 64 --out " + a.string()) == 0);
    setenv("FBMA_THREADS", "4", 1);
    REQUIRE(fbma_exe("sweep --R-list 2,3 --C0-list 0.25,0.5 --n-r 33 --n-theta 64 --out " + b.string()) == 0);
    unsetenv("FBMA_THREADS");
    int compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const std::string name = e.path().filename().string();
        if (name == "run.json") continue;  // differs only in the output directory
        CHECK_MESSAGE(slurp(e.path()) == slurp(b / name), name);
        ++compared;
    }
    CHECK(compared == 5);

    const fs::path c = scratch("det_c"), d = scratch("det_d");
    REQUIRE(fbma_exe("rebuild --solution /dev/null --out " + c.string()) == 2);
    REQUIRE(fbma_exe("solve-liouville --n-r 17 --n-theta 32 --out " + c.string()) == 0);
    REQUIRE(fbma_exe("solve-liouville --n-r 17 --n-theta 32 --out " + d.string()) == 0);
    CHECK(slurp(c / "solution.csv") == slurp(d / "solution.csv"));
    CHECK(slurp(c / "report.json") == slurp(d / "report.json"));
}
