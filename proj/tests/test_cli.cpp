#include <doctest.h>

#include <unistd.h>

#include "cli_runner.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("acsens_cli_" + std::to_string(::getpid())) / name;
    fs::create_directories(p.parent_path());
    return p;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("boundaries for the table pair") {
    const auto r = cli::run("boundaries --problem " + cli::preset("table1.json") + " --eta 1");
    CHECK(r.status == 0);
    CHECK(r.out.find("roots: 3.65338") != std::string::npos);
    CHECK(r.out.find(", 18.7773") != std::string::npos);
    const auto r2 = cli::run("boundaries --preset table1 --eta 0.4603 --format csv");
    CHECK(r2.status == 0);
    CHECK(r2.out.find("# config:") == 0);
    CHECK(r2.out.find("\n1.82797") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
    const auto bad_key = scratch("bad_key.json");
    write(bad_key, R"({"h0": {"family": "gaussian", "params": {"mu": 0, "sigma": 1}},
                       "h1": {"family": "gaussian", "params": {"mu": 1, "sigma": 1}}, "prior": 0.5})");
    auto r = cli::run("boundaries --problem " + bad_key.string());
    CHECK(r.status == 2);
    CHECK(r.err.find("'prior'") != std::string::npos);

    const auto broken = scratch("broken.json");
    write(broken, R"({"h0": {"family": "gaussian", )");
    CHECK(cli::run("check --problem " + broken.string()).status == 2);

    CHECK(cli::run("boundaries --problem /nonexistent/file.json").status == 2);
    CHECK(cli::run("curve general --preset table1 --zeta-steps 0").status == 2);
    CHECK(cli::run("curve ml --preset table1 --eta-grid ''").status == 2);
    CHECK(cli::run("curve linear --preset table1 --y-grid ''").status == 2);
    CHECK(cli::run("curve quadratic --preset table1").status == 2);
    CHECK(cli::run("frobnicate").status == 2);
    CHECK(cli::run("simulate --preset table1 --scenario s9").status == 2);
    CHECK(cli::run("accuracy --preset table1 --classifier linear:abc").status == 2);
    CHECK(cli::run("design --gamma 1.5").status == 2);
}

TEST_CASE("solver failure exits with 3") {
    // Identical hypotheses have no likelihood-ratio crossing to check.
    const auto same = scratch("same.json");
    write(same, R"({"h0": {"family": "gaussian", "params": {"mu": 0, "sigma": 1}},
                    "h1": {"family": "gaussian", "params": {"mu": 0, "sigma": 1}}})");
    CHECK(cli::run("check --problem " + same.string()).status == 3);
}

TEST_CASE("check reports the A1 tie") {
    const auto r = cli::run("check --problem " + cli::preset("fig2c.json"));
    CHECK(r.status == 0);
    CHECK(r.out.find("A1: FAIL (two max components)") != std::string::npos);
    const auto t = cli::run("check --preset table1");
    CHECK(t.out.find("A1: PASS") != std::string::npos);
}

TEST_CASE("curve endpoint and formats") {
    const auto r = cli::run("curve general --preset table1 --norm inf --zeta-steps 6 --grid 200");
    REQUIRE(r.status == 0);
    const auto last = r.out.substr(r.out.rfind('\n', r.out.size() - 2) + 1);
    CHECK(last.rfind("0.78907", 0) == 0);
    CHECK(last.find(",0.0334") != std::string::npos);
    const auto svg = cli::run("curve ml --preset table1 --norm two --format svg");
    CHECK(svg.status == 0);
    CHECK(svg.out.find("<polyline") != std::string::npos);
    CHECK(svg.out.find("<!-- config:") != std::string::npos);
}

TEST_CASE("design row at gamma 0.9") {
    const auto r = cli::run("design --gamma 0.9 --box " + cli::preset("fig3.json") + " --multistarts 6");
    CHECK(r.status == 0);
    CHECK(r.out.find("gamma,sens_star,mu0,sigma0,mu1,sigma1\n0.9") != std::string::npos);
}

TEST_CASE("seeded commands are byte-identical") {
    const auto a = scratch("sim_a.csv"), b = scratch("sim_b.csv");
    const std::string args = "simulate --preset table1 --scenario s2 --classifier ml:0.4603 --seed 7 --n-obs 2000 "
                             "--n-trials 10 --format csv --out ";
    REQUIRE(cli::run(args + a.string()).status == 0);
    REQUIRE(cli::run(args + b.string() + " --threads 1").status == 0);
    CHECK(cli::slurp(a) == cli::slurp(b));

    const auto d1 = scratch("rep1"), d2 = scratch("rep2");
    REQUIRE(cli::run("reproduce table1 --seed 3 --out " + d1.string()).status == 0);
    REQUIRE(cli::run("reproduce table1 --seed 3 --out " + d2.string()).status == 0);
    for (const char* f : {"table1.csv", "table1.json"}) CHECK(cli::slurp(d1 / f) == cli::slurp(d2 / f));
    CHECK(cli::slurp(d1 / "metadata.json").find("wall_time_s") != std::string::npos);
}
