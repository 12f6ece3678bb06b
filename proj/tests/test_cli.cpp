#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "frc/problem_io.hpp"
#include "frc/runner.hpp"
#include "json.hpp"

using namespace frc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* benchmark_path() { return CONFIG_DIR "/benchmark.json"; }

// Fresh per-test scratch directory, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("frc_cli_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("the benchmark problem file parses with its documented fields") {
    const ProblemFile pf = load_problem(benchmark_path());
    const ProblemSpec& p = pf.problem;

    CHECK(p.alpha == 0.5);
    CHECK(p.beta == 0.25);
    CHECK(p.horizon == 1.0);
    REQUIRE(p.x0.size() == 1);
    CHECK(p.x0(0) == 0.0);
    CHECK(p.triple.n == 1);
    CHECK(p.triple.L(0, 0) == 1.0);
    CHECK(p.triple.M(0, 0) == 1.0);
    CHECK(p.triple.E(0, 0) == 0.0);
    CHECK(p.channels == 1);
    REQUIRE(p.B.size() == 1);
    CHECK(p.B[0](0, 0) == 1.0);
    REQUIRE(p.dynamics.D.size() == 1);
    CHECK(p.dynamics.D[0](0, 0) == 1.0);
    REQUIRE(p.constraint.atoms.size() == 2);
    CHECK(p.constraint.atoms[0](0) == -1.0);
    CHECK(p.constraint.atoms[1](0) == 1.0);
    REQUIRE(p.costs.size() == 1);
    CHECK(p.costs[0].P(0, 0) == 1.0);
    CHECK(p.costs[0].q_kind == ControlCost::zero);
    CHECK(pf.solver.tol == 1e-10);
    CHECK(pf.solver.max_iter == 100);
}

TEST_CASE("serialization round-trips to the same text and instance") {
    const ProblemFile pf = load_problem(benchmark_path());
    const std::string once = serialize_problem(pf);
    const ProblemFile back = parse_problem(once);
    CHECK(serialize_problem(back) == once);
    CHECK(back.problem.alpha == pf.problem.alpha);
    CHECK(back.problem.beta == pf.problem.beta);
    CHECK(back.solver.tol == pf.solver.tol);
    CHECK(back.problem.constraint.atoms.size() == pf.problem.constraint.atoms.size());
}

TEST_CASE("hypothesis violations name the clause") {
    ProblemFile bad = load_problem(benchmark_path());
    bad.problem.beta = 0.6;
    const std::string text = serialize_problem(bad);
    try {
        parse_problem(text);
        FAIL("expected a hypothesis rejection");
    } catch (const HypothesisError& e) {
        CHECK(e.clause == "H1.3");
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
    }
}

TEST_CASE("schema violations point at the offending field") {
    SUBCASE("missing atoms list") {
        nlohmann::json root = nlohmann::json::parse(slurp(benchmark_path()));
        root["constraint"].erase("atoms");
        try {
            parse_problem(root.dump());
            FAIL("expected a schema rejection");
        } catch (const SchemaError& e) {
            CHECK(e.field == "constraint.atoms");
        }
    }

    SUBCASE("text that is not JSON") {
        CHECK_THROWS_AS(parse_problem("{ this is not json"), SchemaError);
    }

    SUBCASE("unreadable path") {
        CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), SchemaError);
    }
}

TEST_CASE("bad configurations exit with code 1 and an error line") {
    std::ostringstream log;

    RunConfig missing;
    missing.problem_path = "/nonexistent/problem.json";
    missing.command = Command::solve_rp;
    CHECK(run(missing, log) == 1);
    CHECK(log.str().find("error:") != std::string::npos);

    RunConfig tiny;
    tiny.problem_path = benchmark_path();
    tiny.command = Command::solve_rp;
    tiny.grid_n = 1;
    std::ostringstream log2;
    CHECK(run(tiny, log2) == 1);
    CHECK(log2.str().find("error:") != std::string::npos);
}

TEST_CASE("the experiment command writes its artifacts deterministically") {
    TempDir a("exp_a"), b("exp_b");
    RunConfig cfg;
    cfg.problem_path = benchmark_path();
    cfg.command = Command::relax_exp;
    cfg.grid_n = 32;
    cfg.n_list = {4, 16};
    cfg.chatter_cells = 8;
    cfg.seed = 7;

    cfg.out_dir = a.path.string();
    std::ostringstream log_a;
    REQUIRE(run(cfg, log_a) == 0);

    cfg.out_dir = b.path.string();
    std::ostringstream log_b;
    REQUIRE(run(cfg, log_b) == 0);

    for (const char* name : {"report.csv", "solution.csv", "summary.txt"}) {
        CHECK(fs::exists(a.path / name));
        CHECK(fs::exists(b.path / name));
    }

    const std::string report = slurp(a.path / "report.csv");
    CHECK(report == slurp(b.path / "report.csv"));
    CHECK(report.rfind("N,traj_err_sup,weak_norm_dist,gap,runtime_ms\n", 0) == 0);
    CHECK(std::count(report.begin(), report.end(), '\n') == 3);

    const std::string summary = slurp(a.path / "summary.txt");
    CHECK(summary.find("L0") != std::string::npos);
    CHECK(summary.find("J**") != std::string::npos);
}

TEST_CASE("solve commands emit a trajectory table and a summary") {
    TempDir dir("solve");
    RunConfig cfg;
    cfg.problem_path = benchmark_path();
    cfg.command = Command::solve_rp;
    cfg.grid_n = 8;
    cfg.out_dir = dir.path.string();

    std::ostringstream log;
    REQUIRE(run(cfg, log) == 0);
    const std::string solution = slurp(dir.path / "solution.csv");
    CHECK(solution.rfind("t,x1,u1_1\n", 0) == 0);
    CHECK(std::count(solution.begin(), solution.end(), '\n') == 10);

    cfg.command = Command::solve_p;
    std::ostringstream log2;
    CHECK(run(cfg, log2) == 0);
    CHECK(slurp(dir.path / "summary.txt").find("J") != std::string::npos);
}

TEST_CASE("the verify command reports a passing check matrix") {
    TempDir dir("verify");
    RunConfig cfg;
    cfg.command = Command::verify;
    cfg.out_dir = dir.path.string();

    std::ostringstream log;
    CHECK(run(cfg, log) == 0);
    CHECK(log.str().find("[PASS]") != std::string::npos);
    CHECK(log.str().find("[FAIL]") == std::string::npos);
}
