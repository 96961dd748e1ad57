#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "liftmc/model.hpp"

namespace fs = std::filesystem;

namespace {

const char* kCli = LIFTMC_CLI_PATH;

struct CliResult {
  int exit_code;
  std::string out;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "liftmc_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  fs::path out = work_dir() / "stdout.txt";
  std::string cmd = std::string(kCli) + " " + args + " > " + out.string() +
                    " 2> " + (work_dir() / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out)};
}

void put_file(const fs::path& path, const std::string& content) {
  std::ofstream(path, std::ios::binary) << content;
}

}  // namespace

TEST_CASE("cli help text is golden") {
  CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  std::string golden = slurp(fs::path(LIFTMC_GOLDEN_DIR) / "help.txt");
  REQUIRE_FALSE(golden.empty());
  CHECK(r.out == golden);

  // every subcommand enumerates its flags
  for (const char* sub : {"gen", "symmetries", "sample", "bench", "oracle"}) {
    CliResult sr = run_cli(std::string(sub) + " --help");
    CHECK(sr.exit_code == 0);
    CHECK(sr.out.find("--help") != std::string::npos);
  }
}

TEST_CASE("symmetries subcommand finds the reduced-model swap") {
  fs::path dir = work_dir();
  put_file(dir / "m.model",
           "var P\nvar Q\nvar R\nvar S\n"
           "1.5 : P | Q\n"
           "1.5 : R | Q | S\n");
  put_file(dir / "ctx.txt", "R=0\n");

  CliResult r = run_cli("symmetries --model " + (dir / "m.model").string() +
                        " --context " + (dir / "ctx.txt").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("(P S)") != std::string::npos);

  // without the context only R<->S survives (P is pinned by clause arity)
  CliResult r2 = run_cli("symmetries --model " + (dir / "m.model").string());
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.find("(R S)") != std::string::npos);
  CHECK(r2.out.find("(P") == std::string::npos);
}

TEST_CASE("sample is byte-deterministic under a fixed seed") {
  fs::path dir = work_dir();
  put_file(dir / "pq.model", "var P\nvar Q\n0.8 : P\n0.8 : Q\n");
  std::string base = "sample --model " + (dir / "pq.model").string() +
                     " --kind orbital --seed 99 --steps 20000"
                     " --schedule-points 4 --out ";
  CliResult a = run_cli(base + (dir / "a.csv").string());
  CliResult b = run_cli(base + (dir / "b.csv").string());
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  std::string csv_a = slurp(dir / "a.csv");
  CHECK_FALSE(csv_a.empty());
  CHECK(csv_a == slurp(dir / "b.csv"));
  CHECK(csv_a.find("run_id,step,wall_clock_seconds,variable,marginal_estimate") !=
        std::string::npos);
  CHECK(csv_a.find("# config_hash: ") != std::string::npos);
}

TEST_CASE("oracle stationarity on the movie model exits 0") {
  fs::path dir = work_dir();
  put_file(dir / "movie.model",
           "var Genre\nvar A\nvar B\n"
           "1 : !Genre | A | !B\n"
           "1 : !Genre | !A | B\n"
           "0.5 : !Genre | A\n"
           "0.5 : !Genre | B\n"
           "0.7 : Genre | !A\n"
           "0.2 : Genre\n");
  CliResult r = run_cli("oracle --model " + (dir / "movie.model").string() +
                        " --stationarity --kind con_mcmc --alpha 0.01"
                        " --context-vars Genre");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("stationarity_residual") != std::string::npos);
  CHECK(r.out.find("ok") != std::string::npos);

  CliResult d = run_cli("oracle --model " + (dir / "movie.model").string() +
                        " --distribution");
  CHECK(d.exit_code == 0);
  CHECK(d.out.find("marginal Genre") != std::string::npos);
}

TEST_CASE("gen writes a parseable model with its context sidecar") {
  fs::path dir = work_dir();
  put_file(dir / "params.cfg",
           "num_students = 5\ndorm_size = 5\ngroup_size = 5\nseed = 3\n");
  CliResult r = run_cli("gen --family sports --params " +
                        (dir / "params.cfg").string() + " --out " +
                        (dir / "gen_sports").string());
  CHECK(r.exit_code == 0);
  liftmc::Model m = liftmc::parse_model(slurp(dir / "gen_sports.model"));
  CHECK(m.num_variables() == 16);  // Sport + 5 students + 10 pairs
  CHECK(slurp(dir / "gen_sports.ctxvars") == "Sport\n");
}

TEST_CASE("bench runs a tiny virtual-clock spec deterministically") {
  fs::path dir = work_dir();
  put_file(dir / "tiny.spec",
           "[experiment]\n"
           "name = tiny\n"
           "repeats = 2\n"
           "budget_seconds = 0.5\n"
           "schedule_points = 2\n"
           "clock = virtual\n"
           "steps_per_second = 2000\n"
           "truth_mode = exact\n"
           "[domain]\n"
           "family = sports\n"
           "num_students = 5\n"
           "dorm_size = 5\n"
           "group_size = 5\n"
           "[chain gibbs]\n"
           "kind = gibbs\n"
           "[chain con]\n"
           "kind = con_mcmc\n"
           "alpha = 0.01\n");
  std::string cmd = "bench --spec " + (dir / "tiny.spec").string() +
                    " --seed 7 --out ";
  CliResult a = run_cli(cmd + (dir / "out_a").string());
  CliResult b = run_cli(cmd + (dir / "out_b").string());
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(dir / "out_a/tiny_runs.csv") == slurp(dir / "out_b/tiny_runs.csv"));
  CHECK(slurp(dir / "out_a/tiny_summary.csv") ==
        slurp(dir / "out_b/tiny_summary.csv"));
  CHECK_FALSE(slurp(dir / "out_a/tiny_runs.csv").empty());
}

TEST_CASE("exit codes: usage 1, input 2, resource 3") {
  CHECK(run_cli("no-such-subcommand").exit_code == 1);
  CHECK(run_cli("sample --model /nonexistent.model --seed 1 --steps 10")
            .exit_code == 2);
  CHECK(run_cli("symmetries").exit_code == 1);  // missing required flag

  fs::path dir = work_dir();
  std::string big = "";
  for (int i = 0; i < 21; ++i) big += "var x" + std::to_string(i) + "\n";
  put_file(dir / "big.model", big);
  CHECK(run_cli("oracle --model " + (dir / "big.model").string() +
                " --distribution")
            .exit_code == 3);

  put_file(dir / "broken.model", "var P\nnot a line\n");
  CHECK(run_cli("symmetries --model " + (dir / "broken.model").string())
            .exit_code == 2);
}
