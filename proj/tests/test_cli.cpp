#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "bbm_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(BBM_CLI_PATH) + " " + args + " >" + (workdir() / "stdout.txt").string() +
                          " 2>" + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string out_path(const std::string& name) { return (workdir() / name).string(); }

const std::string kSmall = "--modes 64 --time 1 --epsilon 0.5,1 --tau 0.1,0.05,0.025 --scheme lie,strang";

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("simulate --modes notanumber") == 1);
  CHECK(run("simulate --scheme rk4") == 1);
  CHECK(run("simulate --modes 33") == 1);
  CHECK(run("simulate --tau 0.3 --time 1") == 1);
  CHECK(run("convergence --epsilon 2 --time 1 --tau 0.5") == 1);
  CHECK(run("convergence --format xml " + kSmall) == 1);
  CHECK(run("convergence --config " + out_path("missing.cfg")) == 1);
}

TEST_CASE("simulate writes snapshot CSV") {
  REQUIRE(run("simulate --modes 16 --time 0.5 --tau 0.1 --epsilon 0.3 --stride 1 --out " + out_path("sim.csv")) ==
          0);
  const std::string csv = slurp(out_path("sim.csv"));
  std::size_t blocks = 0;
  for (auto p = csv.find("x,u\n"); p != std::string::npos; p = csv.find("x,u\n", p + 1)) ++blocks;
  CHECK(blocks == 6);
  CHECK(csv.rfind("# scheme=strang\n# epsilon=0.29999999999999999\n# tau=0.10000000000000001\n# t=0\n", 0) == 0);
}

TEST_CASE("convergence reports are byte-identical across runs") {
  REQUIRE(run("convergence " + kSmall + " --format csv --out " + out_path("a.csv")) == 0);
  REQUIRE(run("convergence " + kSmall + " --format csv --threads 1 --out " + out_path("b.csv")) == 0);
  CHECK(slurp(out_path("a.csv")) == slurp(out_path("b.csv")));
  CHECK(slurp(out_path("a.csv")).rfind("scheme,epsilon,tau,error_l2,error_hr,runtime_ms,flag\n", 0) == 0);

  REQUIRE(run("convergence " + kSmall + " --seed 9 --format json --out " + out_path("a.json")) == 0);
  REQUIRE(run("convergence " + kSmall + " --seed 9 --format json --out " + out_path("b.json")) == 0);
  CHECK(slurp(out_path("a.json")) == slurp(out_path("b.json")));
  const auto doc = nlohmann::json::parse(slurp(out_path("a.json")));
  CHECK(doc["records"].size() == 12);
  CHECK(doc["metadata"]["seed"] == 9);
  CHECK(doc["metadata"]["n_points"] == 64);

  REQUIRE(run("convergence " + kSmall + " --format plotdata --out " + out_path("a.dat")) == 0);
  CHECK(slurp(out_path("a.dat")).find("# scheme=strang epsilon=1\n") != std::string::npos);
}

TEST_CASE("config file values apply and flags override them") {
  const fs::path cfg = workdir() / "study.cfg";
  {
    std::ofstream os(cfg);
    os << "# study settings\n"
       << "modes = 64\n"
       << "time = 1\n"
       << "scheme = lie\n"
       << "epsilon = 0.25\n"
       << "tau = 0.1,0.05,0.025\n"
       << "format = csv\n";
  }
  REQUIRE(run("convergence --config " + cfg.string() + " --out " + out_path("cfg.csv")) == 0);
  const std::string from_file = slurp(out_path("cfg.csv"));
  CHECK(from_file.find("lie,0.25,0.10000000000000001,") != std::string::npos);
  CHECK(from_file.find("strang") == std::string::npos);

  REQUIRE(run("convergence --config " + cfg.string() + " --scheme strang --epsilon 0.75 --out " +
              out_path("cfg2.csv")) == 0);
  const std::string overridden = slurp(out_path("cfg2.csv"));
  CHECK(overridden.find("strang,0.75,") != std::string::npos);
  CHECK(overridden.find("lie") == std::string::npos);
  CHECK(overridden.find("0.25") == std::string::npos);

  std::ofstream(workdir() / "bad.cfg") << "modes = 63\n";
  CHECK(run("convergence --config " + (workdir() / "bad.cfg").string()) == 1);
}

TEST_CASE("unwritable output path is an invalid configuration") {
  CHECK(run("convergence " + kSmall + " --out " + out_path("no/such/dir/x.csv")) == 1);
}

TEST_CASE("lemmas exit status reflects violations") {
  REQUIRE(run("lemmas --trials 10 --out " + out_path("lemmas.json")) == 0);
  const auto doc = nlohmann::json::parse(slurp(out_path("lemmas.json")));
  CHECK(doc.size() == 30);
  for (const auto& row : doc) CHECK(row["pass"] == true);
  CHECK(run("lemmas --trials 10 --weight shifted") == 2);
  CHECK(run("lemmas --sigma 1.5") == 1);
  CHECK(run("lemmas --weight other") == 1);
}

TEST_CASE("local-order and kdv-limit subcommands") {
  REQUIRE(run("local-order --modes 64 --epsilon 1 --order 1,2 --out " + out_path("lo.json")) == 0);
  const auto lo = nlohmann::json::parse(slurp(out_path("lo.json")));
  REQUIRE(lo.size() == 2);
  CHECK(lo[0]["slope"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
  CHECK(lo[1]["slope"].get<double>() == doctest::Approx(3.0).epsilon(0.1));

  REQUIRE(run("kdv-limit --modes 64 --time 1 --tau 0.01 --epsilon 0.1,0.2 --format json --out " +
              out_path("kdv.json")) == 0);
  const auto kdv = nlohmann::json::parse(slurp(out_path("kdv.json")));
  CHECK(kdv["records"].size() == 2);
  CHECK(kdv.contains("slope"));
  CHECK(run("kdv-limit --dispersion 0,1 --tau 0.01 --time 1") == 1);
  CHECK(run("kdv-limit --format plotdata --tau 0.01 --time 1") == 1);
}
