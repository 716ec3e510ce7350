#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "frostman/json_io.hpp"

using namespace frostman;
namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* env = std::getenv("FROSTMAN_CLI");
  REQUIRE_MESSAGE(env != nullptr, "FROSTMAN_CLI must point at the binary");
  return env;
}

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "frostman_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd =
      "cd " + workdir().string() + " && " + cli() + " " + args +
      " > cli_stdout.txt 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + p.string()).c_str());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::json slurp_json(const fs::path& p) { return io::json::parse(slurp(p)); }

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace

TEST_CASE("gen writes measures with the expected shape") {
  REQUIRE(run("gen --kind cantor --level 3 --dim 1 --out cantor3.json") == 0);
  const auto j = slurp_json(workdir() / "cantor3.json");
  CHECK(j.at("dim") == 1);
  CHECK(j.at("atoms").size() == 8);
  CHECK(j.at("resolution").get<double>() ==
        doctest::Approx(std::pow(3.0, -3.0) * 1.0));

  REQUIRE(run("gen --kind power_law --beta 0.5 --n 4 --out pl.json") == 0);
  const auto pl = slurp_json(workdir() / "pl.json");
  REQUIRE(pl.at("atoms").size() == 4);
  CHECK(pl.at("atoms")[0].at("w").get<double>() == doctest::Approx(0.5));

  REQUIRE(run("gen --kind random --n 25 --dim 2 --seed 9 --sign-mix 0.3 "
              "--out rnd.json") == 0);
  CHECK(slurp_json(workdir() / "rnd.json").at("atoms").size() == 25);

  CHECK(run("gen --kind nonsense --out x.json") == 3);
}

TEST_CASE("gen grid_gradient second differences of x^2") {
  REQUIRE(run("gen --kind grid_gradient --f x^2 --n 11 --m 2 --step 0.1 "
              "--out grad.json") == 0);
  const auto j = slurp_json(workdir() / "grad.json");
  REQUIRE(j.at("atoms").size() == 9);
  for (const auto& a : j.at("atoms"))
    CHECK(a.at("w").get<double>() == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("supercover output is byte-reproducible and carries a manifest") {
  REQUIRE(run("gen --kind cantor --level 5 --dim 1 --out c5.json") == 0);
  REQUIRE(run("supercover --cloud c5.json --alpha 0.6309 --eps 0.037 "
              "--a 1.5 --mode geometric --seed 3 --out cov_a.json") == 0);
  REQUIRE(run("supercover --cloud c5.json --alpha 0.6309 --eps 0.037 "
              "--a 1.5 --mode geometric --seed 3 --out cov_b.json") == 0);
  CHECK(slurp(workdir() / "cov_a.json") == slurp(workdir() / "cov_b.json"));

  const auto payload = slurp_json(workdir() / "cov_a.json");
  CHECK(payload.at("report").at("valid_supercover").get<bool>());

  const auto man = slurp_json(workdir() / "cov_a.json.manifest.json");
  CHECK(man.at("command") == "supercover");
  CHECK(man.at("seed") == 3);
  CHECK(man.at("tool_version") == "0.1.0");
  CHECK(man.at("input_hashes").size() == 1);
  const std::string recorded = man.at("input_hashes").at("c5.json");
  char expect[20];
  std::snprintf(expect, sizeof expect, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a(slurp(workdir() / "c5.json"))));
  CHECK(recorded == expect);
}

TEST_CASE("supercover bounded mode rejects alpha <= d-1 with exit 3") {
  REQUIRE(run("gen --kind cantor --level 2 --dim 2 --ratio 0.25 "
              "--out dust2.json") == 0);
  CHECK(run("supercover --cloud dust2.json --alpha 1.0 --eps 0.1 --a 50 "
            "--mode bounded --out bad.json") == 3);
  CHECK(run("supercover --cloud dust2.json --alpha 1.5 --eps 0.1 --a 50 "
            "--mode bounded --out dust_cov.json") == 0);
}

TEST_CASE("check flags a point mass with exit 2") {
  write_file(workdir() / "dirac.json",
             R"({"dim": 1, "atoms": [{"x": [0.0], "w": 10.0}]})");
  write_file(workdir() / "hyp.json",
             R"({"constant": 1.0, "gauge_sum": {"alpha": 1.0}})");
  CHECK(run("check --measure dirac.json --hypothesis hyp.json --iters 200") ==
        2);
  const auto out = io::json::parse(slurp(workdir() / "cli_stdout.txt"));
  CHECK(out.at("hypothesis_violated").get<bool>());
  CHECK(out.at("worst_ratio").get<double>() > 1.0);
}

TEST_CASE("check respects a true bound on the Cantor measure") {
  REQUIRE(run("gen --kind cantor --level 6 --dim 1 --out c6.json") == 0);
  write_file(workdir() / "chyp.json",
             R"({"constant": 8.0, "gauge_sum": {"alpha": 0.6309297535714574}})");
  CHECK(run("check --measure c6.json --hypothesis chyp.json --iters 400 "
            "--seed 7") == 0);
}

TEST_CASE("certify teor1 produces a valid certificate and manifest") {
  REQUIRE(run("gen --kind cantor --level 5 --dim 1 --out cm.json") == 0);
  // the measure file doubles as the target cloud
  REQUIRE(run("certify --lemma teor1 --measure cm.json --set cm.json "
              "--alpha 0.6309297535714574 --eps 0.037 --constant 8 "
              "--seed 1 --out cert.json") == 0);
  const auto cert = slurp_json(workdir() / "cert.json");
  CHECK(cert.at("valid").get<bool>());
  CHECK(cert.at("measured_mass").get<double>() == doctest::Approx(1.0));
  CHECK(cert.at("slack").get<double>() >= 1.0);
  const auto man = slurp_json(workdir() / "cert.json.manifest.json");
  CHECK(man.at("command") == "certify");
  CHECK(man.at("input_hashes").size() == 1);  // same file for measure and set
  CHECK(man.at("outputs")[0] == "cert.json");
}

TEST_CASE("certify exit code 2 on an invalid certificate") {
  write_file(workdir() / "spike.json",
             R"({"dim": 1, "atoms": [{"x": [0.1], "w": 5.0},
                                     {"x": [0.9], "w": 5.0}]})");
  // constant far too small for a 10-mass measure: hypothesis must fail
  CHECK(run("certify --lemma teor1 --measure spike.json --set spike.json "
            "--alpha 1.0 --eps 0.1 --constant 0.0001 --seed 1") == 2);
}

TEST_CASE("energy emits a CSV sweep") {
  REQUIRE(run("energy --alphas 0.5,0.7 --level-lo 4 --level-hi 6 "
              "--out energy.csv") == 0);
  const std::string csv = slurp(workdir() / "energy.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "alpha,level,energy,rel_change");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);  // 2 alphas x 3 levels
}

TEST_CASE("dim estimates the Cantor dimension bracket") {
  REQUIRE(run("dim --kind cantor --alphas 0.4,0.6,0.9 --eps 0.1 "
              "--constant 8 --out dim.json") == 0);
  const auto j = slurp_json(workdir() / "dim.json");
  CHECK(j.at("estimate").get<double>() == doctest::Approx(0.6));
  REQUIRE(j.at("table").size() == 3);
}
