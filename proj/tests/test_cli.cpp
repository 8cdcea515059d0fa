#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = FIXTURE_DIR;
const std::string kTool = WPCOUNT_PATH;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  fs::path out = fs::temp_directory_path() / "wpc_cli_stdout.txt";
  std::string cmd = kTool + " " + args + " > " + out.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string write_config(const std::string& name, const std::string& body) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validate") {
  auto r = run("validate --config " + kFixtures + "/x1_2.json");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["e"] == 1);
  CHECK(j["valid"] == true);
  CHECK(run("--config " + kFixtures + "/x1_3.json validate").code == 0);
  auto bad = write_config("wpc_common_zero.json",
                          R"({"name":"c","source_weights":[1,1],"target_weights":[1,1],"polynomials":["x1^2","x1*x2"]})");
  auto rb = run("validate --config " + bad);
  CHECK(rb.code == 2);
  auto jb = nlohmann::json::parse(rb.out);
  CHECK(jb["failed_condition"] == 2);
  CHECK(jb["common_zero"]["witness"].get<std::string>().size() > 0);
  CHECK(run("analyze --config " + bad).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run("").code == 1);
  CHECK(run("analyze").code == 1);
  CHECK(run("analyze --config /nonexistent.json").code == 1);
  CHECK(run("analyze --config " + kFixtures + "/x1_2.json --format xml").code == 1);
  CHECK(run("count --config " + kFixtures + "/x1_2.json").code == 1);
  CHECK(run("count --config " + kFixtures + "/x1_2.json --T abc").code == 1);
}

TEST_CASE("analyze") {
  auto r = run("analyze --config " + kFixtures + "/x1_2.json");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["discrepancy_set"] == nlohmann::json::array({"1", "2"}));
  CHECK(j["bad_primes"] == nlohmann::json::array({2}));
  CHECK(j["c_phi"] == "3/2");
  auto j3 = nlohmann::json::parse(run("analyze --config " + kFixtures + "/x1_3.json").out);
  CHECK(j3["discrepancy_set"] == nlohmann::json::array({"1"}));
  CHECK(j3["c_phi"] == "1");
  auto ji = nlohmann::json::parse(run("analyze --config " + kFixtures + "/identity_p11.json").out);
  CHECK(ji["c_phi"] == "1");
  auto inf = write_config("wpc_infinite.json",
                          R"({"name":"sq","source_weights":[2,4],"target_weights":[2,4],"polynomials":["x1^2","x2^2"]})");
  CHECK(run("analyze --config " + inf).code == 3);
}

TEST_CASE("constant, volume and count") {
  auto c = nlohmann::json::parse(run("constant --config " + kFixtures + "/x1_2.json").out);
  CHECK(c["leading_constant"].get<double>() == doctest::Approx(1.87086017587).epsilon(1e-10));
  auto v = nlohmann::json::parse(
      run("volume --config " + kFixtures + "/x1_3.json --method both --samples 200000 --seed 3").out);
  CHECK(v["slice"]["value"].get<double>() == doctest::Approx(1.82178991782).epsilon(1e-10));
  CHECK(v["monte_carlo"]["seed"] == 3);
  auto n = nlohmann::json::parse(run("count --config " + kFixtures + "/x1_2.json --T 1 --by-discrepancy").out);
  CHECK(n["mass"] == "3");
  CHECK(n["by_discrepancy"]["2"] == "2");
  CHECK(run("count --config " + kFixtures + "/x1_2.json --T 1000").code == 4);
  CHECK(run("count --config " + kFixtures + "/x1_3.json --T 1 --exclude-singular").code == 1);

  fs::path grid = fs::temp_directory_path() / "wpc_grid.csv";
  fs::remove(grid);
  CHECK(run("volume --config " + kFixtures + "/x1_2.json --dump-region-grid " + grid.string() + " --dump-resolution 50")
            .code == 0);
  CHECK(fs::file_size(grid) > 0);
}

TEST_CASE("verify writes reproducible reports") {
  fs::path d1 = fs::temp_directory_path() / "wpc_verify_1", d2 = fs::temp_directory_path() / "wpc_verify_2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  std::string base = "--config " + kFixtures + "/x1_3.json --format both verify --ladder 5,10,20";
  REQUIRE(run("--out " + d1.string() + " " + base).code == 0);
  REQUIRE(run("--out " + d2.string() + " --threads 2 " + base).code == 0);
  CHECK(slurp(d1 / "verify.json") == slurp(d2 / "verify.json"));
  CHECK(slurp(d1 / "verify.csv") == slurp(d2 / "verify.csv"));
  std::string csv = slurp(d1 / "verify.csv");
  CHECK(csv.rfind("T,mass_num,mass_den,fitted,predicted,rel_gap\n", 0) == 0);
  auto m = nlohmann::json::parse(slurp(d1 / "manifest.json"));
  CHECK(m["subcommand"] == "verify");
  CHECK(m["config_digest"].get<std::string>().size() == 16);
  CHECK(m["output_digests"].contains("verify.csv"));
}
