#include "forge/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace forge;

namespace {

struct Scratch {
  fs::path path = fs::temp_directory_path() / ("forge-cli-" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
};

fs::path scratch() {
  static const Scratch dir;
  return dir.path;
}

int run(const std::string& args) {
  const std::string cmd = std::string(FORGE_CLI_PATH) + " " + args + " > " + (scratch() / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("build writes the pair files") {
  const fs::path out = scratch() / "cat";
  REQUIRE(run("build --example catenoid-helicoid --out " + out.string()) == 0);
  for (const char* f : {"f.csv", "g.csv", "fields.csv", "manifest.json"}) CHECK(fs::exists(out / f));
  const LoadedPair lp = read_pair(out);
  CHECK(lp.pair.f.grid().resolution() == std::vector<int>{64, 64});
  CHECK(lp.pair.f.ambient_dim() == 3);

  // Identical configuration gives byte-identical CSV.
  const fs::path again = scratch() / "cat2";
  REQUIRE(run("build -e catenoid-helicoid -o " + again.string()) == 0);
  for (const char* f : {"f.csv", "g.csv", "fields.csv"}) CHECK(slurp(out / f) == slurp(again / f));

  REQUIRE(run("build -e curve-cone-n3 -r 12 --no-fields -o " + (scratch() / "cone").string()) == 0);
  CHECK(read_pair(scratch() / "cone").pair.f.grid().resolution() == std::vector<int>{12, 12, 12});
  CHECK_FALSE(fs::exists(scratch() / "cone" / "fields.csv"));

  CHECK(run("build -e no-such-example -o " + (scratch() / "x").string()) == 27);
  CHECK(run("build -e catenoid-helicoid -r 4 -o " + (scratch() / "x").string()) != 0);
}

TEST_CASE("verify exit codes") {
  const fs::path out = scratch() / "cat";
  if (!fs::exists(out / "manifest.json")) REQUIRE(run("build -e catenoid-helicoid -o " + out.string()) == 0);
  CHECK(run("verify --pair " + out.string() + " --out " + (scratch() / "v0").string()) == 0);
  CHECK(fs::exists(scratch() / "v0" / "report.json"));

  // Perturb g by 1e-3 noise.
  const fs::path noisy = scratch() / "noisy";
  fs::create_directories(noisy);
  for (const char* f : {"f.csv", "manifest.json"}) fs::copy_file(out / f, noisy / f, fs::copy_options::overwrite_existing);
  const Chart g = read_chart_csv(out / "g.csv");
  Mat s = g.samples();
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 1e-3);
  for (Eigen::Index c = 0; c < s.cols(); ++c)
    for (Eigen::Index r = 0; r < s.rows(); ++r) s(r, c) += noise(rng);
  write_chart_csv(Chart::from_samples("g", g.grid(), s), noisy / "g.csv");
  const int code = run("verify --pair " + noisy.string() + " --out " + (scratch() / "v1").string());
  CHECK(code == 22);
  CHECK(slurp(scratch() / "last.log").find("FAIL: gauss") != std::string::npos);

  CHECK(run("verify -e catenoid-helicoid -r 16,32 --tol codazzi=1e-9 -o " + (scratch() / "v2").string()) == 33);
  CHECK(run("verify -e catenoid-helicoid -r 16 --tol codazzi -o " + (scratch() / "v2").string()) == 1);
  CHECK(run("verify -e catenoid-helicoid -r 16 --tol nonsense=1 -o " + (scratch() / "v2").string()) == 1);
}

TEST_CASE("verify sweep and report table") {
  const fs::path run_dir = scratch() / "sweep";
  REQUIRE(run("verify -e catenoid-helicoid,cylinder-dual -r 16,32 -o " + run_dir.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(run_dir / "cylinder-dual" / "report.json"));
  CHECK(j.at("convergence").size() == 2);
  CHECK(j.at("factors").contains("vergasta"));
  REQUIRE(run("report -o " + run_dir.string()) == 0);
  const std::string table = slurp(run_dir / "residuals.csv");
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  CHECK(line == "example,residual_name,h,value");
  std::map<std::string, int> rows;
  while (std::getline(in, line)) ++rows[line.substr(0, line.find(','))];
  CHECK(rows.size() == 2);
  for (const auto& [k, n] : rows) CHECK(n == 2 * static_cast<int>(residual_names().size()));

  fs::create_directories(scratch() / "empty");
  CHECK(run("report -o " + (scratch() / "empty").string()) == 29);
}

TEST_CASE("export") {
  const fs::path out = scratch() / "exp";
  REQUIRE(run("export -e catenoid-helicoid -o " + out.string()) == 0);
  CHECK(fs::exists(out / "f.obj"));
  CHECK(fs::exists(out / "g.csv"));
  REQUIRE(run("export -e curve-cone-n3 -r 10 --which f --slice 0,1 --fixed -1,-1,5 -o " + out.string() + "/cone") == 0);
  CHECK(fs::exists(out / "cone" / "f.obj"));
  CHECK_FALSE(fs::exists(out / "cone" / "g.obj"));
  REQUIRE(run("export -e curve-cone-n3 -r 10 --slice 0,3 -o " + out.string() + "/bad") == 1);
}

TEST_CASE("run file") {
  const fs::path cfg = scratch() / "run.json";
  std::ofstream(cfg) << R"({"example": ["cylinder-dual"], "resolutions": [16], "tolerances": {"cluster": 10}})";
  CHECK(run("verify -e " + cfg.string() + " -o " + (scratch() / "runfile").string()) == 0);
  CHECK(fs::exists(scratch() / "runfile" / "report.json"));
}
