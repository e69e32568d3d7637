#include "forge/catalog.hpp"
#include "forge/charts.hpp"
#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/warped.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace forge;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("forge-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::pair<int, int> count_obj(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  int v = 0, f = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  return {v, f};
}

}  // namespace

TEST_CASE("double formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1e-17}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("chart CSV round trip is bit-exact and deterministic") {
  TempDir tmp("csv");
  const Chart f = charts::enneper(uniform_grid({{-0.7, 0.3}, {-0.2, 0.9}}, 21));
  write_chart_csv(f, tmp.path / "a.csv");
  write_chart_csv(f, tmp.path / "b.csv");
  CHECK(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));
  const Chart back = read_chart_csv(tmp.path / "a.csv");
  CHECK(back.grid().resolution() == f.grid().resolution());
  CHECK((back.samples().array() == f.samples().array()).all());
  const Chart with_grid = read_chart_csv(tmp.path / "a.csv", f.grid());
  CHECK((with_grid.samples().array() == f.samples().array()).all());
  CHECK(slurp(tmp.path / "a.csv").substr(0, 15) == "x0,x1,y0,y1,y2\n");

  CHECK(code_of([&] { read_chart_csv(tmp.path / "missing.csv"); }) == ErrorCode::IoError);
  std::ofstream(tmp.path / "bad.csv") << "x0,y0\n0,1\n0.5,abc\n";
  CHECK(code_of([&] { read_chart_csv(tmp.path / "bad.csv"); }) == ErrorCode::ParseError);
}

TEST_CASE("OBJ slices") {
  TempDir tmp("obj");
  const Chart cat = charts::catenoid(uniform_grid({{-0.5, 0.5}, {-0.5, 0.5}}, 64));
  write_obj_slice(cat, tmp.path / "cat.obj");
  CHECK(count_obj(tmp.path / "cat.obj") == std::pair<int, int>{4096, 2 * 63 * 63});

  const DeformationPair p = catalog_entry("curve-cone-n3").build(12);
  ObjSlice s;
  s.axes = {0, 1};
  s.fixed = {-1, -1, 6};
  write_obj_slice(p.f, tmp.path / "slice.obj", s);
  CHECK(count_obj(tmp.path / "slice.obj") == std::pair<int, int>{144, 2 * 11 * 11});
  // The first vertex is the sample at index (0, 0, 6), first three coordinates.
  std::istringstream in(slurp(tmp.path / "slice.obj"));
  std::string line;
  while (std::getline(in, line) && line.rfind("v ", 0) != 0) {
  }
  std::istringstream vs(line.substr(2));
  Vec v(3);
  vs >> v[0] >> v[1] >> v[2];
  CHECK((v - p.f.sample(p.f.grid().node(std::vector<int>{0, 0, 6})).head(3)).norm() == 0.0);

  const Chart curve = charts::line_curve(uniform_grid({{0.0, 1.0}}, 10), Vec::Zero(2), Vec::Ones(2));
  CHECK(code_of([&] { write_obj_slice(curve, tmp.path / "c.obj"); }) == ErrorCode::SliceUnavailable);
  s.axes = {0, 0};
  CHECK(code_of([&] { write_obj_slice(p.f, tmp.path / "x.obj", s); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pair directory round trip") {
  TempDir tmp("pair");
  const CatalogEntry& e = catalog_entry("circular-cone-inversion");
  const DeformationPair p = e.build(24);
  write_pair(p, tmp.path, &e);
  for (const char* name : {"f.csv", "g.csv", "fields.csv", "manifest.json"}) CHECK(fs::exists(tmp.path / name));

  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
  CHECK(manifest.at("example") == e.name);
  CHECK(manifest.at("constants").at("codazzi").get<double>() == e.constants.at("codazzi"));

  std::istringstream fields(slurp(tmp.path / "fields.csv"));
  std::string head;
  std::getline(fields, head);
  CHECK(head == "x0,x1,Phi00,Phi01,Phi10,Phi11,T00,T01,T10,T11,phi");
  std::size_t rows = 0;
  for (std::string l; std::getline(fields, l);) ++rows;
  CHECK(rows == p.f.grid().node_count());

  const LoadedPair lp = read_pair(tmp.path);
  CHECK(lp.pair.id == p.id);
  CHECK(lp.rank_pattern == e.rank_pattern);
  CHECK((lp.pair.g.samples().array() == p.g.samples().array()).all());
  // Verification depends only on samples, so the loaded pair reports the same residuals.
  const VerificationReport a = verify_pair(p, e.verify_options());
  const VerificationReport b = verify_pair(lp.pair, lp.options);
  for (const auto& name : residual_names()) CHECK(a.residuals.at(name) == b.residuals.at(name));
  CHECK(b.passed());

  CHECK(code_of([&] { read_pair(tmp.path / "nothing-here"); }) == ErrorCode::MissingPair);
}

TEST_CASE("reports and the long table") {
  TempDir tmp("report");
  CHECK(code_of([&] { report_table(tmp.path); }) == ErrorCode::MissingReports);

  const CatalogEntry& e = catalog_entry("catenoid-helicoid");
  const ConvergenceStudy s = convergence_study(e.build, {16, 32}, e.verify_options());
  write_report(s, tmp.path / "a" / "report.json");
  const auto j = nlohmann::json::parse(slurp(tmp.path / "a" / "report.json"));
  for (const char* key : {"pair_id", "grid", "residuals", "rank_pattern", "convergence"}) CHECK(j.contains(key));
  CHECK(j.at("convergence").size() == 2);
  CHECK(j.at("factors").at("codazzi").size() == 1);
  CHECK(j.at("rank_pattern") == nlohmann::json({0, 0, 2}));

  const std::string table = report_table(tmp.path);
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  CHECK(line == "example,residual_name,h,value");
  std::map<std::string, int> per_residual;
  while (std::getline(in, line)) ++per_residual[line.substr(0, line.find(',', line.find(',') + 1))];
  CHECK(per_residual.size() == residual_names().size());
  for (const auto& [k, n] : per_residual) CHECK(n == 2);
  CHECK(report_table(tmp.path) == table);
}
