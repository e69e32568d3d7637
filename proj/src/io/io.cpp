#include "forge/io.hpp"

#include "forge/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace forge {

using nlohmann::json;

namespace {

void append(std::string& out, double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  out.append(buf, static_cast<std::size_t>(len));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string header(int n, const std::string& prefix, int count) {
  std::string h;
  for (int a = 0; a < n; ++a) h += (a ? ",x" : "x") + std::to_string(a);
  for (int i = 0; i < count; ++i) h += "," + prefix + std::to_string(i);
  return h;
}

void append_point(std::string& out, const Grid& grid, std::size_t k) {
  for (int a = 0; a < grid.dim(); ++a) {
    if (a) out += ',';
    append(out, grid.coordinate(a, grid.coord(k, a)));
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const char* begin, char** end) {
  errno = 0;
  const double v = std::strtod(begin, end);
  if (*end == begin) fail(ErrorCode::ParseError, "expected a number near '" + std::string(begin).substr(0, 20) + "'");
  return v;
}

json grid_json(const Grid& grid) {
  json box = json::array();
  for (const auto& iv : grid.box()) box.push_back({iv.lo, iv.hi});
  return {{"box", box}, {"resolution", grid.resolution()}};
}

Grid grid_from_json(const json& j) {
  std::vector<Interval> box;
  for (const auto& iv : j.at("box")) box.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
  return Grid(box, j.at("resolution").get<std::vector<int>>());
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json residual_map(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = number_or_null(v);
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::string s;
  append(s, x);
  return s;
}

void write_chart_csv(const Chart& chart, const fs::path& path) {
  const Grid& grid = chart.grid();
  const int N = chart.ambient_dim();
  std::string out = header(grid.dim(), "y", N) + "\n";
  out.reserve(grid.node_count() * static_cast<std::size_t>(grid.dim() + N) * 24);
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    append_point(out, grid, k);
    const Vec p = chart.sample(k);
    for (int i = 0; i < N; ++i) {
      out += ',';
      append(out, p[i]);
    }
    out += '\n';
  }
  write_text(path, out);
}

Chart read_chart_csv(const fs::path& path, const std::optional<Grid>& grid_in, const std::string& name) {
  const std::string text = read_text(path);
  const std::size_t eol = text.find('\n');
  if (eol == std::string::npos) fail(ErrorCode::ParseError, path.string() + ": missing header");
  const auto cols = split(text.substr(0, eol));
  int n = 0;
  while (n < static_cast<int>(cols.size()) && !cols[n].empty() && cols[n][0] == 'x') ++n;
  const int N = static_cast<int>(cols.size()) - n;
  if (n == 0 || N <= 0) fail(ErrorCode::ParseError, path.string() + ": header needs axis and ambient columns");

  std::vector<double> axes;
  std::vector<double> values;
  const char* p = text.c_str() + eol + 1;
  const char* end = text.c_str() + text.size();
  while (p < end) {
    if (*p == '\n' || *p == '\r') {
      ++p;
      continue;
    }
    for (int c = 0; c < n + N; ++c) {
      char* next = nullptr;
      const double v = parse_double(p, &next);
      (c < n ? axes : values).push_back(v);
      p = next;
      if (c + 1 < n + N) {
        if (*p != ',') fail(ErrorCode::ParseError, path.string() + ": short row");
        ++p;
      }
    }
    while (p < end && *p != '\n') {
      if (*p != '\r' && *p != ' ') fail(ErrorCode::ParseError, path.string() + ": long row");
      ++p;
    }
  }
  const std::size_t rows = values.size() / static_cast<std::size_t>(N);

  Grid grid;
  if (grid_in) {
    grid = *grid_in;
  } else {
    std::vector<Interval> box(n);
    std::vector<int> res(n);
    for (int a = 0; a < n; ++a) {
      std::set<double> seen;
      for (std::size_t r = 0; r < rows; ++r) seen.insert(axes[r * n + a]);
      if (seen.size() < 2) fail(ErrorCode::ParseError, path.string() + ": degenerate axis column");
      box[a] = {*seen.begin(), *seen.rbegin()};
      res[a] = static_cast<int>(seen.size());
    }
    grid = Grid(box, res);
  }
  if (grid.dim() != n || grid.node_count() != rows)
    fail(ErrorCode::DimensionMismatch, path.string() + ": rows do not match the grid");
  for (std::size_t r = 0; r < rows; ++r)
    for (int a = 0; a < n; ++a) {
      const double x = grid.coordinate(a, grid.coord(r, a));
      if (std::abs(axes[r * n + a] - x) > 1e-9 * (1.0 + std::abs(x)))
        fail(ErrorCode::ParseError, path.string() + ": rows are not in grid order");
    }
  Mat samples(N, static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r)
    for (int i = 0; i < N; ++i) samples(i, static_cast<Eigen::Index>(r)) = values[r * N + i];
  return Chart::from_samples(name.empty() ? path.stem().string() : name, grid, std::move(samples));
}

void write_fields_csv(const DeformationPair& pair, const fs::path& path) {
  const Grid& grid = pair.f.grid();
  const int n = grid.dim();
  const PairFields pf = pair_fields(pair.f, pair.g);
  std::string out;
  for (int a = 0; a < n; ++a) out += (a ? ",x" : "x") + std::to_string(a);
  for (const char* m : {"Phi", "T"})
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out += "," + std::string(m) + std::to_string(i) + std::to_string(j);
  out += ",phi\n";
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    append_point(out, grid, k);
    const Mat Phi = pf.Phi(k);
    const Mat T = pf.T(k);
    for (const Mat* M : {&Phi, &T})
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          out += ',';
          append(out, (*M)(i, j));
        }
    out += ',';
    append(out, pf.phi(k));
    out += '\n';
  }
  write_text(path, out);
}

void write_obj_slice(const Chart& chart, const fs::path& path, const ObjSlice& slice) {
  const Grid& grid = chart.grid();
  const int n = grid.dim();
  if (n < 2) fail(ErrorCode::SliceUnavailable, "a curve has no surface slice; export it as CSV");
  const auto [a, b] = slice.axes;
  if (a == b || a < 0 || b < 0 || a >= n || b >= n) fail(ErrorCode::InvalidArgument, "slice axes out of range");
  std::vector<int> idx(n);
  for (int d = 0; d < n; ++d) {
    idx[d] = d < static_cast<int>(slice.fixed.size()) && slice.fixed[d] >= 0 ? slice.fixed[d] : grid.resolution(d) / 2;
    if (idx[d] >= grid.resolution(d)) fail(ErrorCode::InvalidArgument, "fixed slice index out of range");
  }
  const int N = chart.ambient_dim();
  const int ra = grid.resolution(a), rb = grid.resolution(b);
  std::string out = "# " + chart.name() + "\n";
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < rb; ++j) {
      idx[a] = i;
      idx[b] = j;
      const Vec p = chart.sample(grid.node(idx));
      out += 'v';
      for (int c : slice.coords) {
        out += ' ';
        append(out, c >= 0 && c < N ? p[c] : 0.0);
      }
      out += '\n';
    }
  for (int i = 0; i + 1 < ra; ++i)
    for (int j = 0; j + 1 < rb; ++j) {
      const int v00 = i * rb + j + 1, v01 = v00 + 1, v10 = v00 + rb, v11 = v10 + 1;
      out += "f " + std::to_string(v00) + ' ' + std::to_string(v10) + ' ' + std::to_string(v11) + '\n';
      out += "f " + std::to_string(v00) + ' ' + std::to_string(v11) + ' ' + std::to_string(v01) + '\n';
    }
  write_text(path, out);
}

void write_pair(const DeformationPair& pair, const fs::path& dir, const CatalogEntry* entry, bool with_fields) {
  if (!pair.f.grid().same_shape(pair.g.grid())) fail(ErrorCode::DimensionMismatch, "f and g grids differ");
  write_chart_csv(pair.f, dir / "f.csv");
  write_chart_csv(pair.g, dir / "g.csv");
  if (with_fields) write_fields_csv(pair, dir / "fields.csv");
  json m = {{"pair_id", pair.id},
            {"grid", grid_json(pair.f.grid())},
            {"domain_dim", pair.f.domain_dim()},
            {"ambient_dim", pair.f.ambient_dim()},
            {"fiber_axes", pair.fiber_axes},
            {"files", with_fields ? json{"f.csv", "g.csv", "fields.csv"} : json{"f.csv", "g.csv"}}};
  json info = json::object();
  for (const auto& [k, v] : pair.info) info[k] = number_or_null(v);
  m["info"] = info;
  if (entry) {
    m["example"] = entry->name;
    m["constants"] = entry->constants;
    m["cluster_constant"] = entry->cluster_constant;
    m["rank_pattern"] = entry->rank_pattern;
  }
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

LoadedPair read_pair(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json") || !fs::exists(dir / "f.csv") || !fs::exists(dir / "g.csv"))
    fail(ErrorCode::MissingPair, dir.string() + " does not hold manifest.json, f.csv and g.csv");
  json m;
  try {
    m = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, "manifest.json: " + std::string(e.what()));
  }
  LoadedPair out;
  try {
    const Grid grid = grid_from_json(m.at("grid"));
    out.pair.id = m.value("pair_id", dir.filename().string());
    out.pair.f = read_chart_csv(dir / "f.csv", grid, out.pair.id + ":f");
    out.pair.g = read_chart_csv(dir / "g.csv", grid, out.pair.id + ":g");
    out.pair.fiber_axes = m.value("fiber_axes", std::vector<int>{});
    if (m.contains("constants")) out.options.constants = m.at("constants").get<std::map<std::string, double>>();
    out.options.cluster_constant = m.value("cluster_constant", out.options.cluster_constant);
    if (m.contains("rank_pattern")) out.rank_pattern = m.at("rank_pattern").get<std::array<int, 3>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, "manifest.json: " + std::string(e.what()));
  }
  return out;
}

std::string report_json(const ConvergenceStudy& study) {
  if (study.reports.empty()) fail(ErrorCode::InvalidArgument, "empty study");
  const VerificationReport& r = study.reports.back();
  bool passed = true;
  for (const auto& rep : study.reports) passed = passed && rep.passed();
  json conv = json::array();
  for (const auto& rep : study.reports)
    conv.push_back({{"resolution", rep.grid.resolution()},
                    {"h", rep.h},
                    {"residuals", residual_map(rep.residuals)},
                    {"thresholds", residual_map(rep.thresholds)},
                    {"rank_pattern", rep.rank_pattern},
                    {"failures", rep.failures}});
  json factors = json::object();
  for (const auto& [name, fs_] : study.factors) {
    json row = json::array();
    for (double f : fs_) row.push_back(number_or_null(f));
    factors[name] = row;
  }
  json floor = json::object();
  for (const auto& [name, v] : study.at_floor) floor[name] = v;
  std::vector<std::string> failures;
  for (const auto& rep : study.reports)
    for (const auto& f : rep.failures)
      if (std::find(failures.begin(), failures.end(), f) == failures.end()) failures.push_back(f);
  json j = {{"pair_id", r.pair_id},
            {"grid", grid_json(r.grid)},
            {"h", r.h},
            {"residuals", residual_map(r.residuals)},
            {"thresholds", residual_map(r.thresholds)},
            {"rank_pattern", r.rank_pattern},
            {"mixed_pattern", r.mixed_pattern},
            {"cluster_tol", r.cluster_tol},
            {"sampled_nodes", r.sampled_nodes},
            {"passed", passed},
            {"failures", failures},
            {"warnings", r.warnings},
            {"convergence", conv},
            {"factors", factors},
            {"at_floor", floor}};
  return j.dump(2) + "\n";
}

void write_report(const ConvergenceStudy& study, const fs::path& path) { write_text(path, report_json(study)); }

std::string report_table(const fs::path& run_dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(run_dir, ec))
    for (const auto& e : fs::recursive_directory_iterator(run_dir, ec))
      if (e.is_regular_file() && e.path().filename() == "report.json") files.push_back(e.path());
  if (files.empty()) fail(ErrorCode::MissingReports, "no report.json under " + run_dir.string());
  std::sort(files.begin(), files.end());
  std::string out = "example,residual_name,h,value\n";
  for (const auto& file : files) {
    json j;
    try {
      j = json::parse(read_text(file));
    } catch (const json::exception& e) {
      fail(ErrorCode::ParseError, file.string() + ": " + e.what());
    }
    const std::string id = j.value("pair_id", file.parent_path().filename().string());
    for (const auto& level : j.at("convergence")) {
      const double h = level.at("h").get<double>();
      for (const auto& [name, v] : level.at("residuals").items()) {
        out += id + ',' + name + ',';
        append(out, h);
        out += ',';
        if (v.is_number())
          append(out, v.get<double>());
        else
          out += "nan";
        out += '\n';
      }
    }
  }
  return out;
}

}  // namespace forge
