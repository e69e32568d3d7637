// forge: build, verify, export and tabulate deformation pairs through the C API.
#include "forge/forge.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Config {
  std::string command;
  std::vector<std::string> examples;
  std::vector<int> resolutions;
  std::vector<std::pair<std::string, double>> tolerances;
  std::string out = "forge-out";
  std::string pair_dir;
  std::string which = "both";
  std::string format = "both";
  std::vector<int> slice{0, 1};
  std::vector<int> fixed;
  bool fields = true;
};

struct PairDeleter {
  void operator()(forge_pair* p) const { forge_pair_free(p); }
};
struct OptionsDeleter {
  void operator()(forge_options* p) const { forge_options_free(p); }
};
struct ReportDeleter {
  void operator()(forge_report* p) const { forge_report_free(p); }
};
using PairPtr = std::unique_ptr<forge_pair, PairDeleter>;
using OptionsPtr = std::unique_ptr<forge_options, OptionsDeleter>;
using ReportPtr = std::unique_ptr<forge_report, ReportDeleter>;

struct CliError {
  int code;
};

void check(int code, const std::string& context) {
  if (code == FORGE_OK) return;
  std::cerr << "forge: " << context << ": " << forge_error_name(code) << ": " << forge_last_error() << "\n";
  throw CliError{code};
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (int i = 0; i < forge_catalog_size(); ++i) out.emplace_back(forge_catalog_name(i));
  return out;
}

// --example accepts a catalog name, "all", or a JSON run file
// {"example": name | [names], "resolutions": [...], "tolerances": {k: v}}.
void expand_examples(Config& cfg) {
  std::vector<std::string> out;
  for (const auto& e : cfg.examples) {
    if (e == "all") {
      for (const auto& n : catalog_names()) out.push_back(n);
    } else if (e.size() > 5 && e.substr(e.size() - 5) == ".json") {
      std::ifstream in(e);
      if (!in) {
        std::cerr << "forge: cannot read " << e << "\n";
        throw CliError{FORGE_IO_ERROR};
      }
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
        const auto& ex = j.at("example");
        if (ex.is_array())
          for (const auto& n : ex) out.push_back(n.get<std::string>());
        else
          out.push_back(ex.get<std::string>());
        if (cfg.resolutions.empty() && j.contains("resolutions"))
          cfg.resolutions = j.at("resolutions").get<std::vector<int>>();
        if (j.contains("tolerances"))
          for (const auto& [k, v] : j.at("tolerances").items()) cfg.tolerances.emplace_back(k, v.get<double>());
      } catch (const nlohmann::json::exception& ex) {
        std::cerr << "forge: " << e << ": " << ex.what() << "\n";
        throw CliError{FORGE_PARSE_ERROR};
      }
    } else {
      out.push_back(e);
    }
  }
  cfg.examples = out;
}

OptionsPtr make_options(const Config& cfg, const char* example, const forge_pair* pair) {
  forge_options* raw = nullptr;
  if (pair)
    check(forge_options_for_pair(pair, &raw), "options");
  else
    check(forge_options_create(example, &raw), example ? example : "options");
  OptionsPtr opts(raw);
  for (const auto& [k, v] : cfg.tolerances) check(forge_options_set(opts.get(), k.c_str(), v), "--tol " + k);
  return opts;
}

int first_resolution(const Config& cfg) { return cfg.resolutions.empty() ? 0 : cfg.resolutions.front(); }

PairPtr build_pair(const std::string& example, int resolution) {
  forge_pair* raw = nullptr;
  check(forge_pair_build(example.c_str(), resolution, &raw), "build " + example);
  return PairPtr(raw);
}

PairPtr load_pair(const std::string& dir) {
  forge_pair* raw = nullptr;
  check(forge_pair_load(dir.c_str(), &raw), "load " + dir);
  return PairPtr(raw);
}

fs::path example_dir(const Config& cfg, const std::string& name) {
  return cfg.examples.size() > 1 ? fs::path(cfg.out) / name : fs::path(cfg.out);
}

void print_report(const forge_report* report, const std::string& name) {
  const auto j = nlohmann::json::parse(forge_report_json(report));
  for (const auto& level : j.at("convergence")) {
    std::cout << name << "  h=" << level.at("h").get<double>() << "\n";
    for (const auto& [k, v] : level.at("residuals").items()) {
      const auto& t = level.at("thresholds").at(k);
      std::printf("  %-13s %.3e  (threshold %.3e)\n", k.c_str(), v.is_number() ? v.get<double>() : -1.0,
                  t.is_number() ? t.get<double>() : -1.0);
    }
  }
  if (j.at("convergence").size() > 1) {
    std::cout << "  factors:";
    for (const auto& [k, v] : j.at("factors").items()) {
      std::cout << " " << k << "=";
      for (std::size_t i = 0; i < v.size(); ++i)
        std::cout << (i ? "," : "") << (v[i].is_number() ? std::to_string(v[i].get<double>()) : "inf");
    }
    std::cout << "\n";
  }
  const auto& rp = j.at("rank_pattern");
  std::cout << "  rank pattern (" << rp[0] << "," << rp[1] << "," << rp[2] << ")"
            << (j.at("mixed_pattern").get<bool>() ? " mixed" : "") << "\n";
}

int cmd_build(Config& cfg) {
  if (cfg.examples.empty()) {
    std::cerr << "forge build: --example is required\n";
    return FORGE_INVALID_ARGUMENT;
  }
  for (const auto& name : cfg.examples) {
    const PairPtr pair = build_pair(name, first_resolution(cfg));
    const fs::path dir = example_dir(cfg, name);
    check(forge_pair_write(pair.get(), dir.string().c_str(), cfg.fields ? 1 : 0), "write " + dir.string());
    int n = 0, N = 0;
    std::size_t nodes = 0;
    check(forge_pair_shape(pair.get(), &n, &N, &nodes), name);
    std::cout << name << ": " << nodes << " nodes, n=" << n << ", N=" << N << " -> " << dir.string() << "\n";
  }
  return 0;
}

int verify_one(forge_report* report, const std::string& name, const fs::path& dir) {
  print_report(report, name);
  std::error_code ec;
  fs::create_directories(dir, ec);
  check(forge_report_write(report, (dir / "report.json").string().c_str()), "write report");
  int passed = 0;
  check(forge_report_passed(report, &passed), name);
  if (passed) {
    std::cout << "  PASS\n";
    return 0;
  }
  const int code = forge_report_failure(report);
  std::cout << "  FAIL: " << forge_report_failures(report) << " (" << forge_error_name(code) << ")\n";
  return code;
}

int cmd_verify(Config& cfg) {
  int status = 0;
  if (!cfg.pair_dir.empty()) {
    const PairPtr pair = load_pair(cfg.pair_dir);
    const OptionsPtr opts = make_options(cfg, nullptr, pair.get());
    forge_report* raw = nullptr;
    check(forge_verify(pair.get(), opts.get(), &raw), "verify " + cfg.pair_dir);
    const ReportPtr report(raw);
    return verify_one(report.get(), forge_pair_id(pair.get()), cfg.out);
  }
  if (cfg.examples.empty()) {
    std::cerr << "forge verify: --example or --pair is required\n";
    return FORGE_INVALID_ARGUMENT;
  }
  for (const auto& name : cfg.examples) {
    std::vector<int> res = cfg.resolutions;
    if (res.empty()) {
      int def = 0;
      check(forge_catalog_info(name.c_str(), nullptr, nullptr, &def), name);
      res.push_back(def);
    }
    const OptionsPtr opts = make_options(cfg, name.c_str(), nullptr);
    forge_report* raw = nullptr;
    check(forge_convergence(name.c_str(), res.data(), static_cast<int>(res.size()), opts.get(), &raw),
          "verify " + name);
    const ReportPtr report(raw);
    const int code = verify_one(report.get(), name, example_dir(cfg, name));
    if (code != 0 && status == 0) status = code;
  }
  return status;
}

int export_pair(const Config& cfg, const forge_pair* pair, const fs::path& dir) {
  int n = 0;
  check(forge_pair_shape(pair, &n, nullptr, nullptr), "shape");
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<std::pair<int, std::string>> charts;
  if (cfg.which != "g") charts.emplace_back(FORGE_F, "f");
  if (cfg.which != "f") charts.emplace_back(FORGE_G, "g");
  for (const auto& [which, label] : charts) {
    if (cfg.format != "obj") {
      const fs::path p = dir / (label + ".csv");
      check(forge_pair_export_csv(pair, which, p.string().c_str()), "export " + p.string());
      std::cout << p.string() << "\n";
    }
    if (cfg.format == "csv") continue;
    if (n == 1 && cfg.format == "both") {
      std::cout << "note: " << label << " is a curve; no OBJ slice\n";
      continue;
    }
    if (cfg.slice.size() != 2) {
      std::cerr << "forge export: --slice takes two axes\n";
      return FORGE_INVALID_ARGUMENT;
    }
    const fs::path p = dir / (label + ".obj");
    check(forge_pair_export_obj(pair, which, p.string().c_str(), cfg.slice[0], cfg.slice[1],
                                cfg.fixed.empty() ? nullptr : cfg.fixed.data(), static_cast<int>(cfg.fixed.size())),
          "export " + p.string());
    std::cout << p.string() << "\n";
  }
  return 0;
}

int cmd_export(Config& cfg) {
  if (!cfg.pair_dir.empty()) return export_pair(cfg, load_pair(cfg.pair_dir).get(), cfg.out);
  if (cfg.examples.empty()) {
    std::cerr << "forge export: --example or --pair is required\n";
    return FORGE_INVALID_ARGUMENT;
  }
  for (const auto& name : cfg.examples) {
    const int code = export_pair(cfg, build_pair(name, first_resolution(cfg)).get(), example_dir(cfg, name));
    if (code) return code;
  }
  return 0;
}

int cmd_report(Config& cfg) {
  const fs::path run = cfg.pair_dir.empty() ? fs::path(cfg.out) : fs::path(cfg.pair_dir);
  const fs::path table = run / "residuals.csv";
  check(forge_report_table(run.string().c_str(), table.string().c_str()), "report " + run.string());
  std::cout << table.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal Gauss-map-preserving pairs: build, verify, export, report"};
  app.require_subcommand(1);
  Config cfg;
  std::vector<std::string> tol;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--example,-e", cfg.examples, "Catalog name, 'all', or a JSON run file")->delimiter(',');
    sub->add_option("--resolutions,-r", cfg.resolutions, "Nodes per axis, e.g. 32,64")
        ->delimiter(',')
        ->check(CLI::Range(8, 4096));
    sub->add_option("--out,-o", cfg.out, "Output directory")->capture_default_str();
    sub->add_option("--tol", tol, "Threshold override name=value (residual constant, cluster, gauss_tol)");
    sub->add_option("--pair", cfg.pair_dir, "Directory written by 'forge build'");
  };

  CLI::App* build = app.add_subcommand("build", "Write f.csv, g.csv, fields.csv and manifest.json");
  add_common(build);
  build->add_flag("!--no-fields", cfg.fields, "Skip fields.csv");
  CLI::App* verify = app.add_subcommand("verify", "Run the residual suite; exit 0 iff every residual passes");
  add_common(verify);
  CLI::App* exp = app.add_subcommand("export", "Write CSV samples and OBJ surface slices");
  add_common(exp);
  exp->add_option("--which", cfg.which, "f, g or both")->check(CLI::IsMember({"f", "g", "both"}));
  exp->add_option("--format", cfg.format, "csv, obj or both")->check(CLI::IsMember({"csv", "obj", "both"}));
  exp->add_option("--slice", cfg.slice, "Two grid axes spanning the slice")->delimiter(',');
  exp->add_option("--fixed", cfg.fixed, "Index per axis for the held axes (-1: middle)")->delimiter(',');
  CLI::App* rep = app.add_subcommand("report", "Tabulate every report.json under --out (or --pair)");
  add_common(rep);
  app.add_subcommand("list", "List catalog examples");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& t : tol) {
      const auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "forge: --tol expects name=value, got '" << t << "'\n";
        return FORGE_INVALID_ARGUMENT;
      }
      try {
        cfg.tolerances.emplace_back(t.substr(0, eq), std::stod(t.substr(eq + 1)));
      } catch (const std::exception&) {
        std::cerr << "forge: bad number in --tol " << t << "\n";
        return FORGE_INVALID_ARGUMENT;
      }
    }
    expand_examples(cfg);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "build") return cmd_build(cfg);
    if (cmd == "verify") return cmd_verify(cfg);
    if (cmd == "export") return cmd_export(cfg);
    if (cmd == "report") return cmd_report(cfg);
    for (const auto& n : catalog_names()) {
      int d = 0, N = 0, r = 0;
      forge_catalog_info(n.c_str(), &d, &N, &r);
      std::cout << n << "  n=" << d << " N=" << N << " default resolution " << r << "\n";
    }
    return 0;
  } catch (const CliError& e) {
    return e.code;
  }
}
