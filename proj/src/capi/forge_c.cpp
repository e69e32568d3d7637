#include "forge/forge.h"

#include "forge/catalog.hpp"
#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/verify.hpp"

#include <fstream>
#include <string>

using namespace forge;

static_assert(FORGE_GAUSS_MAP_MISMATCH == static_cast<int>(ErrorCode::GaussMapMismatch));
static_assert(FORGE_RESIDUAL_ABOVE_THRESHOLD == static_cast<int>(ErrorCode::ResidualAboveThreshold));
static_assert(FORGE_UNKNOWN == static_cast<int>(ErrorCode::Unknown));

struct forge_pair {
  DeformationPair pair;
  VerifyOptions options;
};

struct forge_options {
  VerifyOptions options;
};

struct forge_report {
  ConvergenceStudy study;
  std::string json;
  std::string failures;
};

namespace {

thread_local std::string last_error;

template <class Fn>
int guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return FORGE_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FORGE_UNKNOWN;
  } catch (const std::exception& e) {
    last_error = e.what();
    return FORGE_UNKNOWN;
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

const Chart& chart_of(const forge_pair* p, int which) {
  require(which == FORGE_F || which == FORGE_G, "which must be FORGE_F or FORGE_G");
  return which == FORGE_F ? p->pair.f : p->pair.g;
}

forge_report* make_report(ConvergenceStudy study) {
  auto* r = new forge_report{std::move(study), {}, {}};
  r->json = report_json(r->study);
  for (const auto& rep : r->study.reports)
    for (const auto& f : rep.failures)
      if (("," + r->failures + ",").find("," + f + ",") == std::string::npos)
        r->failures += (r->failures.empty() ? "" : ",") + f;
  return r;
}

}  // namespace

extern "C" {

const char* forge_version(void) { return "0.1.0"; }
const char* forge_last_error(void) { return last_error.c_str(); }
const char* forge_error_name(int code) { return error_code_name(static_cast<ErrorCode>(code)); }

int forge_catalog_size(void) { return static_cast<int>(catalog().size()); }

const char* forge_catalog_name(int index) {
  if (index < 0 || index >= forge_catalog_size()) return nullptr;
  return catalog()[static_cast<std::size_t>(index)].name.c_str();
}

int forge_catalog_info(const char* example, int* domain_dim, int* ambient_dim, int* default_resolution) {
  return guarded([&] {
    require(example, "example is null");
    const CatalogEntry& e = catalog_entry(example);
    if (domain_dim) *domain_dim = e.domain_dim;
    if (ambient_dim) *ambient_dim = e.ambient_dim;
    if (default_resolution) *default_resolution = e.default_resolution;
  });
}

int forge_pair_build(const char* example, int resolution, forge_pair** out) {
  return guarded([&] {
    require(example && out, "null argument");
    *out = nullptr;
    const CatalogEntry& e = catalog_entry(example);
    const int res = resolution > 0 ? resolution : e.default_resolution;
    if (res < kMinResolution) fail(ErrorCode::InvalidArgument, "resolution must be at least 8 per axis");
    *out = new forge_pair{e.build(res), e.verify_options()};
  });
}

int forge_pair_load(const char* dir, forge_pair** out) {
  return guarded([&] {
    require(dir && out, "null argument");
    *out = nullptr;
    LoadedPair lp = read_pair(dir);
    *out = new forge_pair{std::move(lp.pair), std::move(lp.options)};
  });
}

void forge_pair_free(forge_pair* pair) { delete pair; }

const char* forge_pair_id(const forge_pair* pair) { return pair ? pair->pair.id.c_str() : ""; }

int forge_pair_shape(const forge_pair* pair, int* domain_dim, int* ambient_dim, size_t* nodes) {
  return guarded([&] {
    require(pair, "pair is null");
    if (domain_dim) *domain_dim = pair->pair.f.domain_dim();
    if (ambient_dim) *ambient_dim = pair->pair.f.ambient_dim();
    if (nodes) *nodes = pair->pair.f.grid().node_count();
  });
}

int forge_pair_samples(const forge_pair* pair, int which, double* out, size_t count) {
  return guarded([&] {
    require(pair && out, "null argument");
    const Chart& c = chart_of(pair, which);
    const std::size_t N = static_cast<std::size_t>(c.ambient_dim());
    if (count != N * c.grid().node_count()) fail(ErrorCode::DimensionMismatch, "buffer size mismatch");
    for (std::size_t k = 0; k < c.grid().node_count(); ++k) {
      const Vec p = c.sample(k);
      for (std::size_t i = 0; i < N; ++i) out[k * N + i] = p[static_cast<Eigen::Index>(i)];
    }
  });
}

int forge_pair_set_samples(forge_pair* pair, int which, const double* samples, size_t count) {
  return guarded([&] {
    require(pair && samples, "null argument");
    const Chart& c = chart_of(pair, which);
    const Eigen::Index N = c.ambient_dim();
    const Eigen::Index nodes = static_cast<Eigen::Index>(c.grid().node_count());
    if (count != static_cast<std::size_t>(N * nodes)) fail(ErrorCode::DimensionMismatch, "buffer size mismatch");
    Mat s = Eigen::Map<const Mat>(samples, N, nodes);
    Chart replaced = Chart::from_samples(c.name(), c.grid(), std::move(s));
    (which == FORGE_F ? pair->pair.f : pair->pair.g) = std::move(replaced);
  });
}

int forge_pair_write(const forge_pair* pair, const char* dir, int with_fields) {
  return guarded([&] {
    require(pair && dir, "null argument");
    const CatalogEntry* entry = nullptr;
    for (const auto& e : catalog())
      if (e.name == pair->pair.id) entry = &e;
    write_pair(pair->pair, dir, entry, with_fields != 0);
  });
}

int forge_pair_export_csv(const forge_pair* pair, int which, const char* path) {
  return guarded([&] {
    require(pair && path, "null argument");
    write_chart_csv(chart_of(pair, which), path);
  });
}

int forge_pair_export_obj(const forge_pair* pair, int which, const char* path, int axis_a, int axis_b,
                          const int* fixed, int fixed_len) {
  return guarded([&] {
    require(pair && path, "null argument");
    ObjSlice s;
    s.axes = {axis_a, axis_b};
    if (fixed) s.fixed.assign(fixed, fixed + std::max(0, fixed_len));
    write_obj_slice(chart_of(pair, which), path, s);
  });
}

int forge_options_create(const char* example, forge_options** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = nullptr;
    *out = new forge_options{example ? catalog_entry(example).verify_options() : VerifyOptions{}};
  });
}

int forge_options_for_pair(const forge_pair* pair, forge_options** out) {
  return guarded([&] {
    require(pair && out, "null argument");
    *out = new forge_options{pair->options};
  });
}

int forge_options_set(forge_options* options, const char* key, double value) {
  return guarded([&] {
    require(options && key, "null argument");
    const std::string k = key;
    const auto& names = residual_names();
    if (std::find(names.begin(), names.end(), k) != names.end()) {
      if (!(value > 0)) fail(ErrorCode::InvalidArgument, "threshold constant must be positive");
      options->options.constants[k] = value;
    } else if (k == "cluster") {
      options->options.cluster_constant = value;
    } else if (k == "gauss_tol") {
      options->options.gauss_tol = value;
    } else if (k == "max_sample_nodes") {
      require(value >= 1, "max_sample_nodes must be positive");
      options->options.max_sample_nodes = static_cast<std::size_t>(value);
    } else {
      fail(ErrorCode::InvalidArgument, "unknown tolerance key '" + k + "'");
    }
  });
}

void forge_options_free(forge_options* options) { delete options; }

int forge_verify(const forge_pair* pair, const forge_options* options, forge_report** out) {
  return guarded([&] {
    require(pair && out, "null argument");
    *out = nullptr;
    ConvergenceStudy s;
    s.reports.push_back(verify_pair(pair->pair, options ? options->options : pair->options));
    *out = make_report(std::move(s));
  });
}

int forge_convergence(const char* example, const int* resolutions, int count, const forge_options* options,
                      forge_report** out) {
  return guarded([&] {
    require(example && resolutions && out && count > 0, "null or empty argument");
    *out = nullptr;
    const CatalogEntry& e = catalog_entry(example);
    std::vector<int> res(resolutions, resolutions + count);
    for (int r : res)
      if (r < kMinResolution) fail(ErrorCode::InvalidArgument, "resolution must be at least 8 per axis");
    *out = make_report(convergence_study(e.build, res, options ? options->options : e.verify_options()));
  });
}

void forge_report_free(forge_report* report) { delete report; }

int forge_report_passed(const forge_report* report, int* passed) {
  return guarded([&] {
    require(report && passed, "null argument");
    *passed = report->failures.empty() ? 1 : 0;
  });
}

int forge_report_failure(const forge_report* report) {
  if (!report) return FORGE_INVALID_ARGUMENT;
  for (const auto& rep : report->study.reports) {
    const int code = guarded([&] { require_passed(rep); });
    if (code != FORGE_OK) return code;
  }
  return FORGE_OK;
}

const char* forge_report_failures(const forge_report* report) { return report ? report->failures.c_str() : ""; }

int forge_report_levels(const forge_report* report, int* levels) {
  return guarded([&] {
    require(report && levels, "null argument");
    *levels = static_cast<int>(report->study.reports.size());
  });
}

int forge_report_residual(const forge_report* report, int level, const char* name, double* value) {
  return guarded([&] {
    require(report && name && value, "null argument");
    const auto& reps = report->study.reports;
    require(level >= 0 && level < static_cast<int>(reps.size()), "level out of range");
    const auto& m = reps[static_cast<std::size_t>(level)].residuals;
    const auto it = m.find(name);
    if (it == m.end()) fail(ErrorCode::InvalidArgument, std::string("no residual named ") + name);
    *value = it->second;
  });
}

int forge_report_converges(const forge_report* report, double lo, double hi, int* ok) {
  return guarded([&] {
    require(report && ok, "null argument");
    *ok = convergence_within(report->study, {"codazzi", "commute", "vergasta", "gauss", "conformal"}, lo, hi) ? 1 : 0;
  });
}

const char* forge_report_json(const forge_report* report) { return report ? report->json.c_str() : ""; }

int forge_report_write(const forge_report* report, const char* path) {
  return guarded([&] {
    require(report && path, "null argument");
    write_report(report->study, path);
  });
}

int forge_report_table(const char* run_dir, const char* out_path) {
  return guarded([&] {
    require(run_dir && out_path, "null argument");
    const std::string table = report_table(run_dir);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, std::string("cannot write ") + out_path);
    out << table;
  });
}

}  // extern "C"
