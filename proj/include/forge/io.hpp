#pragma once

#include "forge/catalog.hpp"
#include "forge/pair.hpp"
#include "forge/verify.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace forge {

namespace fs = std::filesystem;

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double x);

/// One row per node in grid order; header x0..x{n-1}, y0..y{N-1}.
void write_chart_csv(const Chart& chart, const fs::path& path);
/// Reads a chart written by write_chart_csv. The grid is given by the caller
/// (from a manifest) or recovered from the axis columns.
Chart read_chart_csv(const fs::path& path, const std::optional<Grid>& grid = {}, const std::string& name = "");

/// Axis coordinates, then Phi and T column-major (Phi_ij, T_ij) and phi.
void write_fields_csv(const DeformationPair& pair, const fs::path& path);

struct ObjSlice {
  /// Two grid axes spanning the surface; the others are held at `fixed`
  /// (default: their middle index).
  std::array<int, 2> axes{0, 1};
  std::vector<int> fixed;
  /// Ambient coordinates written as x, y, z; missing ones are written as 0.
  std::array<int, 3> coords{0, 1, 2};
};

/// Throws SliceUnavailable for curves (n = 1).
void write_obj_slice(const Chart& chart, const fs::path& path, const ObjSlice& slice = {});

/// f.csv, g.csv, fields.csv and manifest.json in `dir`.
void write_pair(const DeformationPair& pair, const fs::path& dir, const CatalogEntry* entry = nullptr,
                bool with_fields = true);

struct LoadedPair {
  DeformationPair pair;
  VerifyOptions options;
  std::optional<std::array<int, 3>> rank_pattern;
};

/// Throws MissingPair when the directory does not hold a written pair.
LoadedPair read_pair(const fs::path& dir);

std::string report_json(const ConvergenceStudy& study);
void write_report(const ConvergenceStudy& study, const fs::path& path);

/// Long-format table (example, residual_name, h, value) over every
/// report.json under `run_dir`. Throws MissingReports when there is none.
std::string report_table(const fs::path& run_dir);

}  // namespace forge
