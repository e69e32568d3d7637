#pragma once

#include "forge/chart.hpp"

#include <map>
#include <string>
#include <vector>

namespace forge {

/// Named closed-form charts with analytic Jacobians. Parameters are looked up
/// by name; missing ones take the defaults documented in the README.
using ChartParams = std::map<std::string, std::vector<double>>;

Chart make_chart(const std::string& name, const Grid& grid, const ChartParams& params = {});
std::vector<std::string> chart_names();

/// Parses {"name", "params", "box", "resolution"}.
Chart chart_from_json(const std::string& json_text);

namespace charts {
Chart plane(const Grid& grid);
Chart graph(const Grid& grid, double a = 1.0, double b = 1.0, double c = 0.0);
Chart cylinder(const Grid& grid, double radius = 1.0);
Chart catenoid(const Grid& grid, double neck = 1.0);
Chart helicoid(const Grid& grid, double neck = 1.0);
Chart sphere(const Grid& grid, double radius = 1.0);
Chart enneper(const Grid& grid);
Chart vertical_halfplane(const Grid& grid);
Chart torus(const Grid& grid, double major = 2.0, double minor = 1.0);
/// (z^p / p) for each listed power, as real and imaginary parts in R^{2k}.
Chart holomorphic_curve(const Grid& grid, const std::vector<int>& powers);
/// Circle of the given radius at height sqrt(1 - r^2) in the unit sphere S^2 (r = 1: great circle in R^2).
Chart circle(const Grid& grid, double radius = 1.0);
/// Round 2-sphere of radius r in S^3 (r = 1: the unit sphere in R^3), spherical coordinates.
Chart sphere_factor(const Grid& grid, double radius = 1.0);
Chart line_curve(const Grid& grid, const Vec& point, const Vec& direction);
Chart arc_curve(const Grid& grid, const Vec& center, double radius);
}  // namespace charts

}  // namespace forge
