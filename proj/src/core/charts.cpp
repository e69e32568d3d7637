#include "forge/charts.hpp"

#include "forge/errors.hpp"

#include <cmath>
#include <json.hpp>

namespace forge {
namespace charts {
namespace {

void require_dim(const Grid& grid, int n, const char* name) {
  if (grid.dim() != n)
    fail(ErrorCode::DimensionMismatch, std::string(name) + " chart needs a " + std::to_string(n) + "D grid");
}

}  // namespace

Chart plane(const Grid& grid) {
  require_dim(grid, 2, "plane");
  return Chart::from_function(
      "plane", grid, 3, [](const Vec& x) { return Vec((Vec(3) << x[0], x[1], 0.0).finished()); },
      [](const Vec&) {
        Mat J = Mat::Zero(3, 2);
        J(0, 0) = J(1, 1) = 1.0;
        return J;
      });
}

Chart graph(const Grid& grid, double a, double b, double c) {
  require_dim(grid, 2, "graph");
  return Chart::from_function(
      "graph", grid, 3,
      [=](const Vec& x) {
        return Vec((Vec(3) << x[0], x[1], a * x[0] * x[0] + b * x[1] * x[1] + c * x[0] * x[1]).finished());
      },
      [=](const Vec& x) {
        Mat J = Mat::Zero(3, 2);
        J(0, 0) = J(1, 1) = 1.0;
        J(2, 0) = 2 * a * x[0] + c * x[1];
        J(2, 1) = 2 * b * x[1] + c * x[0];
        return J;
      });
}

Chart cylinder(const Grid& grid, double r) {
  require_dim(grid, 2, "cylinder");
  return Chart::from_function(
      "cylinder", grid, 3,
      [=](const Vec& x) { return Vec((Vec(3) << r * std::cos(x[0]), r * std::sin(x[0]), x[1]).finished()); },
      [=](const Vec& x) {
        Mat J = Mat::Zero(3, 2);
        J(0, 0) = -r * std::sin(x[0]);
        J(1, 0) = r * std::cos(x[0]);
        J(2, 1) = 1.0;
        return J;
      });
}

Chart catenoid(const Grid& grid, double c) {
  require_dim(grid, 2, "catenoid");
  return Chart::from_function(
      "catenoid", grid, 3,
      [=](const Vec& x) {
        const double ch = c * std::cosh(x[1] / c);
        return Vec((Vec(3) << ch * std::cos(x[0]), ch * std::sin(x[0]), x[1]).finished());
      },
      [=](const Vec& x) {
        const double ch = c * std::cosh(x[1] / c), sh = std::sinh(x[1] / c);
        Mat J(3, 2);
        J << -ch * std::sin(x[0]), sh * std::cos(x[0]), ch * std::cos(x[0]), sh * std::sin(x[0]), 0.0, 1.0;
        return J;
      });
}

Chart helicoid(const Grid& grid, double c) {
  require_dim(grid, 2, "helicoid");
  return Chart::from_function(
      "helicoid", grid, 3,
      [=](const Vec& x) {
        const double sh = c * std::sinh(x[1] / c);
        return Vec((Vec(3) << sh * std::sin(x[0]), -sh * std::cos(x[0]), c * x[0]).finished());
      },
      [=](const Vec& x) {
        const double sh = c * std::sinh(x[1] / c), ch = std::cosh(x[1] / c);
        Mat J(3, 2);
        J << sh * std::cos(x[0]), ch * std::sin(x[0]), sh * std::sin(x[0]), -ch * std::cos(x[0]), c, 0.0;
        return J;
      });
}

Chart sphere(const Grid& grid, double r) {
  require_dim(grid, 2, "sphere");
  return Chart::from_function(
      "sphere", grid, 3,
      [=](const Vec& x) {
        const double st = std::sin(x[0]), ct = std::cos(x[0]);
        return Vec((Vec(3) << r * st * std::cos(x[1]), r * st * std::sin(x[1]), r * ct).finished());
      },
      [=](const Vec& x) {
        const double st = std::sin(x[0]), ct = std::cos(x[0]), sp = std::sin(x[1]), cp = std::cos(x[1]);
        Mat J(3, 2);
        J << r * ct * cp, -r * st * sp, r * ct * sp, r * st * cp, -r * st, 0.0;
        return J;
      });
}

Chart enneper(const Grid& grid) {
  require_dim(grid, 2, "enneper");
  return Chart::from_function(
      "enneper", grid, 3,
      [](const Vec& x) {
        const double u = x[0], v = x[1];
        return Vec((Vec(3) << u - u * u * u / 3 + u * v * v, -v + v * v * v / 3 - u * u * v, u * u - v * v).finished());
      },
      [](const Vec& x) {
        const double u = x[0], v = x[1];
        Mat J(3, 2);
        J << 1 - u * u + v * v, 2 * u * v, -2 * u * v, -1 + v * v - u * u, 2 * u, -2 * v;
        return J;
      });
}

Chart vertical_halfplane(const Grid& grid) {
  require_dim(grid, 2, "vertical-halfplane");
  return Chart::from_function(
      "vertical-halfplane", grid, 3, [](const Vec& x) { return Vec((Vec(3) << x[0], 0.0, x[1]).finished()); },
      [](const Vec&) {
        Mat J = Mat::Zero(3, 2);
        J(0, 0) = J(2, 1) = 1.0;
        return J;
      });
}

Chart torus(const Grid& grid, double R, double r) {
  require_dim(grid, 2, "torus");
  return Chart::from_function(
      "torus", grid, 3,
      [=](const Vec& x) {
        const double w = R + r * std::cos(x[1]);
        return Vec((Vec(3) << w * std::cos(x[0]), w * std::sin(x[0]), r * std::sin(x[1])).finished());
      },
      [=](const Vec& x) {
        const double w = R + r * std::cos(x[1]);
        Mat J(3, 2);
        J << -w * std::sin(x[0]), -r * std::sin(x[1]) * std::cos(x[0]), w * std::cos(x[0]),
            -r * std::sin(x[1]) * std::sin(x[0]), 0.0, r * std::cos(x[1]);
        return J;
      });
}

Chart holomorphic_curve(const Grid& grid, const std::vector<int>& powers) {
  require_dim(grid, 2, "holomorphic-curve");
  if (powers.empty()) fail(ErrorCode::InvalidArgument, "holomorphic curve needs at least one power");
  const int N = 2 * static_cast<int>(powers.size());
  return Chart::from_function(
      "holomorphic-curve", grid, N,
      [=](const Vec& x) {
        const cdouble z(x[0], x[1]);
        Vec out(N);
        for (std::size_t k = 0; k < powers.size(); ++k) {
          const cdouble w = std::pow(z, powers[k]) / static_cast<double>(powers[k]);
          out[2 * k] = w.real();
          out[2 * k + 1] = w.imag();
        }
        return out;
      },
      [=](const Vec& x) {
        const cdouble z(x[0], x[1]);
        Mat J(N, 2);
        for (std::size_t k = 0; k < powers.size(); ++k) {
          const cdouble d = powers[k] == 1 ? cdouble(1.0) : std::pow(z, powers[k] - 1);
          J(2 * k, 0) = d.real();
          J(2 * k, 1) = -d.imag();
          J(2 * k + 1, 0) = d.imag();
          J(2 * k + 1, 1) = d.real();
        }
        return J;
      });
}

Chart circle(const Grid& grid, double r) {
  require_dim(grid, 1, "circle");
  if (!(r > 0 && r <= 1)) fail(ErrorCode::InvalidArgument, "circle radius must lie in (0, 1]");
  const bool great = r == 1.0;
  const int N = great ? 2 : 3;
  const double height = std::sqrt(std::max(0.0, 1 - r * r));
  return Chart::from_function(
      great ? "circle" : "small-circle", grid, N,
      [=](const Vec& x) {
        Vec out(N);
        out[0] = r * std::cos(x[0]);
        out[1] = r * std::sin(x[0]);
        if (!great) out[2] = height;
        return out;
      },
      [=](const Vec& x) {
        Mat J = Mat::Zero(N, 1);
        J(0, 0) = -r * std::sin(x[0]);
        J(1, 0) = r * std::cos(x[0]);
        return J;
      });
}

Chart sphere_factor(const Grid& grid, double r) {
  require_dim(grid, 2, "sphere-factor");
  if (!(r > 0 && r <= 1)) fail(ErrorCode::InvalidArgument, "sphere factor radius must lie in (0, 1]");
  const bool great = r == 1.0;
  const int N = great ? 3 : 4;
  const double height = std::sqrt(std::max(0.0, 1 - r * r));
  return Chart::from_function(
      great ? "unit-sphere" : "small-sphere", grid, N,
      [=](const Vec& x) {
        const double st = std::sin(x[0]);
        Vec out(N);
        out[0] = r * st * std::cos(x[1]);
        out[1] = r * st * std::sin(x[1]);
        out[2] = r * std::cos(x[0]);
        if (!great) out[3] = height;
        return out;
      },
      [=](const Vec& x) {
        const double st = std::sin(x[0]), ct = std::cos(x[0]), sp = std::sin(x[1]), cp = std::cos(x[1]);
        Mat J = Mat::Zero(N, 2);
        J(0, 0) = r * ct * cp;
        J(0, 1) = -r * st * sp;
        J(1, 0) = r * ct * sp;
        J(1, 1) = r * st * cp;
        J(2, 0) = -r * st;
        return J;
      });
}

Chart line_curve(const Grid& grid, const Vec& point, const Vec& direction) {
  require_dim(grid, 1, "line");
  if (point.size() != direction.size()) fail(ErrorCode::DimensionMismatch, "line point/direction mismatch");
  const int N = static_cast<int>(point.size());
  return Chart::from_function(
      "line", grid, N, [=](const Vec& x) -> Vec { return point + x[0] * direction; },
      [=](const Vec&) -> Mat { return direction; });
}

Chart arc_curve(const Grid& grid, const Vec& center, double radius) {
  require_dim(grid, 1, "arc");
  if (center.size() != 2) fail(ErrorCode::DimensionMismatch, "arc lives in the plane");
  return Chart::from_function(
      "arc", grid, 2,
      [=](const Vec& x) -> Vec { return center + radius * Vec((Vec(2) << std::cos(x[0]), std::sin(x[0])).finished()); },
      [=](const Vec& x) -> Mat { return radius * Vec((Vec(2) << -std::sin(x[0]), std::cos(x[0])).finished()); });
}

}  // namespace charts

namespace {

double param(const ChartParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return (it == p.end() || it->second.empty()) ? fallback : it->second.front();
}

Vec param_vec(const ChartParams& p, const std::string& key, const Vec& fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  return Eigen::Map<const Vec>(it->second.data(), static_cast<Eigen::Index>(it->second.size()));
}

}  // namespace

std::vector<std::string> chart_names() {
  return {"plane",   "graph",  "cylinder", "catenoid", "helicoid",          "sphere", "enneper",
          "vertical-halfplane", "torus", "holomorphic-curve", "circle", "sphere-factor", "line", "arc"};
}

Chart make_chart(const std::string& name, const Grid& grid, const ChartParams& p) {
  if (name == "plane") return charts::plane(grid);
  if (name == "graph") return charts::graph(grid, param(p, "a", 1.0), param(p, "b", 1.0), param(p, "c", 0.0));
  if (name == "cylinder") return charts::cylinder(grid, param(p, "radius", 1.0));
  if (name == "catenoid") return charts::catenoid(grid, param(p, "neck", 1.0));
  if (name == "helicoid") return charts::helicoid(grid, param(p, "neck", 1.0));
  if (name == "sphere") return charts::sphere(grid, param(p, "radius", 1.0));
  if (name == "enneper") return charts::enneper(grid);
  if (name == "vertical-halfplane") return charts::vertical_halfplane(grid);
  if (name == "torus") return charts::torus(grid, param(p, "major", 2.0), param(p, "minor", 1.0));
  if (name == "holomorphic-curve") {
    std::vector<int> powers;
    auto it = p.find("powers");
    if (it == p.end())
      powers = {1, 2};
    else
      for (double d : it->second) powers.push_back(static_cast<int>(std::lround(d)));
    return charts::holomorphic_curve(grid, powers);
  }
  if (name == "circle" || name == "small-circle") return charts::circle(grid, param(p, "radius", 1.0));
  if (name == "sphere-factor" || name == "small-sphere" || name == "unit-sphere")
    return charts::sphere_factor(grid, param(p, "radius", 1.0));
  if (name == "line") {
    const Vec dir = param_vec(p, "direction", Vec::Ones(1));
    return charts::line_curve(grid, param_vec(p, "point", Vec::Zero(dir.size())), dir);
  }
  if (name == "arc") return charts::arc_curve(grid, param_vec(p, "center", Vec::Zero(2)), param(p, "radius", 1.0));
  fail(ErrorCode::UnknownExample, "unknown chart '" + name + "'");
}

Chart chart_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  try {
    const std::string name = j.at("name").get<std::string>();
    std::vector<Interval> box;
    for (const auto& b : j.at("box")) box.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    std::vector<int> res;
    if (j.at("resolution").is_array())
      res = j.at("resolution").get<std::vector<int>>();
    else
      res.assign(box.size(), j.at("resolution").get<int>());
    ChartParams params;
    if (j.contains("params"))
      for (const auto& [key, value] : j.at("params").items())
        params[key] = value.is_array() ? value.get<std::vector<double>>() : std::vector<double>{value.get<double>()};
    return make_chart(name, Grid(box, res), params);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

}  // namespace forge
