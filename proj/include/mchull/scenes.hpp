#pragma once

// Parametric obstacle shapes, rasterized by cell-center inclusion.
//
// Coordinates are physical grid coordinates (the default grid covers
// [-1, 1]^dim). Shapes given by a formula in their own units (catenoid
// region, omega_theta0) are scaled by the `scale` parameter.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/grid.hpp"

namespace mchull {

struct SceneSpec {
  std::string kind = "ball";
  std::map<std::string, double> params;
  GridSpec spec;
};

namespace detail {

struct SceneKind {
  std::string name;
  bool allow_2d;
  bool allow_3d;
  std::map<std::string, double> defaults;
};

inline const std::vector<SceneKind>& scene_kinds() {
  static const std::vector<SceneKind> kinds = {
      {"ball", true, true, {{"radius", 0.3}, {"cx", 0.0}, {"cy", 0.0}, {"cz", 0.0}}},
      {"box", true, true, {{"hx", 0.4}, {"hy", 0.4}, {"hz", 0.4}, {"cx", 0.0}, {"cy", 0.0}, {"cz", 0.0}}},
      // Square of side `side` with the upper-right quadrant of side `notch` removed.
      {"l_shape", true, true, {{"side", 0.625}, {"notch", 0.3125}, {"height", 0.625}}},
      {"star", true, true, {{"points", 5}, {"outer", 0.6}, {"inner", 0.25}, {"height", 0.5}}},
      {"torus", false, true, {{"R", 0.6}, {"a", 0.2}}},
      {"catenoid_region", false, true, {{"L", 1.0}, {"scale", 0.55}}},
      {"dumbbell", true, true, {{"radius", 0.3}, {"separation", 0.9}, {"neck", 0.1}}},
      {"omega_theta0", false, true, {{"theta0", 0.3}, {"L", 0.62}, {"a", 0.5}, {"h", 0.6}, {"scale", 0.85}}},
  };
  return kinds;
}

inline const SceneKind& find_kind(const std::string& name) {
  for (const auto& k : scene_kinds()) {
    if (k.name == name) return k;
  }
  std::string valid;
  for (const auto& k : scene_kinds()) valid += (valid.empty() ? "" : ", ") + k.name;
  throw PreconditionError("unknown scene kind '" + name + "' (valid: " + valid + ")");
}

// Point-in-star test for a regular star polygon centered at the origin with
// one point on the +y axis.
inline bool in_star(double x, double y, int points, double outer, double inner) {
  const double r = std::hypot(x, y);
  if (r == 0.0) return true;
  const double sector = std::numbers::pi / points;
  double t = std::atan2(x, y);  // angle from +y
  t = std::fmod(std::abs(t), 2.0 * sector);
  if (t > sector) t = 2.0 * sector - t;
  // Edge from the tip (outer, angle 0) to the valley (inner, angle sector).
  const double px = 0.0, py = outer;
  const double qx = inner * std::sin(sector), qy = inner * std::cos(sector);
  const double ux = r * std::sin(t), uy = r * std::cos(t);
  // Inside iff u is on the origin's side of the edge line.
  const double side_u = (qx - px) * (uy - py) - (qy - py) * (ux - px);
  const double side_o = (qx - px) * (0.0 - py) - (qy - py) * (0.0 - px);
  return side_u * side_o >= 0.0;
}

}  // namespace detail

// Parameters of `s` merged over the kind's defaults; unknown keys and invalid
// values are rejected.
inline std::map<std::string, double> resolve_scene_params(const SceneSpec& s) {
  const auto& kind = detail::find_kind(s.kind);
  if (s.spec.dim == 2 && !kind.allow_2d) throw PreconditionError("scene '" + s.kind + "' is 3D only");
  if (s.spec.dim == 3 && !kind.allow_3d) throw PreconditionError("scene '" + s.kind + "' is 2D only");
  auto p = kind.defaults;
  for (const auto& [k, v] : s.params) {
    if (!p.count(k)) throw PreconditionError("unknown parameter '" + k + "' for scene '" + s.kind + "'");
    if (!std::isfinite(v)) throw PreconditionError("scene parameter '" + k + "' must be finite");
    p[k] = v;
  }
  auto positive = [&](const char* k) {
    if (!(p[k] > 0.0)) throw PreconditionError(std::string("scene parameter '") + k + "' must be positive");
  };
  if (s.kind == "ball") {
    positive("radius");
  } else if (s.kind == "box") {
    positive("hx");
    positive("hy");
    positive("hz");
  } else if (s.kind == "l_shape") {
    positive("side");
    positive("notch");
    positive("height");
    if (p["notch"] >= p["side"]) throw PreconditionError("l_shape notch must be smaller than side");
  } else if (s.kind == "star") {
    positive("outer");
    positive("inner");
    positive("height");
    if (p["points"] < 3 || p["points"] != std::floor(p["points"])) {
      throw PreconditionError("star needs an integer number of points >= 3");
    }
    if (p["inner"] >= p["outer"]) throw PreconditionError("star inner radius must be below outer");
  } else if (s.kind == "torus") {
    positive("a");
    if (!(p["a"] < p["R"])) throw PreconditionError("torus needs 0 < a < R");
  } else if (s.kind == "catenoid_region") {
    positive("L");
    positive("scale");
  } else if (s.kind == "dumbbell") {
    positive("radius");
    positive("neck");
    if (p["neck"] >= p["radius"]) throw PreconditionError("dumbbell neck must be thinner than the balls");
    if (p["separation"] <= 0.0) throw PreconditionError("dumbbell separation must be positive");
  } else if (s.kind == "omega_theta0") {
    positive("theta0");
    positive("L");
    positive("a");
    positive("scale");
    if (p["theta0"] >= 2.0 * std::numbers::pi) throw PreconditionError("theta0 must be below 2 pi");
    if (p["a"] >= 1.0) throw PreconditionError("omega_theta0 needs 0 < a < 1");
    if (!(p["a"] * std::cosh(p["L"] / p["a"]) < 1.0)) throw PreconditionError("omega_theta0 needs a cosh(L/a) < 1");
    if (!(p["L"] > p["h"])) throw PreconditionError("omega_theta0 needs L > h");
  }
  return p;
}

inline VoxelSet generate(const SceneSpec& s) {
  s.spec.validate();
  auto p = resolve_scene_params(s);
  const int dim = s.spec.dim;
  std::function<bool(const std::array<double, 3>&)> inside;
  const double cx = p.count("cx") ? p["cx"] : 0.0, cy = p.count("cy") ? p["cy"] : 0.0,
               cz = p.count("cz") ? p["cz"] : 0.0;

  if (s.kind == "ball") {
    const double r = p["radius"];
    inside = [=](const auto& c) {
      const double dz = dim == 3 ? c[2] - cz : 0.0;
      return (c[0] - cx) * (c[0] - cx) + (c[1] - cy) * (c[1] - cy) + dz * dz <= r * r;
    };
  } else if (s.kind == "box") {
    const double hx = p["hx"], hy = p["hy"], hz = p["hz"];
    inside = [=](const auto& c) {
      return std::abs(c[0] - cx) <= hx && std::abs(c[1] - cy) <= hy && (dim == 2 || std::abs(c[2] - cz) <= hz);
    };
  } else if (s.kind == "l_shape") {
    const double half = 0.5 * p["side"], notch = p["notch"], hh = 0.5 * p["height"];
    inside = [=](const auto& c) {
      if (std::abs(c[0]) > half || std::abs(c[1]) > half) return false;
      if (dim == 3 && std::abs(c[2]) > hh) return false;
      return !(c[0] > half - notch && c[1] > half - notch);
    };
  } else if (s.kind == "star") {
    const int pts = static_cast<int>(p["points"]);
    const double ro = p["outer"], ri = p["inner"], hh = 0.5 * p["height"];
    inside = [=](const auto& c) {
      if (dim == 3 && std::abs(c[2]) > hh) return false;
      return detail::in_star(c[0], c[1], pts, ro, ri);
    };
  } else if (s.kind == "torus") {
    const double R = p["R"], a = p["a"];
    inside = [=](const auto& c) {
      const double rho = std::hypot(c[0], c[1]) - R;
      return rho * rho + c[2] * c[2] <= a * a;
    };
  } else if (s.kind == "catenoid_region") {
    const double L = p["L"], k = p["scale"];
    inside = [=](const auto& c) {
      const double x = c[0] / k, y = c[1] / k, z = c[2] / k;
      const double ch = std::cosh(z);
      return std::abs(z) <= L && x * x + y * y <= ch * ch;
    };
  } else if (s.kind == "dumbbell") {
    const double r = p["radius"], sep = 0.5 * p["separation"], neck = p["neck"];
    inside = [=](const auto& c) {
      const double z = dim == 3 ? c[2] : 0.0;
      const double yz2 = c[1] * c[1] + z * z;
      const double dl = (c[0] + sep) * (c[0] + sep) + yz2, dr = (c[0] - sep) * (c[0] - sep) + yz2;
      if (dl <= r * r || dr <= r * r) return true;
      return std::abs(c[0]) <= sep && yz2 <= neck * neck;
    };
  } else if (s.kind == "omega_theta0") {
    const double th0 = p["theta0"], L = p["L"], a = p["a"], k = p["scale"];
    inside = [=](const auto& c) {
      const double x = c[0] / k, y = c[1] / k, z = c[2] / k;
      double th = std::atan2(y, x);
      if (th < 0.0) th += 2.0 * std::numbers::pi;
      const double rho = std::hypot(x, y);
      return th >= th0 && std::abs(z) <= L && a * std::cosh(z / a) <= rho && rho <= 1.0;
    };
  }

  const GridSpec& g = s.spec;
  VoxelSet e(g);
  bool near_frame = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index3 v = g.coords(i);
    if (!inside(g.center(v))) continue;
    if (g.frame_distance(v) < 3) {
      near_frame = true;
      continue;
    }
    e.insert(i);
  }
  if (near_frame) throw PreconditionError("scene '" + s.kind + "' reaches within 3 cells of the grid frame");
  if (e.empty()) throw PreconditionError("scene '" + s.kind + "' rasterizes to an empty set");
  return e;
}

inline VoxelSet torus(double R, double a, const GridSpec& spec) {
  SceneSpec s;
  s.kind = "torus";
  s.params = {{"R", R}, {"a", a}};
  s.spec = spec;
  return generate(s);
}

}  // namespace mchull
