#pragma once

// Inspection meshes: the zero level of the signed distance, sampled at cell
// centers, extracted by marching tetrahedra (six tetrahedra per cube).

#include <array>
#include <cstdio>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "mchull/error.hpp"
#include "mchull/grid.hpp"
#include "mchull/sdf.hpp"

namespace mchull {

struct TriangleMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> faces;
};

inline TriangleMesh extract_surface(const VoxelSet& e) {
  const GridSpec& g = e.spec();
  if (g.dim != 3) throw PreconditionError("surface extraction needs a 3D set");
  const ScalarField sd = signed_distance(e);
  TriangleMesh m;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_vertex;

  auto vertex_on = [&](std::size_t a, std::size_t b) {
    const auto key = std::minmax(a, b);
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    const double fa = sd[a], fb = sd[b];
    const double t = fa / (fa - fb);
    const auto pa = g.center(a), pb = g.center(b);
    m.vertices.push_back({pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]), pa[2] + t * (pb[2] - pa[2])});
    edge_vertex.emplace(key, m.vertices.size() - 1);
    return m.vertices.size() - 1;
  };
  // Orient (a, b, c) so its normal points from `in` toward `out`.
  auto emit = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t in, std::size_t out) {
    const auto& pa = m.vertices[a];
    const auto& pb = m.vertices[b];
    const auto& pc = m.vertices[c];
    const std::array<double, 3> u{pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]};
    const std::array<double, 3> v{pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]};
    const std::array<double, 3> n{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    const auto pi = g.center(in), po = g.center(out);
    const double s = n[0] * (po[0] - pi[0]) + n[1] * (po[1] - pi[1]) + n[2] * (po[2] - pi[2]);
    if (s >= 0.0) {
      m.faces.push_back({a, b, c});
    } else {
      m.faces.push_back({a, c, b});
    }
  };

  // Cube corners in bit order (x, y, z); Kuhn split along the 0-7 diagonal.
  static const int tets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7}, {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};
  for (int z = 0; z + 1 < g.shape[2]; ++z)
    for (int y = 0; y + 1 < g.shape[1]; ++y)
      for (int x = 0; x + 1 < g.shape[0]; ++x) {
        std::array<std::size_t, 8> c;
        bool any_in = false, any_out = false;
        for (int k = 0; k < 8; ++k) {
          c[k] = g.index(Index3{x + (k & 1), y + (k >> 1 & 1), z + (k >> 2 & 1)});
          (sd[c[k]] < 0.0 ? any_in : any_out) = true;
        }
        if (!any_in || !any_out) continue;
        for (const auto& t : tets) {
          std::vector<std::size_t> in, out;
          for (int k : t) (sd[c[k]] < 0.0 ? in : out).push_back(c[k]);
          if (in.empty() || out.empty()) continue;
          if (in.size() == 1 || out.size() == 1) {
            const bool lone_in = in.size() == 1;
            const std::size_t p = lone_in ? in[0] : out[0];
            const auto& rest = lone_in ? out : in;
            const std::size_t a = vertex_on(p, rest[0]), b = vertex_on(p, rest[1]), d = vertex_on(p, rest[2]);
            emit(a, b, d, lone_in ? p : rest[0], lone_in ? rest[0] : p);
          } else {
            const std::size_t a = vertex_on(in[0], out[0]), b = vertex_on(in[0], out[1]);
            const std::size_t d = vertex_on(in[1], out[1]), f = vertex_on(in[1], out[0]);
            emit(a, b, d, in[0], out[0]);
            emit(a, d, f, in[0], out[0]);
          }
        }
      }
  return m;
}

inline void write_obj(std::ostream& os, const TriangleMesh& m) {
  char buf[96];
  os << "# mchull surface mesh (inspection only)\n";
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
    os << buf;
  }
  for (const auto& f : m.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace mchull
