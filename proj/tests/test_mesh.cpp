#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "mchull/mesh.hpp"
#include "mchull/report.hpp"
#include "mchull/scenes.hpp"

using namespace mchull;

namespace {

VoxelSet ball3(int n, double r) {
  SceneSpec s;
  s.kind = "ball";
  s.params = {{"radius", r}};
  s.spec = centered_grid(3, n);
  return generate(s);
}

}  // namespace

TEST(Mesh, BallSurfaceIsClosedAndOriented) {
  const TriangleMesh m = extract_surface(ball3(32, 0.5));
  ASSERT_FALSE(m.faces.empty());
  // Every directed edge appears once and its reverse once.
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
  }
  for (const auto& [e, n] : directed) {
    EXPECT_EQ(n, 1);
    EXPECT_EQ(directed.count({e.second, e.first}), 1u);
  }
  const long long v = static_cast<long long>(m.vertices.size());
  const long long f = static_cast<long long>(m.faces.size());
  const long long e = static_cast<long long>(directed.size()) / 2;
  EXPECT_EQ(v - e + f, 2);

  // Signed volume from the divergence theorem: positive for outward faces.
  double vol = 0.0;
  for (const auto& t : m.faces) {
    const auto& a = m.vertices[t[0]];
    const auto& b = m.vertices[t[1]];
    const auto& c = m.vertices[t[2]];
    vol += (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
            a[2] * (b[0] * c[1] - b[1] * c[0])) / 6.0;
  }
  const double exact = 4.0 / 3.0 * std::numbers::pi * 0.125;
  EXPECT_NEAR(vol, exact, 0.05 * exact);
}

TEST(Mesh, TorusHasGenusOne) {
  const TriangleMesh m = extract_surface(torus(0.6, 0.25, centered_grid(3, 40)));
  std::map<std::pair<std::size_t, std::size_t>, int> edges;
  for (const auto& f : m.faces) {
    for (int k = 0; k < 3; ++k) ++edges[std::minmax(f[k], f[(k + 1) % 3])];
  }
  const long long chi = static_cast<long long>(m.vertices.size()) - static_cast<long long>(edges.size()) +
                        static_cast<long long>(m.faces.size());
  EXPECT_EQ(chi, 0);
}

TEST(Mesh, RejectsPlanarSets) {
  const VoxelSet e = VoxelSet::interior(centered_grid(2, 16));
  EXPECT_THROW(extract_surface(e), PreconditionError);
}

TEST(Mesh, ObjFormat) {
  const TriangleMesh m = extract_surface(ball3(16, 0.5));
  std::ostringstream os;
  write_obj(os, m);
  std::istringstream in(os.str());
  std::string line;
  std::size_t nv = 0, nf = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++nv;
    if (line.rfind("f ", 0) == 0) ++nf;
  }
  EXPECT_EQ(nv, m.vertices.size());
  EXPECT_EQ(nf, m.faces.size());
}

TEST(Report, CheckJsonFieldsAndOrder) {
  CheckReport r;
  r.name = "x";
  r.trials = 3;
  r.metrics["b"] = 2.0;
  r.metrics["a"] = 1.0;
  r.pass = true;
  const Json j = check_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"name", "mode", "trials", "violations", "worst_case", "fitted", "metrics",
                                            "inconclusive", "pass"}));
  EXPECT_TRUE(j["fitted"].is_null());
  EXPECT_EQ(j["metrics"].begin().key(), "a");
  r.fitted = PowerFit{0.5, 2.0, 0.99};
  r.note = "n";
  const Json k = check_json(r);
  EXPECT_EQ(k["fitted"]["exponent"], 0.5);
  EXPECT_EQ(k["note"], "n");
}

TEST(Report, StencilAndGrid) {
  const Stencil s = build_stencil(2, 16);
  const Json j = stencil_json(s);
  EXPECT_EQ(j["order"], 16);
  EXPECT_EQ(j["offsets"].size(), s.offsets.size());
  EXPECT_EQ(j["weights"].size(), s.weights.size());
  const Json g = grid_json(centered_grid(3, 8));
  EXPECT_EQ(g["shape"], Json::parse("[8, 8, 8]"));
  EXPECT_EQ(g["origin"][0], -1.0);
}
