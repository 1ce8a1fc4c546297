#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mchull/cli.hpp"

using namespace mchull;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mchull_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

int cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config({"shape"});
  EXPECT_EQ(c.command, "shape");
  EXPECT_EQ(c.scene, "ball");
  EXPECT_EQ(c.grid, 128);
  EXPECT_EQ(c.stencil, 0);
  EXPECT_EQ(resolved_dim(c), 2);
  EXPECT_EQ(resolved_stencil(c, 2), 16);
  EXPECT_EQ(resolved_stencil(c, 3), 26);
}

TEST(Config, FlagsParse) {
  const RunConfig c = parse_config({"--grid", "64", "hull", "--scene", "catenoid", "--eps", "3,1", "--hs", "64,32",
                                    "--no-grid-limit", "--param", "scale=0.5", "--stencil", "98"});
  EXPECT_EQ(c.command, "hull");
  EXPECT_EQ(c.scene, "catenoid_region");
  EXPECT_EQ(resolved_dim(c), 3);
  EXPECT_EQ(c.grid, 64);
  EXPECT_EQ(c.stencil, 98);
  EXPECT_EQ(c.eps, (std::vector<double>{3, 1}));
  EXPECT_EQ(c.hs, (std::vector<double>{64, 32}));
  EXPECT_FALSE(c.grid_limit);
  EXPECT_EQ(c.scene_params.at("scale"), 0.5);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parse_config({}), PreconditionError);
  EXPECT_THROW(parse_config({"flow", "--h", "-1"}), PreconditionError);
  EXPECT_THROW(parse_config({"verify", "--suite", "nope"}), PreconditionError);
  EXPECT_THROW(parse_config({"shape", "--scene", "teapot"}), PreconditionError);
  EXPECT_THROW(parse_config({"shape", "--param", "radius"}), PreconditionError);
  EXPECT_THROW(parse_config({"shape", "--param", "radius=abc"}), PreconditionError);
  EXPECT_THROW(parse_config({"shape", "--bogus"}), PreconditionError);
  EXPECT_THROW(parse_config({"export"}), PreconditionError);
  EXPECT_THROW(parse_config({"--grid", "4", "shape"}), PreconditionError);
  try {
    parse_config({"shape", "--stencil", "7"});
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("4, 8, 16, 32"), std::string::npos);
  }
}

TEST(Config, HelpIsNotAnError) {
  EXPECT_THROW(parse_config({"--help"}), HelpRequested);
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"--help"}, out, err), kExitOk);
  EXPECT_NE(out.str().find("hull"), std::string::npos);
}

TEST(Config, FileLayerAndOverrides) {
  const fs::path dir = scratch("config");
  const fs::path f = write_text(dir / "run.json", R"({"command": "flow", "grid": {"n": 48}, "flow": {"h": 32},
                                                     "scene": {"kind": "box", "params": {"hx": 0.3}}})");
  const RunConfig a = parse_config({"--config", f.string()});
  EXPECT_EQ(a.command, "flow");
  EXPECT_EQ(a.grid, 48);
  EXPECT_EQ(a.h, 32);
  EXPECT_EQ(a.scene, "box");
  EXPECT_TRUE(a.overrides.empty());

  const RunConfig b = parse_config({"--config", f.string(), "--grid", "64", "flow", "--h", "16", "--param", "hx=0.2"});
  EXPECT_EQ(b.grid, 64);
  EXPECT_EQ(b.h, 16);
  EXPECT_EQ(b.scene_params.at("hx"), 0.2);
  EXPECT_EQ(b.overrides, (std::vector<std::string>{"grid.n", "scene.params.hx", "flow.h"}));
}

TEST(Config, FileErrorsNameTheKey) {
  const fs::path dir = scratch("config_err");
  auto message = [&](const std::string& text) {
    const fs::path f = write_text(dir / "bad.json", text);
    try {
      parse_config({"--config", f.string(), "shape"});
    } catch (const PreconditionError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(R"({"grid": {"m": 3}})").find("grid.m"), std::string::npos);
  EXPECT_NE(message(R"({"flow": {"h": "big"}})").find("flow.h"), std::string::npos);
  EXPECT_NE(message(R"({"colour": 1})").find("colour"), std::string::npos);
  EXPECT_NE(message("{not json").find("not valid JSON"), std::string::npos);
  EXPECT_NE(message(R"({"seed": -3})").find("seed"), std::string::npos);
  EXPECT_THROW(parse_config({"--config", (dir / "missing.json").string(), "shape"}), PreconditionError);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c = parse_config({"--seed", "9", "verify", "--suite", "lattice", "--trials", "5"});
  RunConfig d;
  apply_config_json(d, config_json(c));
  EXPECT_EQ(config_json(d).dump(), config_json(c).dump());
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  std::string err;
  EXPECT_EQ(cli({"shape", "--stencil", "7"}, &err), kExitUsage);
  EXPECT_NE(err.find("stencil"), std::string::npos);
  EXPECT_EQ(cli({"--out", dir.string(), "shape", "--param", "radius=0.99"}, &err), kExitUsage);
  EXPECT_EQ(cli({"--out", dir.string(), "export", "--in", (dir / "none.mchv").string(), "--pgm"}), kExitUsage);
  write_text(dir / "junk.mchv", "not a volume");
  EXPECT_EQ(cli({"--out", dir.string(), "export", "--in", (dir / "junk.mchv").string(), "--pgm"}), kExitRuntime);
}

TEST(Cli, ShapeFlowAndExport) {
  const fs::path dir = scratch("run");
  ASSERT_EQ(cli({"--out", dir.string(), "--grid", "32", "shape", "--scene", "l_shape"}), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "obstacle.mchv"));
  EXPECT_TRUE(fs::exists(dir / "obstacle.pgm"));
  EXPECT_TRUE(fs::exists(dir / "shape.json"));
  EXPECT_EQ(read_json(dir / "config.json")["command"], "shape");

  ASSERT_EQ(cli({"--out", dir.string(), "--grid", "32", "flow", "--scene", "l_shape", "--h", "16"}), kExitOk);
  const Json f = read_json(dir / "flow.json");
  EXPECT_TRUE(f["stationary"].get<bool>());
  EXPECT_FALSE(f["steps"].empty());
  std::ifstream vol(dir / "final.mchv", std::ios::binary);
  const VoxelSet fin = read_mchv(vol);
  EXPECT_DOUBLE_EQ(measure(fin), f["final_measure"].get<double>());

  const fs::path out2 = dir / "export";
  ASSERT_EQ(cli({"--out", out2.string(), "export", "--in", (dir / "final.mchv").string(), "--pgm"}), kExitOk);
  EXPECT_TRUE(fs::exists(out2 / "final.pgm"));
}

TEST(Cli, HullWritesReportAndMesh) {
  const fs::path dir = scratch("hull");
  ASSERT_EQ(cli({"--out", dir.string(), "--grid", "24", "hull", "--scene", "ball", "--dim", "3", "--eps", "1", "--hs",
                 "32,16", "--obj"}),
            kExitOk);
  const Json h = read_json(dir / "hull.json");
  EXPECT_EQ(h["epsilons"].size(), 2u);
  EXPECT_EQ(h["runs"].size(), 4u);
  EXPECT_TRUE(fs::exists(dir / "hull.mchv"));
  EXPECT_TRUE(fs::exists(dir / "hull.obj"));
}

TEST(Cli, VerifySuites) {
  const fs::path dir = scratch("verify");
  ASSERT_EQ(cli({"--out", dir.string(), "verify", "--suite", "lattice", "--trials", "20"}), kExitOk);
  const Json v = read_json(dir / "verify.json");
  ASSERT_TRUE(v.is_array());
  EXPECT_EQ(v[0]["name"], "lattice");
  EXPECT_TRUE(v[0]["pass"].get<bool>());
}

TEST(Cli, RerunIsByteIdentical) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> tail{"--grid", "32", "verify", "--suite", "submodularity", "--trials", "30"};
  std::vector<std::string> ra{"--out", a.string(), "--seed", "5", "--jobs", "1"};
  std::vector<std::string> rb{"--out", b.string(), "--seed", "5", "--jobs", "2"};
  ra.insert(ra.end(), tail.begin(), tail.end());
  rb.insert(rb.end(), tail.begin(), tail.end());
  ASSERT_EQ(cli(ra), kExitOk);
  ASSERT_EQ(cli(rb), kExitOk);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(a / "verify.json"), slurp(b / "verify.json"));
}
