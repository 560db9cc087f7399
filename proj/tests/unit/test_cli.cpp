#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json_writer.hpp"
#include "run.hpp"

using namespace confgeo;
using namespace confgeo::cli;

namespace {

namespace fs = std::filesystem;

struct Invocation {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("confgeo_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

Invocation invoke(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch() / ("out" + std::to_string(counter) + ".json");
  const fs::path err = scratch() / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(CONFGEO_CLI_PATH) + " " + args + " --out " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Invocation r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

RunResult run_text(Command c, const std::string& text, std::uint64_t seed = 0) {
  return run(c, parse_config(text), RunOptions{seed, false});
}

const char* kCubic4 = R"({"signature": [4, 0], "surface": {"catalog": "graph-cubic"}, "grid": 3, "directions": 4})";

}  // namespace

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const auto cfg = write_config("det.json", kCubic4);
  const auto a = invoke("invariant --no-timestamp --seed 11 --config " + cfg.string());
  const auto b = invoke("invariant --no-timestamp --seed 11 --config " + cfg.string());
  ASSERT_EQ(a.exit_code, 0) << a.err;
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find("timestamp"), std::string::npos);
}

TEST(Cli, TimestampIsTheOnlyVaryingField) {
  const auto cfg = write_config("ts.json", kCubic4);
  auto a = Json::parse(invoke("invariant --seed 3 --config " + cfg.string()).out);
  auto b = Json::parse(invoke("invariant --no-timestamp --seed 3 --config " + cfg.string()).out);
  ASSERT_TRUE(a.contains("timestamp"));
  a.erase("timestamp");
  EXPECT_EQ(to_text(a), to_text(b));
}

TEST(Cli, SeedControlsSampledDirections) {
  const auto a = run_text(Command::Invariant, kCubic4, 1).record;
  const auto b = run_text(Command::Invariant, kCubic4, 2).record;
  EXPECT_NE(a["points"][0]["I"][0]["w"], b["points"][0]["I"][0]["w"]);
  EXPECT_EQ(a["points"][0]["I"].size(), 4u);
}

TEST(Cli, RecordHasSelfDescribingHeader) {
  const auto r = run_text(Command::Invariant, kCubic4).record;
  EXPECT_EQ(r["tool"], "confgeo");
  EXPECT_EQ(r["version"], kToolVersion);
  EXPECT_EQ(r["command"], "invariant");
  EXPECT_EQ(r["config"]["surface"]["catalog"], "graph-cubic");
  EXPECT_EQ(r["points"].size(), 27u);
  EXPECT_EQ(r["summary"]["error_count"], 0);
}

TEST(Cli, NumbersRoundTripExactly) {
  const auto rec = run_text(Command::Invariant, kCubic4).record;
  const auto back = Json::parse(to_text(rec));
  for (std::size_t k = 0; k < rec["points"].size(); ++k) {
    for (std::size_t s = 0; s < rec["points"][k]["I"].size(); ++s) {
      EXPECT_EQ(rec["points"][k]["I"][s]["I"].get<double>(), back["points"][k]["I"][s]["I"].get<double>());
    }
  }
}

TEST(Cli, WriterFormatsNumbers) {
  Json doc = {{"a", 0.1}, {"b", 1.0}, {"c", 3}, {"d", std::numeric_limits<double>::quiet_NaN()}, {"e", 1e300}};
  const std::string text = to_text(doc);
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(text.find("\"b\": 1.0"), std::string::npos);
  EXPECT_NE(text.find("\"c\": 3"), std::string::npos);
  EXPECT_NE(text.find("\"d\": null"), std::string::npos);
  EXPECT_NE(text.find("1.0000000000000001e+300"), std::string::npos);
}

TEST(Cli, MobiusApplyOutputReingestsWithSameInvariant) {
  const std::string cfg = R"({"signature": [4, 0], "surface": {"catalog": "graph-cubic"}, "grid": 3,
    "transform": [{"translation": [0.2, -0.1, 0.3, 1.5]}, {"rotation": {"axes": [1, 4], "angle": 0.4}},
                  {"inversion": 1.0}, {"dilation": 2.0}]})";
  const auto applied = run_text(Command::MobiusApply, cfg);
  ASSERT_EQ(applied.exit_code, 0);
  EXPECT_LT(applied.record["summary"]["max_expression_residual"].get<double>(), 1e-12);

  const std::string dirs = R"([[1, 0, 0], [0.3, -1, 0.5], [0.2, 0.7, -0.4]])";
  Json again = Json::parse(R"({"signature": [4, 0], "grid": 3})");
  again["surface"] = applied.record["surface"];
  again["directions"] = Json::parse(dirs);
  const auto before = run_text(Command::Invariant, std::string(R"({"signature": [4, 0], "surface": {"catalog": "graph-cubic"},
    "grid": 3, "directions": )") + dirs + "}").record;
  const auto after = run_text(Command::Invariant, again.dump()).record;
  ASSERT_EQ(after["summary"]["error_count"], 0);
  for (std::size_t k = 0; k < before["points"].size(); ++k) {
    for (std::size_t s = 0; s < 3; ++s) {
      const double i0 = before["points"][k]["I"][s]["I"];
      const double i1 = after["points"][k]["I"][s]["I"];
      EXPECT_NEAR(i1, i0, 1e-6 * std::max(1.0, std::abs(i0))) << "point " << k << " direction " << s;
    }
  }
}

TEST(Cli, MobiusApplyReportsConformalFactor) {
  const auto r = run_text(Command::MobiusApply,
                          R"({"signature": [4, 0], "surface": {"catalog": "paraboloid"}, "grid": 2,
                              "transform": [{"dilation": 3.0}]})").record;
  for (const auto& p : r["points"]) {
    EXPECT_NEAR(p["conformal_factor"].get<double>(), 3.0, 1e-12);
    for (int a = 0; a < 4; ++a) EXPECT_NEAR(p["x_bar"][a].get<double>(), 3.0 * p["x"][a].get<double>(), 1e-12);
  }
}

TEST(Cli, DilationEquivalenceGivesConstantSigma) {
  const auto cfg = write_config("dil.json", R"({"signature": [5, 0], "surface": {"catalog": "graph-cubic"},
    "surface_bar": {"catalog": "graph-cubic", "transform": [{"dilation": 2.0}]}, "grid": 4})");
  const auto inv = invoke("equivalence --no-timestamp --config " + cfg.string());
  ASSERT_EQ(inv.exit_code, 0) << inv.err;
  const auto r = Json::parse(inv.out);
  EXPECT_EQ(r["summary"]["verdict"], "equivalent");
  EXPECT_EQ(r["summary"]["certified"], true);
  ASSERT_EQ(r["points"].size(), 256u);
  for (const auto& p : r["points"]) EXPECT_NEAR(p["sigma"].get<double>(), 2.0, 1e-12);
}

TEST(Cli, NonEquivalentSurfacesExitZeroWithNegativeVerdict) {
  const auto r = run_text(Command::Equivalence, R"({"signature": [4, 0], "surface": {"catalog": "graph-cubic"},
    "surface_bar": {"catalog": "ellipsoid-graph"}, "grid": 3, "reconstruct": false})");
  EXPECT_EQ(r.exit_code, kSuccess);
  EXPECT_EQ(r.record["summary"]["equivalent"], false);
}

TEST(Cli, EquivalenceInDimensionThreeIsRefused) {
  const auto cfg = write_config("n3.json", R"({"signature": [3, 0], "surface": {"catalog": "graph-cubic"},
    "surface_bar": {"catalog": "graph-cubic", "transform": [{"dilation": 2.0}]}})");
  const auto inv = invoke("equivalence --no-timestamp --config " + cfg.string());
  EXPECT_EQ(inv.exit_code, 2);
  const auto r = Json::parse(inv.out);
  EXPECT_EQ(r["refusal"]["kind"], "DimensionTooSmall");
  EXPECT_NE(r["refusal"]["message"].get<std::string>().find("n = 3"), std::string::npos);
  EXPECT_EQ(r["summary"]["certified"], false);
  EXPECT_FALSE(r["summary"].contains("equivalent"));
}

TEST(Cli, LemmaCheckInDimensionThreeIsUncertified) {
  const auto r = run_text(Command::LemmaCheck, R"({"signature": [2, 1], "surface": {"catalog": "pseudo-graph"}, "grid": 3})");
  EXPECT_EQ(r.exit_code, kRefusal);
  EXPECT_EQ(r.record["points"].size(), 9u);
  EXPECT_EQ(r.record["summary"]["certified"], false);
}

TEST(Cli, InvariantRunsInDimensionThree) {
  const auto r = run_text(Command::Invariant, R"({"signature": [3, 0], "surface": {"catalog": "graph-cubic"}, "grid": 3})");
  EXPECT_EQ(r.exit_code, kSuccess);
}

TEST(Cli, UmbilicGridIsRefused) {
  const auto r = run_text(Command::Equivalence, R"({"signature": [4, 0], "surface": {"catalog": "sphere-stereographic"},
    "surface_bar": {"catalog": "sphere-stereographic"}, "grid": 2})");
  EXPECT_EQ(r.exit_code, kRefusal);
  EXPECT_EQ(r.record["refusal"]["kind"], "GridContainsUmbilics");
  EXPECT_EQ(r.record["refusal"]["points"].size(), 8u);
}

TEST(Cli, SphereIsUmbilicEverywhere) {
  const auto r = run_text(Command::Invariant, R"({"signature": [4, 0], "surface": {"catalog": "sphere-stereographic"}, "grid": 3})");
  EXPECT_EQ(r.record["summary"]["all_umbilic"], true);
  EXPECT_LT(r.record["summary"]["max_abs_I"].get<double>(), 1e-10);
}

TEST(Cli, ParaboloidIsUmbilicOnlyAtItsVertex) {
  const auto r = run_text(Command::Invariant, R"({"signature": [4, 0], "surface": {"catalog": "paraboloid"}, "grid": 3})");
  ASSERT_EQ(r.exit_code, 0);
  const auto& pts = r.record["points"];
  for (std::size_t k = 0; k < pts.size(); ++k) EXPECT_EQ(pts[k]["umbilic"].get<bool>(), k == 13) << k;
  EXPECT_EQ(r.record["summary"]["umbilic_points"], 1);
}

TEST(Cli, FrameCommandReportsSmallResiduals) {
  const auto r = run_text(Command::Frame, R"({"signature": [4, 0], "surface": {"catalog": "graph-cubic"}, "grid": 2,
    "tolerances": {"fd_step": 1e-4}})");
  ASSERT_EQ(r.exit_code, 0);
  const auto& s = r.record["summary"];
  EXPECT_LT(s["max_frame_residual"].get<double>(), 1e-10);
  EXPECT_LT(s["max_h_recovery_error"].get<double>(), 1e-5);
  EXPECT_GE(s["structure_ratio_range"][0].get<double>(), 2.5);
  EXPECT_LE(s["structure_ratio_range"][1].get<double>(), 6.0);
}

TEST(Cli, GridPointErrorsCarryLocation) {
  // The corners of this paraboloid are isotropic in signature (4,1).
  const auto r = run_text(Command::Invariant, R"({"signature": [4, 1], "surface": {"catalog": "paraboloid"}, "grid": 2})");
  EXPECT_EQ(r.exit_code, kError);
  ASSERT_FALSE(r.record["errors"].empty());
  const auto& e = r.record["errors"][0];
  EXPECT_TRUE(e.contains("kind"));
  EXPECT_TRUE(e.contains("index"));
  EXPECT_EQ(e["u"].size(), 4u);
  EXPECT_EQ(r.record["summary"]["error_count"].get<std::size_t>(), r.record["errors"].size());
}

TEST(Cli, ConfigErrorsNameLineAndField) {
  struct Case {
    std::string text;
    std::string field;
    int line;
  };
  const Case cases[] = {
      {"{\n  \"signature\": [4, 0],\n  \"surface\": {\"catalog\": \"graph-cubic\"},\n  \"grid\": 1\n}\n", "grid", 4},
      {"{\n  \"signature\": [4, 0],\n  \"surface\": {\"catalog\": \"graph-cubic\"},\n  \"colour\": 1\n}\n", "colour", 4},
      {"{\n  \"signature\": [4, 0],\n  \"surface\": {\n    \"components\": [\"u1\", \"u2 +* 1\", \"u3\", \"0\"],\n"
       "    \"domain\": [[0, 1], [0, 1], [0, 1]]\n  }\n}\n",
       "surface.components[1]", 4},
      {"{\n  \"signature\": [4, 0],\n  \"surface\": {\"catalog\": \"torus\"}\n}\n", "surface.catalog", 3},
      {"{\n  \"signature\": [4, 0],\n  \"surface\": {\"catalog\": \"graph-cubic\",\n", "", 4},
  };
  for (const auto& c : cases) {
    try {
      parse_config(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), c.field) << c.text;
      EXPECT_EQ(e.line(), c.line) << c.text;
    }
  }
}

TEST(Cli, ConfigErrorRecordAndExitStatus) {
  const auto cfg = write_config("bad.json", "{\n  \"signature\": [1, 0],\n  \"surface\": {\"catalog\": \"paraboloid\"}\n}\n");
  const auto inv = invoke("invariant --no-timestamp --config " + cfg.string());
  EXPECT_EQ(inv.exit_code, 1);
  const auto r = Json::parse(inv.out);
  EXPECT_EQ(r["errors"][0]["kind"], "ConfigError");
  EXPECT_EQ(r["errors"][0]["field"], "signature");
  EXPECT_EQ(r["errors"][0]["line"], 2);
  EXPECT_NE(inv.err.find("signature"), std::string::npos);
}

TEST(Cli, EquivalenceWithoutSecondSurfaceIsConfigError) {
  const auto r = run_text(Command::Equivalence, R"({"signature": [4, 0], "surface": {"catalog": "graph-cubic"}})");
  EXPECT_EQ(r.exit_code, kError);
  EXPECT_EQ(r.record["errors"][0]["field"], "surface_bar");
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(invoke("").exit_code, 1);
  EXPECT_EQ(invoke("invariant").exit_code, 1);
  EXPECT_EQ(invoke("bogus --config /dev/null").exit_code, 1);
}

TEST(Cli, CommandNamesRoundTrip) {
  for (auto c : {Command::Invariant, Command::Frame, Command::MobiusApply, Command::Equivalence, Command::LemmaCheck}) {
    EXPECT_EQ(command_from_name(command_name(c)), c);
  }
  EXPECT_FALSE(command_from_name("nope"));
}
