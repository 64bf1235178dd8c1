// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "narrowcap/cli.hpp"
#include "narrowcap/errors.hpp"
#include "narrowcap/io.hpp"

using namespace narrowcap;

TEST(Io, SurfaceRoundTrip) {
  const Json j = Json::parse(R"({"family": "conformal_torus", "L1": 1.0, "L2": 1.0,
      "phi": {"kind": "cosine_bump", "amplitude": 0.3, "mode": [1,0]}, "grid": 256})");
  const SurfaceSpec s = surface_from_json(j);
  EXPECT_EQ(s.family, Family::ConformalTorus);
  EXPECT_EQ(s.grid_n, 256);
  EXPECT_DOUBLE_EQ(s.phi.value(0.0, 0.0, 1, 1), 0.3);
  const SurfaceSpec back = surface_from_json(surface_to_json(s));
  EXPECT_EQ(back.phi.kind(), ConformalFactor::Kind::CosineBump);
  EXPECT_DOUBLE_EQ(back.phi.amplitude(), 0.3);

  const SurfaceSpec gb = surface_from_json(Json::parse(
      R"({"family": "conformal_torus", "phi": {"kind": "gaussian_bump", "center": [0.5, 0.5], "width": 0.1, "amplitude": 0.2}})"));
  EXPECT_NEAR(gb.phi.value(0.5, 0.5, 1, 1), 0.2, 1e-12);
  std::vector<double> vals(16 * 16, 0.1);
  Json grid = {{"family", "conformal_torus"}, {"grid", 64}, {"phi", {{"kind", "grid"}, {"values", vals}}}};
  EXPECT_NEAR(surface_from_json(grid).phi.value(0.3, 0.7, 1, 1), 0.1, 1e-12);
}

TEST(Io, ConfigErrors) {
  EXPECT_THROW(surface_from_json(Json::parse(R"({"family": "klein"})")), ConfigError);
  EXPECT_THROW(surface_from_json(Json::parse(R"({"L1": 1})")), ConfigError);
  EXPECT_THROW(surface_from_json(Json::parse(R"({"family": "flat_torus", "L1": "x"})")), ConfigError);
  EXPECT_THROW(phi_from_json(Json::parse(R"({"kind": "gaussian_bump", "center": [0.5], "width": 0.1, "amplitude": 1})")),
               ConfigError);
  const Surface d(SurfaceSpec::unit_disk());
  EXPECT_THROW(trap_from_json(d, Json::parse(R"({"center": [0.95, 0.0], "eps": 0.05})")), ConfigError);
  EXPECT_THROW(point_from_json(d, Json::parse("[2.0, 0.0]")), ConfigError);
  MCConfig c;
  EXPECT_THROW(mc_from_json(d, Json::parse(R"({"n_paths": 10})")), ConfigError);
  EXPECT_THROW(mc_from_json(d, Json::parse(R"({"start": "anywhere"})")), ConfigError);
}

TEST(Io, DumpUsesSeventeenDigits) {
  Json j;
  j["x"] = 0.1;
  j["nan"] = std::nan("");
  j["v"] = std::vector<double>{1.0 / 3.0};
  const std::string s = dump_json(j, 0);
  EXPECT_EQ(s, R"({"x":0.10000000000000001,"nan":null,"v":[0.33333333333333331]})");
  EXPECT_DOUBLE_EQ(Json::parse(dump_json(j))["v"][0].get<double>(), 1.0 / 3.0);
}

TEST(Io, CsvHasHeader) {
  const auto path = (std::filesystem::temp_directory_path() / "narrowcap_test.csv").string();
  write_csv(path, {"a", "b"}, {{1.0, 0.5}, {2.0, std::nan("")}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a,b");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0.5");
  std::getline(in, line);
  EXPECT_EQ(line, "2,nan");
}

TEST(Cli, MfptSphereAntipodal) {
  const Json cfg = Json::parse(R"({"surface": {"family": "round_sphere", "radius": 1.0},
      "trap": {"center": [0, 0, 1], "eps": 0.01}, "point": [0, 0, -1]})");
  const CommandResult r = run_command("mfpt", cfg, {});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.json["schema_version"], 1);
  EXPECT_NEAR(r.json["mfpt"]["total"].get<double>(), 10.5966, 5e-5);
}

TEST(Cli, OutputIsReproducible) {
  const Json cfg = Json::parse(R"({"surface": {"family": "flat_torus"},
      "trap": {"center": [0.5, 0.5], "eps": 0.1},
      "mc": {"n_paths": 200, "seed": 4}})");
  CliOptions o;
  o.threads = 2;
  const std::string a = dump_json(run_command("validate-mc", cfg, o).json);
  o.threads = 1;
  const std::string b = dump_json(run_command("validate-mc", cfg, o).json);
  EXPECT_EQ(a, b);
  o.seed = 5;
  EXPECT_NE(dump_json(run_command("validate-mc", cfg, o).json), a);
}

TEST(Cli, CommandsProduceJson) {
  const Json green = Json::parse(R"({"surface": {"family": "flat_torus"}, "source": [0.5, 0.5],
      "points": [[0.1, 0.1], [0.7, 0.2]]})");
  const CommandResult g = run_command("green", green, {});
  EXPECT_EQ(g.json["values"].size(), 2u);
  EXPECT_EQ(g.csv.front().rows.size(), 2u);
  const Json rp = Json::parse(R"({"surface": {"family": "unit_disk"}, "center": [0.0, 0.0]})");
  EXPECT_NEAR(run_command("regular-part", rp, {}).json["regular_part"]["value"].get<double>(),
              -3.0 / (8 * 3.14159265358979323846), 1e-7);
  const Json sc = Json::parse(R"({"surface": {"family": "flat_torus"}, "center": [0.5, 0.5],
      "quantity": "kernel_const", "ladder": [0.02, 0.01, 0.005, 0.0025]})");
  EXPECT_TRUE(run_command("scaling", sc, {}).pass);
  const Json op = Json::parse(R"({"surface": {"family": "flat_torus"}, "coarse_n": 8})");
  const CommandResult o = run_command("optimize", op, {});
  EXPECT_TRUE(o.json["degenerate"].get<bool>());
  EXPECT_EQ(o.csv.front().rows.size(), 64u);
}

TEST(Cli, ErrorsCarryKind) {
  EXPECT_THROW(run_command("mfpt", Json::parse(R"({"surface": {"family": "flat_torus"}})"), {}), ConfigError);
  EXPECT_THROW(run_command("teleport", Json::object(), {}), ConfigError);
  CliOptions bad;
  bad.format = "xml";
  EXPECT_THROW(run_command("green", Json::object(), bad), ConfigError);
  const Json e = error_json("config", "missing key");
  EXPECT_EQ(e["error"]["kind"], "config");
  EXPECT_EQ(e["pass"], false);
}
