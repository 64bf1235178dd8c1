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

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "narrowcap/cli.hpp"
#include "narrowcap/errors.hpp"

namespace nc = narrowcap;

namespace {

// Exit codes: 0 all pass flags true, 1 a check failed, 2 config error,
// 3 numerical failure.
int emit_error(const std::string& kind, const std::string& msg) {
  std::cout << nc::dump_json(nc::error_json(kind, msg)) << "\n";
  return kind == "config" ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Narrow-capture MFPT toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::string format = "json";
  nc::CliOptions opt;
  std::uint64_t seed = 0;

  for (const auto& name : nc::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", opt.out_dir, "directory for result.json and CSV artifacts");
    sub->add_option("--seed", seed, "Monte Carlo seed (overrides the config)");
    sub->add_option("--threads", opt.threads, "worker cap (0: all cores)");
    sub->add_option("--format", format, "json | csv | both");
    if (name == "acceptance")
      sub->add_option("--criterion", opt.criterion, "criterion number")->required();
    else
      sub->get_option("--config")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("config", e.what());
  }
  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed") > 0) opt.seed = seed;
  opt.format = format;

  try {
    nc::Json config = nc::Json::object();
    if (!config_path.empty()) {
      try {
        config = nc::Json::parse(nc::read_file(config_path), nullptr, true, true);
      } catch (const nc::Json::parse_error& e) {
        throw nc::ConfigError(std::string("malformed config: ") + e.what());
      }
    }
    nc::CommandResult r = nc::run_command(sub->get_name(), config, opt);
    const std::string text = nc::dump_json(r.json) + "\n";
    if (opt.format != "csv") std::cout << text;
    if (!opt.out_dir.empty()) {
      std::filesystem::create_directories(opt.out_dir);
      const std::filesystem::path dir(opt.out_dir);
      if (opt.format != "csv") {
        std::ofstream f(dir / "result.json");
        f << text;
      }
      if (opt.format != "json")
        for (const auto& c : r.csv) nc::write_csv((dir / c.name).string(), c.header, c.rows);
    } else if (opt.format == "csv") {
      throw nc::ConfigError("--format csv needs --out");
    }
    return r.pass ? 0 : 1;
  } catch (const nc::Error& e) {
    return emit_error(e.kind(), e.what());
  } catch (const nc::Json::exception& e) {
    return emit_error("config", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return emit_error("config", e.what());
  }
}
