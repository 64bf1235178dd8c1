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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "narrowcap/io.hpp"

namespace narrowcap {

struct CliOptions {
  std::string out_dir;                // empty: no artifacts on disk
  std::optional<std::uint64_t> seed;  // overrides mc.seed
  int threads = 0;
  std::string format = "json";  // json | csv | both
  int criterion = 0;            // acceptance only
};

struct CsvArtifact {
  std::string name;  // file name inside out_dir
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct CommandResult {
  Json json;  // carries schema_version and pass
  bool pass = false;
  std::vector<CsvArtifact> csv;
};

const std::vector<std::string>& command_names();

/// Dispatches one subcommand. Throws narrowcap::Error subclasses.
CommandResult run_command(const std::string& command, const Json& config,
                          const CliOptions& opt);

/// Machine-readable error object for a failed run.
Json error_json(const std::string& kind, const std::string& message);

}  // namespace narrowcap
