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

#include <string>

#include "narrowcap/io.hpp"

namespace narrowcap {

constexpr int kCriterionCount = 8;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  Json details;
};

std::string criterion_title(int id);

/// Runs one end-to-end acceptance check (1..kCriterionCount).
CriterionResult run_criterion(int id, int threads = 0);

}  // namespace narrowcap
