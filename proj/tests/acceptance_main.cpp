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

// Runs every acceptance criterion and prints one line per criterion.
// Optional arguments select criteria by number.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "narrowcap/acceptance.hpp"
#include "narrowcap/errors.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int k = 1; k < argc; ++k) ids.push_back(std::atoi(argv[k]));
  if (ids.empty())
    for (int k = 1; k <= narrowcap::kCriterionCount; ++k) ids.push_back(k);
  int failed = 0;
  for (int id : ids) {
    bool pass = false;
    double secs = 0.0;
    std::string why;
    try {
      const narrowcap::CriterionResult r = narrowcap::run_criterion(id);
      pass = r.pass;
      secs = r.seconds;
    } catch (const narrowcap::Error& e) {
      why = std::string(" (") + e.kind() + ": " + e.what() + ")";
    }
    std::printf("criterion %d %-45s %s  %.1fs%s\n", id,
                narrowcap::criterion_title(id).c_str(), pass ? "PASS" : "FAIL", secs,
                why.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
