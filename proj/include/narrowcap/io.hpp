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
#include <vector>

#include "json.hpp"
#include "narrowcap/geometry.hpp"
#include "narrowcap/green.hpp"
#include "narrowcap/montecarlo.hpp"
#include "narrowcap/report.hpp"
#include "narrowcap/trap_shape.hpp"

namespace narrowcap {

using Json = nlohmann::ordered_json;

// Loaders throw ConfigError naming the offending key.

/// {"family": "...", "radius" | "L1","L2" | "phi": {...}, "grid", "rho"}
SurfaceSpec surface_from_json(const Json& j);
Json surface_to_json(const SurfaceSpec& s);
ConformalFactor phi_from_json(const Json& j);
Json phi_to_json(const ConformalFactor& phi);

/// Sphere: [x, y, z] (projected) or {"polar": a, "azimuth": b}.
/// Other families: [a, b].
SurfacePoint point_from_json(const Surface& s, const Json& j);
Json point_to_json(const SurfacePoint& p);

/// {"center": point, "eps": r}; validated against the surface.
TrapSpec trap_from_json(const Surface& s, const Json& j);

/// Overrides the fields of `base` present in j; "start" is "uniform" or a
/// point.
MCConfig mc_from_json(const Surface& s, const Json& j, MCConfig base = {});

Json report_to_json(const ScalingReport& r);
Json regular_part_to_json(const RegularPartEstimate& r);

/// Serialises with 17 significant digits; non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);

/// Header row then one row per entry, numbers with 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string read_file(const std::string& path);

// Typed accessors used by the loaders and the CLI.
double get_number(const Json& j, const char* key);
double get_number(const Json& j, const char* key, double fallback);
int get_int(const Json& j, const char* key, int fallback);
std::vector<double> get_numbers(const Json& j, const char* key);

}  // namespace narrowcap
