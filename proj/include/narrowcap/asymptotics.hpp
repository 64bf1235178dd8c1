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

#include "narrowcap/green.hpp"
#include "narrowcap/trap_shape.hpp"

namespace narrowcap {

struct MFPTResult {
  double leading = 0.0;     // -(|M|/2pi) log eps
  double constant = 0.0;    // |M| R(x0)
  double point_term = 0.0;  // -|M| E(x, x0); zero for the average
  double total = 0.0;
  std::string error_order = "O(eps log eps)";
  RegularPartEstimate regular_part;
};

/// Expected capture time from x. Points within exclusion * eps of x0 are
/// rejected.
MFPTResult mfpt_pointwise(const GreenFunction& g, const TrapSpec& trap,
                          const SurfacePoint& x, double exclusion = 2.0);
/// Spatial average over M_eps.
MFPTResult mfpt_average(const GreenFunction& g, const TrapSpec& trap);

/// Length of the trap boundary from the induced metric on the chart circle.
double trap_boundary_length(const Surface& s, const TrapSpec& trap,
                            int n = 256);

/// Riemannian volume density sqrt(det g) of the normal chart at x0.
double chart_density(const Surface& s, const SurfacePoint& x0,
                     const Eigen::Vector2d& t);

struct TrapArea {
  double trap = 0.0;        // |Gamma_eps|
  double complement = 0.0;  // |M_eps| = |M| - |Gamma_eps|
};
TrapArea trap_area(const Surface& s, const TrapSpec& trap);

}  // namespace narrowcap
