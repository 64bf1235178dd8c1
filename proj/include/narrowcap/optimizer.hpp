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

#include <optional>
#include <string>
#include <vector>

#include "narrowcap/green.hpp"

namespace narrowcap {

/// R(x0) sampled on a lattice of centres. Torus: cell centres of the
/// fundamental domain. Sphere: (polar, azimuth) cell centres. Disk: cell
/// centres of [-0.85, 0.85]^2; cells outside |x| <= 0.85 hold NaN.
struct RobinLandscape {
  int n = 0;
  std::vector<SurfacePoint> centers;  // row-major, first coordinate major
  std::vector<double> a, b;           // lattice coordinates of each centre
  std::vector<double> values;
  std::vector<double> errors;         // extrapolation_error per centre
  double min_value = 0.0;
  double max_value = 0.0;
  double max_error = 0.0;
  int argmin = -1;

  double spread() const { return max_value - min_value; }
};

struct OptimizerOptions {
  int coarse_n = 16;
  int refine_iters = 200;
  double tolerance = 1e-3;  // simplex diameter
  // Constant added to every objective value (argmin invariance checks).
  double shift = 0.0;
  // Start the simplex here instead of at the coarse-grid argmin.
  std::optional<SurfacePoint> seed;
  int threads = 0;
};

struct TraceEntry {
  SurfacePoint center;
  double value = 0.0;
};

struct OptimizationResult {
  SurfacePoint best_center;
  double best_value = 0.0;  // includes OptimizerOptions::shift
  std::vector<TraceEntry> trace;
  std::optional<RobinLandscape> landscape;
  bool degenerate = false;
  bool converged = false;
  int iterations = 0;
  std::string warning;
};

/// Throws the failing ladder's error with the offending centre in the text.
RobinLandscape robin_landscape(const GreenFunction& g, int grid_n,
                               int threads = 0);

OptimizationResult optimize_trap_center(const GreenFunction& g,
                                        const OptimizerOptions& opt = {});

}  // namespace narrowcap
