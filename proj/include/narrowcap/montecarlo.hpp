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
#include <vector>

#include "narrowcap/report.hpp"
#include "narrowcap/trap_shape.hpp"

namespace narrowcap {

struct MCConfig {
  int n_paths = 10000;
  double base_dt = 1e-3;
  double dt_floor = 1e-5;
  std::uint64_t seed = 1;
  std::optional<SurfacePoint> start;  // empty: uniform on M_eps
  double max_time = 1e3;
  // Per-component variance of a step is step_variance_factor * dt; 2 matches
  // the generator Lap_g.
  double step_variance_factor = 2.0;
  int threads = 0;  // 0: hardware concurrency
  bool keep_samples = false;

  void validate() const;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n_paths)
  int n_paths = 0;
  int n_censored = 0;
  bool valid = false;
  double dt = 0.0;
  double dt_floor = 0.0;
  double dt_min_used = 0.0;
  double mean_steps = 0.0;
  std::vector<double> samples;  // per-path tau when keep_samples
};

/// Geodesic random walk until the walker is within eps of x0. Path i is
/// driven by a Brownian path built by counter-based bridge refinement from
/// (seed, i), so every time step sees the same underlying noise.
MCEstimate simulate_first_passage(const Surface& s, const TrapSpec& trap,
                                  const MCConfig& cfg);

struct BiasProbe {
  ScalingReport report;  // values = level means against dt
  std::vector<MCEstimate> levels;
  double intercept = 0.0;
  double intercept_stderr = 0.0;
  double slope = 0.0;
};

/// Runs every dt of the ladder on the same Brownian paths and extrapolates
/// each path's capture time linearly in sqrt(dt) to dt -> 0. Ladder entries
/// must differ by powers of two.
BiasProbe bias_probe(const Surface& s, const TrapSpec& trap, const MCConfig& cfg,
                     const std::vector<double>& dt_ladder);

/// Fixed-order pairwise sum (independent of thread count).
double pairwise_sum(const double* v, size_t n);

}  // namespace narrowcap
