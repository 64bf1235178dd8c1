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

#include <vector>

#include <Eigen/Core>

#include "narrowcap/conformal_factor.hpp"

namespace narrowcap {

/// Geodesics of e^{2 phi}(du^2 + dv^2) in unwrapped flat coordinates.
/// The geodesic equation is x'' = -2 (grad phi . x') x' + |x'|^2 grad phi.
class ConformalGeodesics {
 public:
  struct State {
    Eigen::Vector2d x;
    Eigen::Vector2d v;  // coordinate velocity
  };

  ConformalGeodesics(double L1, double L2, ConformalFactor phi, int n,
                     std::vector<double> samples);

  double phi(const Eigen::Vector2d& x) const;
  Eigen::Vector2d grad_phi(const Eigen::Vector2d& x) const;

  /// Flow for unit time with step-doubling control. Throws ConvergenceError
  /// when max_steps is exceeded.
  State integrate_adaptive(State s, double rel_tol,
                           long max_steps = 2'000'000) const;
  /// Flow for unit time with `steps` equal RK4 steps (smooth in s).
  State integrate_fixed(State s, int steps) const;

  /// Dijkstra on the n x n sample graph (16-neighbour stencil). Returns the
  /// estimate; `unwrapped_y` receives the lattice translate of y reached and
  /// `path` (if non-null) the unwrapped node path from x to y.
  double graph_distance(const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                        Eigen::Vector2d* unwrapped_y = nullptr,
                        std::vector<Eigen::Vector2d>* path = nullptr) const;

  /// Minimising geodesic length by Newton shooting. Seeds come from the
  /// Dijkstra path and from the straight chords to the nine nearest lattice
  /// translates. Throws DistanceError (carrying the Dijkstra value) when no
  /// seed converges.
  double distance(const Eigen::Vector2d& x, const Eigen::Vector2d& y) const;

 private:
  Eigen::Vector2d accel(const Eigen::Vector2d& x,
                        const Eigen::Vector2d& v) const;
  State rk4_step(const State& s, double h) const;
  // Shoot from x with unit-speed direction angle and length; returns the
  // unwrapped end point and (optionally) the unit-speed end velocity.
  Eigen::Vector2d shoot(const Eigen::Vector2d& x, double angle, double length,
                        Eigen::Vector2d* end_velocity) const;
  bool newton(const Eigen::Vector2d& x, const Eigen::Vector2d& target,
              double angle, double length, double* out_length) const;
  double chord_length(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;

  double L1_;
  double L2_;
  ConformalFactor phi_;
  int n_;
  std::vector<double> samples_;
};

}  // namespace narrowcap
