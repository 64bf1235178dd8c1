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

#include "narrowcap/geometry.hpp"

namespace narrowcap {

/// Geodesic-disk trap B_eps(x0).
struct TrapSpec {
  SurfacePoint center;
  double eps = 0.0;
};

/// Throws DomainError unless 0 < eps < rho(x0) and, on the disk, the trap
/// keeps a 3 eps margin from the unit circle.
void validate_trap(const Surface& s, const TrapSpec& trap);

/// Point-membership and boundary-crossing queries for a trap in the flat
/// coordinates of a 2-D family. The conformal-torus boundary is the image of
/// the eps-circle under the exponential map, tabulated as a radial function
/// of the flat polar angle about x0.
class TrapShape {
 public:
  TrapShape(const Surface& s, const TrapSpec& trap, int samples = 1024);

  const TrapSpec& trap() const { return trap_; }

  /// Strictly inside the closed geodesic ball of radius eps.
  bool inside(const SurfacePoint& p) const;
  /// Same, for a flat offset from the centre (2-D families only).
  bool inside_offset(const Eigen::Vector2d& off) const;

  /// Flat boundary radius in direction theta (2-D families only).
  double boundary_radius(double theta) const;
  double max_flat_radius() const { return r_max_; }

  /// Fraction s in [0,1] at which the flat segment a -> b (offsets from x0)
  /// meets the boundary; a must be outside and b inside.
  double crossing(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;

  /// Geodesic distance to x0: exact on the flat families and the sphere,
  /// eps * |off| / r_b(theta) on the conformal torus (exact on the boundary).
  double center_distance(const SurfacePoint& p) const;

 private:
  const Surface* surface_;
  TrapSpec trap_;
  bool tabulated_ = false;
  double r_max_ = 0.0;
  std::vector<double> theta_;  // sorted, with one wrapped entry at each end
  std::vector<double> radius_;
};

}  // namespace narrowcap
