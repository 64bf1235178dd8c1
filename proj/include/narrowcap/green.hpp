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

#include <memory>
#include <utility>
#include <vector>

#include "narrowcap/geometry.hpp"

namespace narrowcap {

/// E(x,y) split as total = log_part + regular_part, log_part =
/// -(1/2pi) log d_g(x,y).
struct GreenValue {
  double total = 0.0;
  double log_part = 0.0;
  double regular_part = 0.0;
  double distance = 0.0;
};

/// Diagonal regular part from a dyadic separation ladder.
struct RegularPartEstimate {
  double value = 0.0;
  double extrapolation_error = 0.0;
  std::vector<std::pair<double, double>> ladder;  // (d, raw regular part)
  std::vector<double> level1;
  std::vector<double> level2;
  /// Log-log slope of |R(d_j) - R(d_{j+1})| against d_j.
  double difference_exponent = 0.0;
};

class FlatTorusEwald;

/// Mean-zero Green's function of a surface (Neumann on the disk). Tables
/// are built at construction; evaluation is const and thread-safe.
class GreenFunction {
 public:
  explicit GreenFunction(const Surface& s);
  ~GreenFunction();
  GreenFunction(const GreenFunction&) = delete;
  GreenFunction& operator=(const GreenFunction&) = delete;

  const Surface& surface() const { return surface_; }

  /// Boundaryless families; dispatches to neumann_green on the disk.
  GreenValue green(const SurfacePoint& x, const SurfacePoint& y) const;
  GreenValue neumann_green(const SurfacePoint& x, const SurfacePoint& y) const;
  /// E(x,y) only, skipping the geodesic distance (cheap on every family).
  double value(const SurfacePoint& x, const SurfacePoint& y) const;

  /// Doubling-surface Green's function minus the Neumann one (disk).
  double correction_term(const SurfacePoint& x, const SurfacePoint& y) const;

  /// Ladder along the geodesic leaving x0 at `angle` from E1.
  RegularPartEstimate regular_part(const SurfacePoint& x0,
                                   double angle = 0.0) const;

  /// Quadrature of the integral of E(x, .) against dvol_g.
  double green_mean_residual(const SurfacePoint& x) const;

  /// Mean over staggered boundary pairs of d_nu_x E(x, y) on the eps-circle,
  /// nu pointing towards x0.
  double trap_kernel_constant(const SurfacePoint& x0, double eps,
                              int n_points = 64) const;

  /// Neumann mean-zero constant of the disk (cached).
  double disk_constant() const { return k0_; }
  /// Conformal torus: w(x) and the shift k.
  double conformal_w(const SurfacePoint& x) const;
  double conformal_shift() const { return kconf_; }

  // Regular remainder E + (1/2pi) log d at a known separation d; used by the
  // ladder so that the conformal torus needs no shooting.
  double regular_at(const SurfacePoint& x, const SurfacePoint& y,
                    double d) const;

 private:
  double flat_total(const Eigen::Vector2d& off) const;
  double flat_regular(const Eigen::Vector2d& off) const;

  Surface surface_;
  std::unique_ptr<FlatTorusEwald> ewald_;
  std::unique_ptr<FlatTorusEwald> doubled_;  // disk: side-4 flat torus
  std::vector<double> w_;
  std::unique_ptr<PeriodicGrid> w_grid_;
  double kconf_ = 0.0;
  double k0_ = 0.0;
};

}  // namespace narrowcap
