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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "narrowcap/periodic_grid.hpp"

namespace narrowcap {

/// Scalar field phi on the torus fundamental domain; the conformal metric
/// is e^{2 phi} (du^2 + dv^2).
class ConformalFactor {
 public:
  enum class Kind { Zero, CosineBump, GaussianBump, Grid };

  static ConformalFactor zero();
  /// amplitude * cos(2 pi (m u / L1 + n v / L2))
  static ConformalFactor cosine_bump(double amplitude, int m, int n);
  /// amplitude * exp(-|r|^2 / (2 width^2)), periodised over the 3x3 nearest
  /// lattice images of `center`.
  static ConformalFactor gaussian_bump(Eigen::Vector2d center, double width,
                                       double amplitude);
  /// Row-major n x n samples (u-major), interpolated off-grid.
  static ConformalFactor grid(int n, std::vector<double> values);

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  Eigen::Vector2i mode() const { return mode_; }
  Eigen::Vector2d center() const { return center_; }
  double width() const { return width_; }
  const std::vector<double>& grid_values() const;

  double value(double u, double v, double L1, double L2) const;
  Eigen::Vector2d gradient(double u, double v, double L1, double L2) const;

  /// Uniform n x n samples at (i L1/n, j L2/n), row-major in i.
  std::vector<double> sample(int n, double L1, double L2) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Zero;
  double amplitude_ = 0.0;
  Eigen::Vector2i mode_{0, 0};
  Eigen::Vector2d center_{0.0, 0.0};
  double width_ = 1.0;
  int grid_n_ = 0;
  // Grid kind only; samples are lattice-agnostic so the interpolant lives on
  // the unit square and coordinates are rescaled per call.
  std::shared_ptr<const PeriodicGrid> grid_;
};

}  // namespace narrowcap
