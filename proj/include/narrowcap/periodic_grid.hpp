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

namespace narrowcap {

/// Samples of a smooth periodic field on a uniform n x n grid over
/// [0,L1) x [0,L2), row-major in u. Off-grid values use tensor-product
/// six-point Lagrange interpolation (sixth order for smooth data).
class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  PeriodicGrid(int n, double L1, double L2, std::vector<double> values);

  int n() const { return n_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  const std::vector<double>& values() const { return values_; }
  double at(int i, int j) const;

  double value(double u, double v) const;
  Eigen::Vector2d gradient(double u, double v) const;

 private:
  int n_ = 0;
  double L1_ = 1.0;
  double L2_ = 1.0;
  std::vector<double> values_;
};

}  // namespace narrowcap
