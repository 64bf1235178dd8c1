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

/// Mean-zero Green's function of the flat torus [0,L1) x [0,L2) by Ewald
/// splitting with parameter alpha = L1 L2 / (4 pi):
///   E(r) = (1/4pi) sum_n E1(|r+n|^2 / 4 alpha) - alpha/|M|
///        + (1/|M|) sum_{k != 0} exp(-4 pi^2 alpha |k|^2) cos(2 pi k.r)
///          / (4 pi^2 |k|^2).
class FlatTorusEwald {
 public:
  FlatTorusEwald(double L1, double L2);

  /// E at the minimal-image offset r (r != 0).
  double total(const Eigen::Vector2d& r) const;
  /// E(r) + (1/2pi) log|r|, smooth through r = 0.
  double regular(const Eigen::Vector2d& r) const;

 private:
  double real_sum(const Eigen::Vector2d& r, bool skip_origin) const;
  double reciprocal_sum(const Eigen::Vector2d& r) const;

  double L1_, L2_, area_, alpha_;
  int nr1_, nr2_;
  struct Mode {
    double k1, k2, coef;
  };
  std::vector<Mode> modes_;
};

}  // namespace narrowcap
