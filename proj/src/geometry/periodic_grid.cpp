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

#include "narrowcap/periodic_grid.hpp"

#include <array>
#include <cmath>

#include "narrowcap/errors.hpp"

namespace narrowcap {

namespace {

constexpr int kStencil = 6;

// Lagrange weights (and their derivatives) for nodes -2..3 at offset t in [0,1).
void lagrange_weights(double t, std::array<double, kStencil>& w,
                      std::array<double, kStencil>& dw) {
  for (int a = 0; a < kStencil; ++a) {
    const double xa = a - 2;
    double num = 1.0;
    double den = 1.0;
    double dnum = 0.0;
    for (int b = 0; b < kStencil; ++b) {
      if (b == a) continue;
      const double xb = b - 2;
      dnum = dnum * (t - xb) + num;
      num *= (t - xb);
      den *= (xa - xb);
    }
    w[a] = num / den;
    dw[a] = dnum / den;
  }
}

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

}  // namespace

PeriodicGrid::PeriodicGrid(int n, double L1, double L2,
                           std::vector<double> values)
    : n_(n), L1_(L1), L2_(L2), values_(std::move(values)) {
  if (n_ < kStencil || static_cast<int>(values_.size()) != n_ * n_)
    throw ConfigError("periodic grid: expected n*n samples with n >= 6");
}

double PeriodicGrid::at(int i, int j) const {
  return values_[static_cast<size_t>(wrap(i, n_)) * n_ + wrap(j, n_)];
}

double PeriodicGrid::value(double u, double v) const {
  const double su = u / L1_ * n_;
  const double sv = v / L2_ * n_;
  const double fu = std::floor(su);
  const double fv = std::floor(sv);
  std::array<double, kStencil> wu, dwu, wv, dwv;
  lagrange_weights(su - fu, wu, dwu);
  lagrange_weights(sv - fv, wv, dwv);
  const int iu = static_cast<int>(fu);
  const int iv = static_cast<int>(fv);
  double acc = 0.0;
  for (int a = 0; a < kStencil; ++a) {
    double row = 0.0;
    for (int b = 0; b < kStencil; ++b) row += wv[b] * at(iu + a - 2, iv + b - 2);
    acc += wu[a] * row;
  }
  return acc;
}

Eigen::Vector2d PeriodicGrid::gradient(double u, double v) const {
  const double su = u / L1_ * n_;
  const double sv = v / L2_ * n_;
  const double fu = std::floor(su);
  const double fv = std::floor(sv);
  std::array<double, kStencil> wu, dwu, wv, dwv;
  lagrange_weights(su - fu, wu, dwu);
  lagrange_weights(sv - fv, wv, dwv);
  const int iu = static_cast<int>(fu);
  const int iv = static_cast<int>(fv);
  double gu = 0.0;
  double gv = 0.0;
  for (int a = 0; a < kStencil; ++a) {
    for (int b = 0; b < kStencil; ++b) {
      const double f = at(iu + a - 2, iv + b - 2);
      gu += dwu[a] * wv[b] * f;
      gv += wu[a] * dwv[b] * f;
    }
  }
  return {gu * n_ / L1_, gv * n_ / L2_};
}

}  // namespace narrowcap
