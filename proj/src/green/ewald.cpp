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

#include "ewald.hpp"

#include <cmath>
#include <numbers>

#include "narrowcap/errors.hpp"
#include "narrowcap/quadrature.hpp"

namespace narrowcap {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kGamma = std::numbers::egamma;
}  // namespace

double ein(double z) {
  if (z > 1.0) return expint_e1(z) + kGamma + std::log(z);
  double term = z;
  double sum = z;
  for (int k = 2; k < 60; ++k) {
    term *= -z / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double expint_e1(double z) {
  if (!(z > 0.0)) throw DomainError("E1 needs a positive argument");
  if (z <= 1.0) return -kGamma - std::log(z) + ein(z);
  // Modified Lentz continued fraction.
  const double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

FlatTorusEwald::FlatTorusEwald(double L1, double L2)
    : L1_(L1), L2_(L2), area_(L1 * L2), alpha_(L1 * L2 / (4.0 * kPi)) {
  // Real-space terms vanish below 1e-17 once |r+n|^2/(4 alpha) > 36.
  const double R = 12.0 * std::sqrt(alpha_);
  nr1_ = static_cast<int>(std::ceil(R / L1 + 0.5));
  nr2_ = static_cast<int>(std::ceil(R / L2 + 0.5));
  const double K = 6.0 / (2.0 * kPi * std::sqrt(alpha_));
  const int m1 = static_cast<int>(std::ceil(K * L1));
  const int m2 = static_cast<int>(std::ceil(K * L2));
  // Half space (cos is even): m > 0, or m == 0 and n > 0; weight 2.
  for (int m = 0; m <= m1; ++m)
    for (int n = -m2; n <= m2; ++n) {
      if (m == 0 && n <= 0) continue;
      const double k1 = m / L1;
      const double k2 = n / L2;
      const double k2n = k1 * k1 + k2 * k2;
      const double coef = 2.0 * std::exp(-4.0 * kPi * kPi * alpha_ * k2n) /
                          (4.0 * kPi * kPi * k2n * area_);
      if (coef > 1e-20) modes_.push_back({k1, k2, coef});
    }
}

double FlatTorusEwald::real_sum(const Eigen::Vector2d& r,
                                bool skip_origin) const {
  double acc = 0.0;
  for (int i = -nr1_; i <= nr1_; ++i)
    for (int j = -nr2_; j <= nr2_; ++j) {
      if (skip_origin && i == 0 && j == 0) continue;
      const double dx = r[0] + i * L1_;
      const double dy = r[1] + j * L2_;
      const double z = (dx * dx + dy * dy) / (4.0 * alpha_);
      if (z < 40.0) acc += expint_e1(z);
    }
  return acc / (4.0 * kPi);
}

double FlatTorusEwald::reciprocal_sum(const Eigen::Vector2d& r) const {
  double acc = 0.0;
  for (const auto& m : modes_)
    acc += m.coef * std::cos(2.0 * kPi * (m.k1 * r[0] + m.k2 * r[1]));
  return acc;
}

double FlatTorusEwald::total(const Eigen::Vector2d& r) const {
  if (r.squaredNorm() == 0.0)
    throw SingularityError("E(x,x) is singular; use regular_part");
  return real_sum(r, false) - alpha_ / area_ + reciprocal_sum(r);
}

double FlatTorusEwald::regular(const Eigen::Vector2d& r) const {
  const double z0 = r.squaredNorm() / (4.0 * alpha_);
  const double origin =
      (std::log(4.0 * alpha_) - kGamma + ein(z0)) / (4.0 * kPi);
  return origin + real_sum(r, true) - alpha_ / area_ + reciprocal_sum(r);
}

}  // namespace narrowcap
