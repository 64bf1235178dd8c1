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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace narrowcap {

/// A measured quantity along an eps (or dt) ladder with its log-log fit.
struct ScalingReport {
  std::string quantity;
  std::vector<double> eps;
  std::vector<double> values;
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double target_exponent = std::numeric_limits<double>::quiet_NaN();
  double band_lo = std::numeric_limits<double>::quiet_NaN();
  double band_hi = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  // Quantity-specific extras (ratios, predictions, grid-error estimates,
  // intercepts); named so that reports serialise self-describingly.
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::vector<std::pair<std::string, double>> scalars;
  bool pass = false;
  bool inconclusive = false;
  std::string note;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
    syy += y[k] * y[k];
  }
  LineFit f;
  const double vx = n * sxx - sx * sx;
  const double vy = n * syy - sy * sy;
  f.slope = (n * sxy - sx * sy) / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r_squared = vy > 0.0 ? (n * sxy - sx * sy) * (n * sxy - sx * sy) / (vx * vy)
                         : 1.0;
  return f;
}

inline LineFit fit_loglog(const std::vector<double>& x,
                          const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t k = 0; k < x.size(); ++k) {
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(std::abs(y[k])));
  }
  return fit_line(lx, ly);
}

}  // namespace narrowcap
