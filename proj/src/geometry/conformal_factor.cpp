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

#include "narrowcap/conformal_factor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "narrowcap/errors.hpp"

namespace narrowcap {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_centered(double x, double L) { return x - L * std::round(x / L); }
}  // namespace

ConformalFactor ConformalFactor::zero() { return ConformalFactor{}; }

ConformalFactor ConformalFactor::cosine_bump(double amplitude, int m, int n) {
  if (!std::isfinite(amplitude)) throw ConfigError("phi amplitude not finite");
  ConformalFactor f;
  f.kind_ = Kind::CosineBump;
  f.amplitude_ = amplitude;
  f.mode_ = {m, n};
  return f;
}

ConformalFactor ConformalFactor::gaussian_bump(Eigen::Vector2d center,
                                               double width, double amplitude) {
  if (!(width > 0.0) || !std::isfinite(amplitude) || !center.allFinite())
    throw ConfigError("gaussian_bump needs finite center/amplitude, width > 0");
  ConformalFactor f;
  f.kind_ = Kind::GaussianBump;
  f.amplitude_ = amplitude;
  f.center_ = center;
  f.width_ = width;
  return f;
}

ConformalFactor ConformalFactor::grid(int n, std::vector<double> values) {
  if (n < 6 || static_cast<int>(values.size()) != n * n)
    throw ConfigError("phi grid must hold n*n values with n >= 6");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("phi grid value not finite");
  ConformalFactor f;
  f.kind_ = Kind::Grid;
  f.grid_n_ = n;
  f.grid_ = std::make_shared<const PeriodicGrid>(n, 1.0, 1.0, std::move(values));
  return f;
}

const std::vector<double>& ConformalFactor::grid_values() const {
  static const std::vector<double> empty;
  return grid_ ? grid_->values() : empty;
}

double ConformalFactor::value(double u, double v, double L1, double L2) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::CosineBump:
      return amplitude_ *
             std::cos(kTwoPi * (mode_[0] * u / L1 + mode_[1] * v / L2));
    case Kind::GaussianBump: {
      const double du = wrap_centered(u - center_[0], L1);
      const double dv = wrap_centered(v - center_[1], L2);
      double acc = 0.0;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          const double x = du + a * L1;
          const double y = dv + b * L2;
          acc += std::exp(-(x * x + y * y) / (2.0 * width_ * width_));
        }
      return amplitude_ * acc;
    }
    case Kind::Grid:
      return grid_->value(u / L1, v / L2);
  }
  return 0.0;
}

Eigen::Vector2d ConformalFactor::gradient(double u, double v, double L1,
                                          double L2) const {
  switch (kind_) {
    case Kind::Zero:
      return Eigen::Vector2d::Zero();
    case Kind::CosineBump: {
      const double s =
          -amplitude_ *
          std::sin(kTwoPi * (mode_[0] * u / L1 + mode_[1] * v / L2));
      return {s * kTwoPi * mode_[0] / L1, s * kTwoPi * mode_[1] / L2};
    }
    case Kind::GaussianBump: {
      const double du = wrap_centered(u - center_[0], L1);
      const double dv = wrap_centered(v - center_[1], L2);
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      const double w2 = width_ * width_;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          const double x = du + a * L1;
          const double y = dv + b * L2;
          const double e = std::exp(-(x * x + y * y) / (2.0 * w2));
          g += Eigen::Vector2d(-x / w2, -y / w2) * e;
        }
      return amplitude_ * g;
    }
    case Kind::Grid:
    {
      const Eigen::Vector2d g = grid_->gradient(u / L1, v / L2);
      return {g[0] / L1, g[1] / L2};
    }
  }
  return Eigen::Vector2d::Zero();
}

std::vector<double> ConformalFactor::sample(int n, double L1,
                                            double L2) const {
  if (kind_ == Kind::Grid && n == grid_n_) return grid_->values();
  std::vector<double> out(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<size_t>(i) * n + j] =
          value(i * L1 / n, j * L2 / n, L1, L2);
  return out;
}

std::string ConformalFactor::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Zero: os << "zero"; break;
    case Kind::CosineBump: os << "cosine_bump"; break;
    case Kind::GaussianBump: os << "gaussian_bump"; break;
    case Kind::Grid: os << "grid"; break;
  }
  return os.str();
}

}  // namespace narrowcap
