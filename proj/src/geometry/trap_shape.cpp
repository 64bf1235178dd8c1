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

#include "narrowcap/trap_shape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "narrowcap/errors.hpp"

namespace narrowcap {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void validate_trap(const Surface& s, const TrapSpec& trap) {
  if (trap.center.family != s.family())
    throw DomainError("trap centre belongs to a different surface family");
  if (!(trap.eps > 0.0) || !std::isfinite(trap.eps))
    throw DomainError("trap radius must be positive");
  const double rho = s.injectivity_bound(trap.center);
  if (!(trap.eps < rho))
    throw DomainError("trap radius must be below the injectivity bound");
  if (s.family() == Family::FlatUnitDisk &&
      !(1.0 - trap.center.uv().norm() > 3.0 * trap.eps))
    throw DomainError("disk trap must keep a 3 eps margin from the boundary");
}

TrapShape::TrapShape(const Surface& s, const TrapSpec& trap, int samples)
    : surface_(&s), trap_(trap) {
  validate_trap(s, trap);
  r_max_ = trap.eps;
  if (s.family() != Family::ConformalTorus) return;
  tabulated_ = true;
  std::vector<std::pair<double, double>> pts(samples);
  for (int k = 0; k < samples; ++k) {
    const double a = kTwoPi * k / samples;
    const Eigen::Vector2d t = trap.eps * Eigen::Vector2d(std::cos(a), std::sin(a));
    const Eigen::Vector2d off =
        s.flat_offset(trap.center, s.chart_point(trap.center, t));
    pts[k] = {std::atan2(off[1], off[0]), off.norm()};
  }
  std::sort(pts.begin(), pts.end());
  theta_.reserve(samples + 2);
  radius_.reserve(samples + 2);
  theta_.push_back(pts.back().first - kTwoPi);
  radius_.push_back(pts.back().second);
  for (const auto& [t, r] : pts) {
    theta_.push_back(t);
    radius_.push_back(r);
    r_max_ = std::max(r_max_, r);
  }
  theta_.push_back(pts.front().first + kTwoPi);
  radius_.push_back(pts.front().second);
}

double TrapShape::boundary_radius(double theta) const {
  if (!tabulated_) return trap_.eps;
  theta = std::remainder(theta, kTwoPi);
  const auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
  const size_t hi = std::clamp<size_t>(it - theta_.begin(), 1, theta_.size() - 1);
  const size_t lo = hi - 1;
  const double w = (theta - theta_[lo]) / (theta_[hi] - theta_[lo]);
  return (1.0 - w) * radius_[lo] + w * radius_[hi];
}

bool TrapShape::inside_offset(const Eigen::Vector2d& off) const {
  const double r = off.norm();
  if (r > r_max_) return false;
  return r < boundary_radius(std::atan2(off[1], off[0]));
}

bool TrapShape::inside(const SurfacePoint& p) const {
  if (surface_->family() == Family::RoundSphere)
    return surface_->distance(trap_.center, p) < trap_.eps;
  return inside_offset(surface_->flat_offset(trap_.center, p));
}

double TrapShape::crossing(const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) const {
  if (!tabulated_) {
    // |a + s (b - a)| = eps, smaller root from the outside.
    const Eigen::Vector2d d = b - a;
    const double A = d.squaredNorm();
    const double B = a.dot(d);
    const double C = a.squaredNorm() - trap_.eps * trap_.eps;
    const double disc = std::max(B * B - A * C, 0.0);
    return std::clamp((-B - std::sqrt(disc)) / A, 0.0, 1.0);
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (inside_offset(a + mid * (b - a)))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double TrapShape::center_distance(const SurfacePoint& p) const {
  if (!tabulated_) return surface_->distance(trap_.center, p);
  const Eigen::Vector2d off = surface_->flat_offset(trap_.center, p);
  const double r = off.norm();
  if (r == 0.0) return 0.0;
  return trap_.eps * r / boundary_radius(std::atan2(off[1], off[0]));
}

}  // namespace narrowcap
