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

#include "narrowcap/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "narrowcap/errors.hpp"
#include "narrowcap/quadrature.hpp"

namespace narrowcap {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double chart_density(const Surface& s, const SurfacePoint& x0,
                     const Eigen::Vector2d& t) {
  switch (s.family()) {
    case Family::FlatTorus:
    case Family::FlatUnitDisk:
      return 1.0;
    case Family::RoundSphere: {
      const double r = t.norm();
      const double a = s.spec().sphere_radius;
      return r == 0.0 ? 1.0 : a * std::sin(r / a) / r;
    }
    case Family::ConformalTorus:
      return std::sqrt(s.normal_chart_metric(x0, t).determinant());
  }
  return 1.0;
}

MFPTResult mfpt_average(const GreenFunction& g, const TrapSpec& trap) {
  const Surface& s = g.surface();
  validate_trap(s, trap);
  MFPTResult r;
  r.regular_part = g.regular_part(trap.center);
  r.leading = -s.area() / kTwoPi * std::log(trap.eps);
  r.constant = s.area() * r.regular_part.value;
  r.point_term = 0.0;
  r.total = r.leading + r.constant + r.point_term;
  return r;
}

MFPTResult mfpt_pointwise(const GreenFunction& g, const TrapSpec& trap,
                          const SurfacePoint& x, double exclusion) {
  const Surface& s = g.surface();
  validate_trap(s, trap);
  if (!(s.distance(x, trap.center) > exclusion * trap.eps))
    throw DomainError("start point lies inside the trap exclusion zone");
  MFPTResult r = mfpt_average(g, trap);
  r.point_term = -s.area() * g.value(x, trap.center);
  r.total = r.leading + r.constant + r.point_term;
  return r;
}

double trap_boundary_length(const Surface& s, const TrapSpec& trap, int n) {
  validate_trap(s, trap);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = kTwoPi * k / n;
    const Eigen::Vector2d e(std::cos(a), std::sin(a));
    const Eigen::Vector2d tan(-std::sin(a), std::cos(a));
    const Eigen::Matrix2d gm = s.normal_chart_metric(trap.center, trap.eps * e);
    acc += std::sqrt(tan.dot(gm * tan));
  }
  return trap.eps * kTwoPi * acc / n;
}

TrapArea trap_area(const Surface& s, const TrapSpec& trap) {
  validate_trap(s, trap);
  const auto [gx, gw] = gauss_legendre(24);
  constexpr int kAz = 48;
  double acc = 0.0;
  for (size_t q = 0; q < gx.size(); ++q) {
    const double r = 0.5 * trap.eps * (gx[q] + 1.0);
    for (int k = 0; k < kAz; ++k) {
      const double a = kTwoPi * (k + 0.5) / kAz;
      const Eigen::Vector2d t = r * Eigen::Vector2d(std::cos(a), std::sin(a));
      acc += 0.5 * trap.eps * gw[q] * r * (kTwoPi / kAz) *
             chart_density(s, trap.center, t);
    }
  }
  return {acc, s.area() - acc};
}

}  // namespace narrowcap
