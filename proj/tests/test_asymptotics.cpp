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

#include <cmath>

#include <gtest/gtest.h>

#include "narrowcap/asymptotics.hpp"
#include "narrowcap/errors.hpp"

using namespace narrowcap;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST(Asymptotics, SphereAverageClosedForm) {
  const Surface s(SurfaceSpec::round_sphere());
  GreenFunction g(s);
  const SurfacePoint x0 = s.point(Eigen::Vector3d(0, 0, 1));
  for (double eps : {0.1, 0.05, 0.01}) {
    const MFPTResult m = mfpt_average(g, {x0, eps});
    EXPECT_NEAR(m.total, 2 * std::log(2 / eps) - 1, 1e-6);
    EXPECT_NEAR(m.leading, -2 * std::log(eps), 1e-12);
    EXPECT_EQ(m.point_term, 0.0);
    EXPECT_EQ(m.error_order, "O(eps log eps)");
  }
}

TEST(Asymptotics, SpherePointwiseAntipodal) {
  // Point term -|M| E(x, x0) = +1 at the antipode.
  const Surface s(SurfaceSpec::round_sphere());
  GreenFunction g(s);
  const SurfacePoint x0 = s.point(Eigen::Vector3d(0, 0, 1));
  const SurfacePoint x = s.point(Eigen::Vector3d(0, 0, -1));
  EXPECT_NEAR(mfpt_pointwise(g, {x0, 0.1}, x).total, 2 * std::log(20.0), 1e-6);
  EXPECT_NEAR(mfpt_pointwise(g, {x0, 0.01}, x).total, 10.5966, 5e-5);
  EXPECT_NEAR(mfpt_pointwise(g, {x0, 0.01}, x).point_term, 1.0, 1e-12);
}

TEST(Asymptotics, SphereRadiusScaling) {
  // Radius a: T_a(eps) = a^2 T_1(eps / a).
  const Surface s1(SurfaceSpec::round_sphere(1.0)), s2(SurfaceSpec::round_sphere(2.0));
  GreenFunction g1(s1), g2(s2);
  const double t1 = mfpt_average(g1, {s1.point(0.5, 0.5), 0.05}).total;
  const double t2 = mfpt_average(g2, {s2.point(0.5, 0.5), 0.1}).total;
  EXPECT_NEAR(t2, 4 * t1, 1e-5);
}

TEST(Asymptotics, PointwiseExclusionZone) {
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const TrapSpec trap{s.point(0.5, 0.5), 0.05};
  EXPECT_THROW(mfpt_pointwise(g, trap, s.point(0.55, 0.5)), DomainError);
  EXPECT_NO_THROW(mfpt_pointwise(g, trap, s.point(0.7, 0.5)));
}

TEST(Asymptotics, FlatTorusPointwiseAveragesToAverage) {
  // The point term has zero mean, so averaging the pointwise formula over a
  // uniform grid reproduces the average up to the excluded region.
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const TrapSpec trap{s.point(0.5, 0.5), 0.01};
  const double avg = mfpt_average(g, trap).total;
  double acc = 0.0;
  int n = 0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const SurfacePoint x = s.point((i + 0.25) / 64.0, (j + 0.25) / 64.0);
      if (s.distance(x, trap.center) <= 2 * trap.eps) continue;
      acc += mfpt_pointwise(g, trap, x).total;
      ++n;
    }
  EXPECT_NEAR(acc / n, avg, 2e-3);
}

TEST(Asymptotics, ChartDensityAndBoundary) {
  const Surface s(SurfaceSpec::round_sphere());
  const SurfacePoint x0 = s.point(0.3, 0.3);
  const double r = 0.4;
  EXPECT_NEAR(chart_density(s, x0, Eigen::Vector2d(0, r)), std::sin(r) / r, 1e-8);
  const Surface d(SurfaceSpec::unit_disk());
  EXPECT_NEAR(trap_boundary_length(d, {d.point(0.1, 0.1), 0.05}), 2 * kPi * 0.05, 1e-12);
}
