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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "narrowcap/asymptotics.hpp"
#include "narrowcap/errors.hpp"
#include "narrowcap/optimizer.hpp"

using namespace narrowcap;

namespace {

constexpr double kPi = 3.14159265358979323846;

Surface well() {
  return Surface(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::gaussian_bump({0.3, 0.4}, 0.15, -0.5)));
}

}  // namespace

TEST(Optimizer, FlatTorusIsDegenerate) {
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const RobinLandscape L = robin_landscape(g, 16);
  EXPECT_LE(L.spread(), 3 * L.max_error + 1e-12);
  const OptimizationResult r = optimize_trap_center(g);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.best_center, L.centers[L.argmin]);
}

TEST(Optimizer, SphereLandscapeConstant) {
  const Surface s(SurfaceSpec::round_sphere());
  GreenFunction g(s);
  const RobinLandscape L = robin_landscape(g, 4);
  for (double v : L.values) EXPECT_NEAR(v, (std::log(2.0) - 0.5) / (2 * kPi), 1e-7);
  EXPECT_TRUE(optimize_trap_center(g, {4, 50}).degenerate);
}

TEST(Optimizer, WellLandscapeAndArgmin) {
  const Surface s = well();
  GreenFunction g(s);
  const RobinLandscape L = robin_landscape(g, 64);
  EXPECT_GT(L.spread(), 10 * L.max_error);
  const OptimizationResult r = optimize_trap_center(g);
  EXPECT_FALSE(r.degenerate);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(s.flat_offset(r.best_center, L.centers[L.argmin]).norm(), 0.05);
  // Refinement never ends above the coarse-scan minimum.
  EXPECT_LE(r.best_value, r.landscape->min_value);
  for (const auto& t : r.trace) EXPECT_LE(r.best_value, t.value);
}

TEST(Optimizer, ShiftLeavesIteratesUnchanged) {
  const Surface s = well();
  GreenFunction g(s);
  OptimizerOptions o;
  const OptimizationResult a = optimize_trap_center(g, o);
  o.shift = 0.125;
  const OptimizationResult b = optimize_trap_center(g, o);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (size_t k = 0; k < a.trace.size(); ++k) EXPECT_EQ(a.trace[k].center, b.trace[k].center);
  EXPECT_EQ(a.best_center, b.best_center);
}

TEST(Optimizer, MirroredSeedsGiveMirroredCentres) {
  // phi symmetric under u -> 1 - u.
  const Surface s(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::gaussian_bump({0.5, 0.4}, 0.12, 0.5)));
  GreenFunction g(s);
  OptimizerOptions a, b;
  a.seed = s.point(0.3, 0.7);
  b.seed = s.point(0.7, 0.7);
  const OptimizationResult ra = optimize_trap_center(g, a);
  const OptimizationResult rb = optimize_trap_center(g, b);
  const SurfacePoint mirrored = s.point(1.0 - rb.best_center.coords[0], rb.best_center.coords[1]);
  EXPECT_LT(s.flat_offset(ra.best_center, mirrored).norm(), 1e-3);
}

TEST(Optimizer, RankingByRMatchesAverageMfpt) {
  const Surface s = well();
  GreenFunction g(s);
  std::vector<std::pair<double, int>> by_r, by_t;
  for (int k = 0; k < 8; ++k) {
    const SurfacePoint c = s.point(0.05 + 0.12 * k, 0.2 + 0.09 * k);
    by_r.push_back({g.regular_part(c).value, k});
    by_t.push_back({mfpt_average(g, {c, 0.01}).total, k});
  }
  std::sort(by_r.begin(), by_r.end());
  std::sort(by_t.begin(), by_t.end());
  for (int k = 0; k < 8; ++k) EXPECT_EQ(by_r[k].second, by_t[k].second);
}

TEST(Optimizer, DiskRespectsMargin) {
  const Surface s(SurfaceSpec::unit_disk());
  GreenFunction g(s);
  const RobinLandscape L = robin_landscape(g, 8);
  int active = 0;
  for (size_t k = 0; k < L.values.size(); ++k) {
    if (std::isnan(L.values[k])) continue;
    ++active;
    EXPECT_LE(std::hypot(L.a[k], L.b[k]), 0.85);
  }
  EXPECT_GT(active, 0);
  const OptimizationResult r = optimize_trap_center(g, {8, 100});
  EXPECT_LE(r.best_center.uv().norm(), 0.85);
  // R is radial and increasing in |x| for the disk, so the centre wins.
  EXPECT_LT(r.best_center.uv().norm(), 0.01);
}

TEST(Optimizer, RejectsBadOptions) {
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  EXPECT_THROW(optimize_trap_center(g, {1, 10}), ConfigError);
}
