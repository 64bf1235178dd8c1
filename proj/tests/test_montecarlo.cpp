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
#include <numeric>

#include <gtest/gtest.h>

#include "narrowcap/asymptotics.hpp"
#include "narrowcap/errors.hpp"
#include "narrowcap/montecarlo.hpp"

using namespace narrowcap;

TEST(MonteCarlo, PairwiseSum) {
  std::vector<double> v(1001);
  std::iota(v.begin(), v.end(), 0.0);
  EXPECT_EQ(pairwise_sum(v.data(), v.size()), 500500.0);
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
}

TEST(MonteCarlo, ConfigValidation) {
  MCConfig c;
  c.n_paths = 50;
  EXPECT_THROW(c.validate(), ConfigError);
  c = MCConfig{};
  c.dt_floor = 2 * c.base_dt;
  EXPECT_THROW(c.validate(), ConfigError);
  c = MCConfig{};
  c.max_time = std::numeric_limits<double>::infinity();
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const Surface s(SurfaceSpec::flat_torus());
  const TrapSpec trap{s.point(0.5, 0.5), 0.1};
  MCConfig c;
  c.n_paths = 300;
  c.base_dt = 1e-3;
  c.dt_floor = 1e-5;
  c.seed = 99;
  c.keep_samples = true;
  c.threads = 1;
  const MCEstimate a = simulate_first_passage(s, trap, c);
  c.threads = 3;
  const MCEstimate b = simulate_first_passage(s, trap, c);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.samples, b.samples);
  c.seed = 100;
  EXPECT_NE(simulate_first_passage(s, trap, c).mean, a.mean);
  // stderr is the sample sd over sqrt(n).
  double m = 0, v = 0;
  for (double t : a.samples) m += t / a.samples.size();
  for (double t : a.samples) v += (t - m) * (t - m) / (a.samples.size() - 1);
  EXPECT_NEAR(a.std_error, std::sqrt(v / a.samples.size()), 1e-12);
}

TEST(MonteCarlo, SphereAntipodalStart) {
  // Expected 2 log(20) = 5.99 at eps = 0.1 from the antipode; the O(sqrt dt)
  // absorption bias is positive.
  const Surface s(SurfaceSpec::round_sphere());
  const TrapSpec trap{s.point(Eigen::Vector3d(0, 0, 1)), 0.1};
  MCConfig c;
  c.n_paths = 1500;
  c.base_dt = 2e-3;
  c.dt_floor = 2e-5;
  c.seed = 5;
  c.start = s.point(Eigen::Vector3d(0, 0, -1));
  const MCEstimate e = simulate_first_passage(s, trap, c);
  EXPECT_TRUE(e.valid);
  EXPECT_EQ(e.n_censored, 0);
  EXPECT_LT(e.std_error, 0.06 * e.mean);
  EXPECT_NEAR(e.mean, 2 * std::log(20.0), 3 * e.std_error + 0.15);
  EXPECT_GE(e.dt_min_used, c.dt_floor);
}

TEST(MonteCarlo, FlatTorusUniformStart) {
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const TrapSpec trap{s.point(0.5, 0.5), 0.1};
  MCConfig c;
  c.n_paths = 2000;
  c.base_dt = 1e-3;
  c.dt_floor = 1e-5;
  c.seed = 17;
  const BiasProbe bp = bias_probe(s, trap, c, {1e-3, 5e-4, 2.5e-4});
  // The O(eps log eps) remainder is about 0.01 at this eps (grid solve).
  const double pred = mfpt_average(g, trap).total;
  EXPECT_NEAR(bp.intercept, pred, 3 * bp.intercept_stderr + 0.05);
  EXPECT_GT(bp.slope, 0.0);
  EXPECT_FALSE(bp.report.inconclusive);
  // Halving dt moves the mean towards the intercept.
  EXPECT_LT(std::abs(bp.levels[2].mean - bp.intercept), std::abs(bp.levels[0].mean - bp.intercept));
}

TEST(MonteCarlo, DiskAndConformalRun) {
  const Surface d(SurfaceSpec::unit_disk());
  MCConfig c;
  c.n_paths = 200;
  c.seed = 3;
  const MCEstimate e = simulate_first_passage(d, {d.point(0, 0), 0.1}, c);
  // Centred disk trap: mean over uniform starts of the radial solution.
  const double eps = 0.1;
  const double exact = (-3 + 4 * eps * eps - eps * eps * eps * eps - 4 * std::log(eps)) / (8 * (1 - eps * eps));
  EXPECT_NEAR(e.mean, exact, 4 * e.std_error + 0.05);
  const Surface cf(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0)));
  const MCEstimate f = simulate_first_passage(cf, {cf.point(0.3, 0.5), 0.1}, c);
  EXPECT_TRUE(f.valid);
  EXPECT_GT(f.mean, 0.0);
}

TEST(MonteCarlo, BiasProbeLadderMustBeDyadic) {
  const Surface s(SurfaceSpec::flat_torus());
  MCConfig c;
  c.n_paths = 100;
  EXPECT_THROW(bias_probe(s, {s.point(0.5, 0.5), 0.1}, c, {1e-3, 3e-4}), ConfigError);
  EXPECT_THROW(bias_probe(s, {s.point(0.5, 0.5), 0.1}, c, {1e-3}), ConfigError);
}
