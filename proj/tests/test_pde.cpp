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
#include "narrowcap/pde.hpp"

using namespace narrowcap;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST(Pde, FlatTorusFluxAndAverage) {
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const TrapSpec trap{s.point(0.5, 0.5), 0.1};
  const PDESolution sol = solve_trapped_bvp(s, trap, 256);
  const double area = 1.0 - kPi * 0.01;
  EXPECT_NEAR(flux_on_trap(sol), -area, 1e-3 * area);
  EXPECT_NEAR(sol.discrete_area(), area, 1e-3);
  EXPECT_LT(sol.residual, 1e-9);
  // Discrepancy with the asymptotic average is O(eps |log eps|).
  const double pred = mfpt_average(g, trap).total;
  EXPECT_LT(std::abs(sol.average() - pred), 0.1 * std::abs(std::log(0.1)));
  // Solution vanishes on the trap and is positive outside.
  EXPECT_NEAR(sol.interpolate(s.point(0.5 + 0.1, 0.5)), 0.0, 2e-3);
  EXPECT_GT(sol.interpolate(s.point(0.0, 0.0)), 0.0);
}

TEST(Pde, RadialDiskOracle) {
  // Centred trap in the unit disk: -Lap u = 1, u(eps) = 0, u'(1) = 0 gives
  // u = (eps^2 - r^2)/4 + (1/2) log(r/eps).
  const Surface s(SurfaceSpec::unit_disk());
  const double eps = 0.1;
  const PDESolution sol = solve_trapped_bvp(s, {s.point(0, 0), eps}, 256);
  for (double r : {0.2, 0.5, 0.9}) {
    const double exact = (eps * eps - r * r) / 4 + 0.5 * std::log(r / eps);
    EXPECT_NEAR(sol.interpolate(s.point(r * 0.6, r * 0.8)), exact, 2e-3 * exact);
  }
  const double area = kPi * (1 - eps * eps);
  EXPECT_NEAR(flux_on_trap(sol), -area, 0.01 * area);
  for (const auto& [a, d] : normal_derivative_profile(sol, 16))
    EXPECT_NEAR(d, -area / (2 * kPi * eps), 0.01 * area / (2 * kPi * eps)) << a;
}

TEST(Pde, ConformalFluxLaw) {
  const Surface s(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0)));
  const TrapSpec trap{s.point(0.3, 0.5), 0.05};
  const PDESolution sol = solve_trapped_bvp(s, trap, 512);
  const double area = trap_area(s, trap).complement;
  EXPECT_NEAR(flux_on_trap(sol), -area, 0.01 * area);
}

TEST(Pde, PreconditionersAgree) {
  // The FFT preconditioner must not change the discrete solution.
  for (const SurfaceSpec& spec : {SurfaceSpec::unit_disk(),
                                  SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0))}) {
    const Surface s(spec);
    const TrapSpec trap{s.point(0.2, 0.1), 0.1};
    SolverOptions jacobi;
    jacobi.spectral_preconditioner = false;
    const PDESolution a = solve_trapped_bvp(s, trap, 256);
    const PDESolution b = solve_trapped_bvp(s, trap, 256, jacobi);
    double worst = 0.0, scale = 0.0;
    for (size_t k = 0; k < a.u.size(); ++k) {
      worst = std::max(worst, std::abs(a.u[k] - b.u[k]));
      scale = std::max(scale, std::abs(b.u[k]));
    }
    EXPECT_LT(worst, 1e-7 * scale) << family_name(s.family());
    EXPECT_LT(a.iterations, b.iterations);
  }
}

TEST(Pde, RejectsSphereAndCoarseGrids) {
  const Surface sp(SurfaceSpec::round_sphere());
  EXPECT_THROW(solve_trapped_bvp(sp, {sp.point(0.5, 0.5), 0.1}, 128), ConfigError);
  const Surface f(SurfaceSpec::flat_torus());
  EXPECT_THROW(solve_trapped_bvp(f, {f.point(0.5, 0.5), 0.01}, 128), DomainError);
}

TEST(Pde, GridPolicy) {
  const NPolicy p;
  EXPECT_EQ(p.grid_for(0.1), 256);
  EXPECT_EQ(p.grid_for(0.05), 512);
  EXPECT_EQ(p.grid_for(0.025), 1024);
  EXPECT_EQ(p.grid_for(0.5), 128);
}
