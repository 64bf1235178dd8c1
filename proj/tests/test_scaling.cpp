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
#include <complex>

#include <gtest/gtest.h>

#include "narrowcap/errors.hpp"
#include "narrowcap/pde.hpp"
#include "narrowcap/report.hpp"

using namespace narrowcap;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kR0 = -0.208577793243;  // unit flat torus regular part
}

TEST(Scaling, LogLogFit) {
  const std::vector<double> x = {0.1, 0.05, 0.025};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  const LineFit f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, 1.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Scaling, TrapPotentialClosedForm) {
  // Flat torus: E = -(1/2pi) log|z| + |z|^2/4 + H(z) with H harmonic near 0,
  // H = R0 + c4 Re z^4 + O(|z|^8), c4 = G4/(8 pi), G4 = sum' (m + i n)^-4.
  // Mean values over the trap disk give, at x = eps e^{i a},
  // I = -(1/2) eps^2 log eps + pi eps^2 (R0 + c4 eps^4 cos 4a) + (3 pi/8) eps^4
  // and a radial derivative -eps/2 + (pi/2) eps^3 + 4 pi c4 eps^5 cos 4a.
  double g4 = 0.0;
  for (int m = -400; m <= 400; ++m)
    for (int n = -400; n <= 400; ++n)
      if (m != 0 || n != 0) g4 += std::real(std::pow(std::complex<double>(m, n), -4));
  const double c4 = g4 / (8 * kPi);
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const SurfacePoint x0 = s.point(0.5, 0.5);
  const double a = 0.7;
  for (double e : {0.08, 0.04, 0.02, 0.01}) {
    const double exact = -0.5 * e * e * std::log(e) + kPi * e * e * (kR0 + c4 * std::pow(e, 4) * std::cos(4 * a)) +
                         3 * kPi / 8 * std::pow(e, 4);
    EXPECT_NEAR(trap_potential(g, x0, e, a), exact, 1e-8 * exact) << e;
    const double slope = e / 2 - kPi / 2 * std::pow(e, 3) - 4 * kPi * c4 * std::pow(e, 5) * std::cos(4 * a);
    EXPECT_NEAR(std::abs(trap_potential_derivative(g, x0, e, a)), slope, 1e-6 * slope) << e;
  }
}

TEST(Scaling, SupExponentOnCoarseLadderFollowsExpansion) {
  // On {0.08 .. 0.01} the exact boundary value itself has log-log slope ~1.82;
  // the report must agree with it rather than with the asymptotic 2.
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const std::vector<double> ladder = {0.08, 0.04, 0.02, 0.01};
  const ScalingReport r = scaling_check(g, s.point(0.5, 0.5), ScalingQuantity::ISup, ladder);
  std::vector<double> scaled;
  for (double e : ladder) scaled.push_back((-0.5 * e * e * std::log(e) + kPi * kR0 * e * e + 3 * kPi / 8 * std::pow(e, 4)) /
                     std::abs(std::log(e)));
  EXPECT_NEAR(r.exponent, fit_loglog(ladder, scaled).slope, 0.02);
}

TEST(Scaling, FlatTorusQuadratureSuite) {
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  const std::vector<double> ladder = {0.02, 0.01, 0.005, 0.0025};
  const SurfacePoint x0 = s.point(0.5, 0.5);
  const ScalingReport i = scaling_check(g, x0, ScalingQuantity::ISup, ladder);
  EXPECT_TRUE(i.pass) << i.exponent;
  EXPECT_GE(i.exponent, 1.85);
  EXPECT_LE(i.exponent, 2.15);
  const ScalingReport d = scaling_check(g, x0, ScalingQuantity::DISup, ladder);
  EXPECT_TRUE(d.pass) << d.exponent;
  const ScalingReport k = scaling_check(g, x0, ScalingQuantity::KernelConst, ladder);
  EXPECT_TRUE(k.pass) << k.exponent;
  EXPECT_NEAR(k.values.back() * ladder.back(), 1 / (4 * kPi), 0.1 / (4 * kPi));
}

TEST(Scaling, SphereAndConformalSuites) {
  const std::vector<double> ladder = {0.02, 0.01, 0.005, 0.0025};
  const Surface sp(SurfaceSpec::round_sphere());
  GreenFunction gs(sp);
  EXPECT_TRUE(scaling_check(gs, sp.point(1.0, 1.0), ScalingQuantity::ISup, ladder).pass);
  EXPECT_TRUE(scaling_check(gs, sp.point(1.0, 1.0), ScalingQuantity::KernelConst, ladder).pass);
  const Surface c(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0)));
  GreenFunction gc(c);
  EXPECT_TRUE(scaling_check(gc, c.point(0.3, 0.5), ScalingQuantity::DISup, ladder).pass);
}

TEST(Scaling, LadderValidation) {
  const Surface s(SurfaceSpec::flat_torus());
  GreenFunction g(s);
  EXPECT_THROW(scaling_check(g, s.point(0.5, 0.5), ScalingQuantity::ISup, {0.01, 0.02, 0.005, 0.001}),
               ConfigError);
  EXPECT_THROW(scaling_check(g, s.point(0.5, 0.5), ScalingQuantity::ISup, {0.02, 0.01}), ConfigError);
  EXPECT_EQ(parse_quantity("dI_sup"), ScalingQuantity::DISup);
  EXPECT_THROW(parse_quantity("nope"), ConfigError);
}
