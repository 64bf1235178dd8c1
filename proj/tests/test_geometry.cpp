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
#include "narrowcap/geometry.hpp"
#include "narrowcap/philox.hpp"
#include "narrowcap/quadrature.hpp"
#include "narrowcap/trap_shape.hpp"

using namespace narrowcap;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<SurfaceSpec> all_families() {
  return {SurfaceSpec::round_sphere(), SurfaceSpec::flat_torus(1.0, 0.8),
          SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0)),
          SurfaceSpec::unit_disk()};
}

}  // namespace

TEST(Philox, KnownAnswerVectors) {
  // Published Philox4x32-10 test vectors.
  const auto z = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(z[0], 0x6627e8d5u);
  EXPECT_EQ(z[1], 0xe169c58du);
  EXPECT_EQ(z[2], 0xbc57ac4cu);
  EXPECT_EQ(z[3], 0x9b00dbd8u);
  const auto f = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(f[0], 0x408f276du);
  EXPECT_EQ(f[1], 0x41c83b0eu);
  EXPECT_EQ(f[2], 0xa20bc7c6u);
  EXPECT_EQ(f[3], 0x6d5451fdu);
}

TEST(Philox, NormalMoments) {
  RandomStream rng(3, 9);
  double s1 = 0, s2 = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(Geometry, SpecValidation) {
  EXPECT_THROW(Surface(SurfaceSpec::round_sphere(-1.0)), ConfigError);
  EXPECT_THROW(Surface(SurfaceSpec::flat_torus(0.0, 1.0)), ConfigError);
  EXPECT_THROW(Surface(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::zero(), 100)),
               ConfigError);
  const Surface d(SurfaceSpec::unit_disk());
  EXPECT_THROW(d.point(1.0, 0.5), DomainError);
}

TEST(Geometry, SphereDistanceClosedForm) {
  const Surface s(SurfaceSpec::round_sphere(2.0));
  RandomStream rng(1, 0);
  for (int k = 0; k < 50; ++k) {
    const SurfacePoint x = s.sample_uniform(rng), y = s.sample_uniform(rng);
    const double c = x.coords.dot(y.coords) / 4.0;
    EXPECT_NEAR(s.distance(x, y), 2.0 * std::acos(std::clamp(c, -1.0, 1.0)), 1e-12);
  }
  EXPECT_NEAR(s.area(), 16.0 * kPi, 1e-12);
}

TEST(Geometry, FlatTorusMinimalImage) {
  const Surface s(SurfaceSpec::flat_torus(1.0, 0.8));
  EXPECT_NEAR(s.distance(s.point(0.05, 0.05), s.point(0.95, 0.75)), std::hypot(0.1, 0.1), 1e-14);
  EXPECT_NEAR(s.distance(s.point(0.3, 0.3), s.point(1.3, 0.3)), 0.0, 1e-15);
}

TEST(Geometry, DistanceSymmetryAndTriangle) {
  for (const auto& spec : all_families()) {
    const Surface s(spec);
    RandomStream rng(5, 1);
    for (int k = 0; k < 12; ++k) {
      const SurfacePoint x = s.sample_uniform(rng), y = s.sample_uniform(rng),
                         z = s.sample_uniform(rng);
      const double dxy = s.distance(x, y), dyx = s.distance(y, x);
      EXPECT_NEAR(dxy, dyx, 1e-10) << family_name(s.family());
      EXPECT_LE(s.distance(x, z), dxy + s.distance(y, z) + 1e-8) << family_name(s.family());
    }
  }
}

TEST(Geometry, ExpDistanceConsistency) {
  for (const auto& spec : all_families()) {
    const Surface s(spec);
    RandomStream rng(8, 2);
    for (int k = 0; k < 8; ++k) {
      SurfacePoint x = s.sample_uniform(rng);
      if (s.family() == Family::FlatUnitDisk) x = s.point(0.5 * x.coords[0], 0.5 * x.coords[1]);
      const double r = 0.6 * s.injectivity_bound(x) * rng.uniform();
      const double a = 2.0 * kPi * rng.uniform();
      const TangentVector v{x, r * Eigen::Vector2d(std::cos(a), std::sin(a))};
      EXPECT_NEAR(s.distance(x, s.exp_map(v)), r, 1e-6) << family_name(s.family());
    }
  }
}

TEST(Geometry, ConformalZeroMatchesFlat) {
  const Surface f(SurfaceSpec::flat_torus());
  const Surface c(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::zero()));
  RandomStream rng(4, 4);
  for (int k = 0; k < 100; ++k) {
    const double a = rng.uniform(), b = rng.uniform(), u = rng.uniform(), v = rng.uniform();
    EXPECT_NEAR(c.distance(c.point(a, b), c.point(u, v)), f.distance(f.point(a, b), f.point(u, v)),
                1e-10);
  }
}

TEST(Geometry, ConformalDistanceAgainstLineIntegral) {
  // phi depends on u only, so v = 1/2 is a geodesic by reflection symmetry
  // and its length is the line integral of e^phi.
  const Surface s(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0)));
  const auto [x, w] = gauss_legendre(40);
  double len = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    const double u = 0.5 + 0.25 * x[k];
    len += 0.25 * w[k] * std::exp(0.3 * std::cos(2.0 * kPi * u));
  }
  EXPECT_NEAR(len, 0.414862100094089, 1e-12);
  EXPECT_NEAR(s.distance(s.point(0.25, 0.5), s.point(0.75, 0.5)), len, 1e-6);
  // The graph estimate is first order only.
  EXPECT_NEAR(s.graph_distance(s.point(0.25, 0.5), s.point(0.75, 0.5)), len, 1e-3);
}

TEST(Geometry, ConformalAreaQuadrature) {
  // |M| = integral of e^{2 phi}; for phi = A cos(2 pi u) this is I0(2A).
  const Surface s(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0)));
  EXPECT_NEAR(s.area(), std::cyl_bessel_i(0.0, 0.6), 1e-10);
}

TEST(Geometry, NormalChartMetric) {
  for (const auto& spec : all_families()) {
    const Surface s(spec);
    const SurfacePoint x0 = s.family() == Family::RoundSphere ? s.point(1.0, 2.0)
                            : s.family() == Family::FlatUnitDisk ? s.point(0.2, 0.1)
                                                                  : s.point(0.3, 0.6);
    const Eigen::Matrix2d g0 = s.normal_chart_metric(x0, Eigen::Vector2d::Zero());
    EXPECT_NEAR((g0 - Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-6) << family_name(s.family());
    // First derivatives vanish at the centre: g(t) - I = O(|t|^2).
    const double h = 1e-4;
    const Eigen::Matrix2d gp = s.normal_chart_metric(x0, Eigen::Vector2d(h, 0.0));
    const Eigen::Matrix2d gm = s.normal_chart_metric(x0, Eigen::Vector2d(-h, 0.0));
    EXPECT_LT(((gp - gm) / (2 * h)).norm(), 1e-6) << family_name(s.family());
  }
  // Sphere: the polar-coordinate metric in the angular direction is
  // (sin r / r)^2.
  const Surface sp(SurfaceSpec::round_sphere());
  const double r = 0.7;
  const Eigen::Matrix2d g = sp.normal_chart_metric(sp.point(0.4, 0.3), Eigen::Vector2d(r, 0.0));
  EXPECT_NEAR(g(0, 0), 1.0, 1e-8);
  EXPECT_NEAR(g(1, 1), std::pow(std::sin(r) / r, 2), 1e-8);
}

TEST(Geometry, RescaledChartDistanceResidual) {
  // eps |t - s| / d(x(t), x(s)) - 1 = O(eps^2) on the rescaled sphere chart.
  const Surface s(SurfaceSpec::round_sphere());
  const SurfacePoint x0 = s.point(1.1, 0.4);
  std::vector<double> eps, res;
  for (double e : {0.1, 0.05, 0.025, 0.0125}) {
    const Eigen::Vector2d t(0.3, 0.8), u(-0.6, 0.1);
    const double d = s.distance(s.chart_point(x0, e * t), s.chart_point(x0, e * u));
    eps.push_back(e);
    res.push_back(std::abs(e * (t - u).norm() / d - 1.0));
  }
  const double slope = std::log(res[0] / res[3]) / std::log(eps[0] / eps[3]);
  EXPECT_GE(slope, 1.9);
}

TEST(Geometry, DiskReflectionStaysInside) {
  const Surface s(SurfaceSpec::unit_disk());
  const SurfacePoint p = s.reflect_step(s.point(0.9, 0.0), Eigen::Vector2d(0.3, 0.0));
  EXPECT_NEAR(p.coords[0], 0.8, 1e-14);
  RandomStream rng(2, 2);
  for (int k = 0; k < 1000; ++k) {
    const SurfacePoint q = s.reflect_step(s.sample_uniform(rng),
                                          Eigen::Vector2d(rng.normal(), rng.normal()));
    EXPECT_LE(q.uv().norm(), 1.0 + 1e-12);
  }
}

TEST(Geometry, DiskReflectionPreservesUniformMeasure) {
  // Reflected random walk from uniform starts, no trap, T = 5: chi-square
  // test on 8 sectors x 4 equal-area annuli at the 0.1% level.
  const Surface s(SurfaceSpec::unit_disk());
  const int n = 20000, steps = 500;
  const double dt = 5.0 / steps;
  std::vector<int> counts(32, 0);
  for (int i = 0; i < n; ++i) {
    RandomStream rng(77, i);
    SurfacePoint x = s.sample_uniform(rng);
    for (int k = 0; k < steps; ++k)
      x = s.reflect_step(x, std::sqrt(2.0 * dt) * Eigen::Vector2d(rng.normal(), rng.normal()));
    const double r2 = x.uv().squaredNorm();
    const double th = std::atan2(x.coords[1], x.coords[0]) + kPi;
    const int ring = std::min(3, static_cast<int>(r2 * 4.0));
    const int sector = std::min(7, static_cast<int>(th / (2 * kPi) * 8.0));
    ++counts[ring * 8 + sector];
  }
  double chi2 = 0.0;
  const double expct = n / 32.0;
  for (int c : counts) chi2 += (c - expct) * (c - expct) / expct;
  EXPECT_LT(chi2, 61.1);  // 99.9% quantile of chi^2 with 31 dof
}

TEST(Geometry, GeodesicBallArea) {
  const Surface sp(SurfaceSpec::round_sphere(1.5));
  const TrapSpec t{sp.point(0.3, 0.2), 0.2};
  EXPECT_NEAR(trap_area(sp, t).trap, 2 * kPi * 1.5 * 1.5 * (1 - std::cos(0.2 / 1.5)), 1e-12);
  EXPECT_NEAR(trap_boundary_length(sp, t), 2 * kPi * 1.5 * std::sin(0.2 / 1.5), 1e-12);
  const Surface f(SurfaceSpec::flat_torus());
  EXPECT_NEAR(trap_area(f, {f.point(0.5, 0.5), 0.1}).complement, 1.0 - kPi * 0.01, 1e-13);
  // On a conformal torus the ball area is pi eps^2 (1 - K eps^2 / 12 + ...)
  // with K = -e^{-2 phi} Lap phi.
  const Surface c(SurfaceSpec::conformal_torus(1, 1, ConformalFactor::cosine_bump(0.3, 1, 0)));
  const double eps = 0.02;
  const double phi0 = 0.3, lap = -0.3 * 4 * kPi * kPi;
  const double K = -std::exp(-2 * phi0) * lap;
  EXPECT_NEAR(trap_area(c, {c.point(0.0, 0.5), eps}).trap,
              kPi * eps * eps * (1 - K * eps * eps / 12), 1e-9);
}

TEST(Geometry, TrapValidation) {
  const Surface d(SurfaceSpec::unit_disk());
  EXPECT_THROW(validate_trap(d, {d.point(0.9, 0.0), 0.05}), DomainError);
  EXPECT_NO_THROW(validate_trap(d, {d.point(0.5, 0.0), 0.05}));
  const Surface f(SurfaceSpec::flat_torus());
  EXPECT_THROW(validate_trap(f, {f.point(0.5, 0.5), 0.0}), DomainError);
}
