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

#include "narrowcap/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "ewald.hpp"
#include "narrowcap/errors.hpp"
#include "narrowcap/fftw_planner.hpp"
#include "narrowcap/quadrature.hpp"
#include "narrowcap/trap_shape.hpp"

namespace narrowcap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
const double kSphereConst = (std::log(2.0) - 0.5) / kTwoPi;

// log(sin(x)/x) without cancellation for small x.
double log_sinc(double x) {
  if (std::abs(x) < 1e-4) return -x * x / 6.0 - x * x * x * x / 180.0;
  return std::log(std::sin(x) / x);
}

// |x| |y - x/|x|^2|, which tends to 1 as x -> 0.
double image_factor(const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
  const double r = x.norm();
  if (r == 0.0) return 1.0;
  return (r * y - x / r).norm();
}

std::vector<double> solve_w(int n, double L1, double L2, double area,
                            const std::vector<double>& phi) {
  std::vector<double> f(static_cast<size_t>(n) * n);
  for (size_t k = 0; k < f.size(); ++k)
    f[k] = std::exp(2.0 * phi[k]) / area - 1.0 / (L1 * L2);
  const int nc = n / 2 + 1;
  fftw_complex* spec = fftw_alloc_complex(static_cast<size_t>(n) * nc);
  fftw_plan fwd, inv;
  std::vector<double> w(f.size());
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_2d(n, n, f.data(), spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_2d(n, n, spec, w.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (int i = 0; i < n; ++i) {
    const double k1 = (i <= n / 2 ? i : i - n) / L1;
    for (int j = 0; j < nc; ++j) {
      const double k2 = j / L2;
      const double k2n = k1 * k1 + k2 * k2;
      const double scale =
          k2n == 0.0 ? 0.0 : -1.0 / (4.0 * kPi * kPi * k2n * n * n);
      spec[i * nc + j][0] *= scale;
      spec[i * nc + j][1] *= scale;
    }
  }
  fftw_execute(inv);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(spec);
  return w;
}

}  // namespace

GreenFunction::GreenFunction(const Surface& s) : surface_(s) {
  const auto& sp = surface_.spec();
  switch (surface_.family()) {
    case Family::RoundSphere:
      break;
    case Family::FlatTorus:
      ewald_ = std::make_unique<FlatTorusEwald>(sp.L1, sp.L2);
      break;
    case Family::ConformalTorus: {
      ewald_ = std::make_unique<FlatTorusEwald>(sp.L1, sp.L2);
      const int n = sp.grid_n;
      w_ = solve_w(n, sp.L1, sp.L2, surface_.area(), surface_.phi_samples());
      double acc = 0.0;
      const auto& phi = surface_.phi_samples();
      for (size_t k = 0; k < w_.size(); ++k)
        acc += w_[k] * std::exp(2.0 * phi[k]);
      acc *= sp.L1 * sp.L2 / (static_cast<double>(n) * n);
      kconf_ = -acc / surface_.area();
      w_grid_ = std::make_unique<PeriodicGrid>(n, sp.L1, sp.L2, w_);
      break;
    }
    case Family::FlatUnitDisk: {
      doubled_ = std::make_unique<FlatTorusEwald>(4.0, 4.0);
      // Mean-zero constant from E(0, y) = -(1/2pi) log r + r^2/(4pi) + k0.
      const auto [xs, ws] = gauss_legendre(64);
      double acc = 0.0;
      for (size_t q = 0; q < xs.size(); ++q) {
        const double s = 0.5 * (xs[q] + 1.0);
        const double r = s * s;
        const double f = -std::log(r) / kTwoPi + r * r / (4.0 * kPi);
        acc += 0.5 * ws[q] * f * r * 2.0 * s;
      }
      k0_ = -kTwoPi * acc / kPi;
      break;
    }
  }
}

GreenFunction::~GreenFunction() = default;

double GreenFunction::conformal_w(const SurfacePoint& x) const {
  if (!w_grid_) return 0.0;
  return w_grid_->value(x.coords[0], x.coords[1]);
}

double GreenFunction::value(const SurfacePoint& x,
                            const SurfacePoint& y) const {
  switch (surface_.family()) {
    case Family::RoundSphere: {
      const double d = surface_.distance(x, y);
      if (d == 0.0) throw SingularityError("E(x,x) is singular; use regular_part");
      const double g = d / surface_.spec().sphere_radius;
      return -std::log(2.0 * std::sin(0.5 * g)) / kTwoPi + kSphereConst;
    }
    case Family::FlatTorus:
      return ewald_->total(surface_.flat_offset(x, y));
    case Family::ConformalTorus:
      return ewald_->total(surface_.flat_offset(x, y)) + conformal_w(x) +
             conformal_w(y) + kconf_;
    case Family::FlatUnitDisk: {
      const Eigen::Vector2d a = x.uv();
      const Eigen::Vector2d b = y.uv();
      const double r = (a - b).norm();
      if (r == 0.0) throw SingularityError("E(x,x) is singular; use regular_part");
      return -(std::log(r) + std::log(image_factor(a, b))) / kTwoPi +
             (a.squaredNorm() + b.squaredNorm()) / (4.0 * kPi) + k0_;
    }
  }
  return 0.0;
}

double GreenFunction::regular_at(const SurfacePoint& x, const SurfacePoint& y,
                                 double d) const {
  switch (surface_.family()) {
    case Family::RoundSphere: {
      const double a = surface_.spec().sphere_radius;
      const double g = d / a;
      return -log_sinc(0.5 * g) / kTwoPi + std::log(a) / kTwoPi + kSphereConst;
    }
    case Family::FlatTorus:
    case Family::ConformalTorus: {
      const Eigen::Vector2d off = surface_.flat_offset(x, y);
      double r = ewald_->regular(off);
      const double flat = off.norm();
      if (flat > 0.0) r += std::log(d / flat) / kTwoPi;
      if (surface_.family() == Family::ConformalTorus) {
        r += conformal_w(x) + conformal_w(y) + kconf_;
        // At coincidence the metric ratio d/flat tends to e^{phi(x)}.
        if (flat == 0.0) r += surface_.phi(x) / kTwoPi;
      }
      return r;
    }
    case Family::FlatUnitDisk: {
      const Eigen::Vector2d a = x.uv();
      const Eigen::Vector2d b = y.uv();
      double r = -std::log(image_factor(a, b)) / kTwoPi +
                 (a.squaredNorm() + b.squaredNorm()) / (4.0 * kPi) + k0_;
      const double flat = (a - b).norm();
      if (flat > 0.0) r += std::log(d / flat) / kTwoPi;
      return r;
    }
  }
  return 0.0;
}

GreenValue GreenFunction::green(const SurfacePoint& x,
                                const SurfacePoint& y) const {
  if (surface_.family() == Family::FlatUnitDisk) return neumann_green(x, y);
  const double d = surface_.distance(x, y);
  if (d == 0.0) throw SingularityError("E(x,x) is singular; use regular_part");
  GreenValue g;
  g.distance = d;
  g.log_part = -std::log(d) / kTwoPi;
  g.regular_part = regular_at(x, y, d);
  g.total = g.log_part + g.regular_part;
  return g;
}

GreenValue GreenFunction::neumann_green(const SurfacePoint& x,
                                        const SurfacePoint& y) const {
  if (surface_.family() != Family::FlatUnitDisk)
    throw ConfigError("neumann_green needs the unit disk");
  if (!(x.uv().norm() < 1.0))
    throw DomainError("source point must be interior");
  const double d = surface_.distance(x, y);
  if (d == 0.0) throw SingularityError("E(x,x) is singular; use regular_part");
  GreenValue g;
  g.distance = d;
  g.log_part = -std::log(d) / kTwoPi;
  g.regular_part = regular_at(x, y, d);
  g.total = g.log_part + g.regular_part;
  return g;
}

double GreenFunction::correction_term(const SurfacePoint& x,
                                      const SurfacePoint& y) const {
  if (surface_.family() != Family::FlatUnitDisk)
    throw ConfigError("correction_term needs the unit disk");
  if (!(x.uv().norm() < 0.9) || !(y.uv().norm() < 0.9))
    throw DomainError("correction_term needs points 0.1 inside the disk");
  // Both regular parts carry the same +(1/2pi) log|x-y|; their difference is
  // C and stays finite on the diagonal.
  const double d = (x.uv() - y.uv()).norm();
  return doubled_->regular(y.uv() - x.uv()) - regular_at(x, y, d);
}

RegularPartEstimate GreenFunction::regular_part(const SurfacePoint& x0,
                                                double angle) const {
  if (surface_.family() == Family::FlatUnitDisk && !(x0.uv().norm() < 1.0))
    throw DomainError("regular_part needs an interior point");
  RegularPartEstimate est;
  const double d0 = 0.05 * surface_.injectivity_bound(x0);
  const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
  std::vector<double> raw;
  for (int j = 0; j <= 6; ++j) {
    const double d = d0 / static_cast<double>(1 << j);
    const SurfacePoint y = surface_.chart_point(x0, d * dir);
    const double r = regular_at(x0, y, d);
    est.ladder.push_back({d, r});
    raw.push_back(r);
  }
  for (size_t j = 0; j + 1 < raw.size(); ++j)
    est.level1.push_back(2.0 * raw[j + 1] - raw[j]);
  for (size_t j = 0; j + 1 < est.level1.size(); ++j)
    est.level2.push_back((4.0 * est.level1[j + 1] - est.level1[j]) / 3.0);
  est.value = est.level2.back();
  est.extrapolation_error = std::abs(est.level2.back() - est.level1.back());

  // Coarse rungs may still be pre-asymptotic (curvature of the metric), and
  // where the linear coefficient nearly vanishes the raw ladder legitimately
  // turns. Monotone convergence is therefore demanded of the first-level
  // Richardson values on the finest rungs.
  const double noise = 1e-13 * (1.0 + std::abs(est.value));
  int sign = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (size_t j = est.level1.size() - 3; j + 1 < est.level1.size(); ++j) {
    const double diff = est.level1[j] - est.level1[j + 1];
    if (std::abs(diff) <= noise) continue;
    const int s = diff > 0 ? 1 : -1;
    if (sign != 0 && s != sign)
      throw ConvergenceError("regular-part ladder is not monotone", raw);
    if (std::abs(diff) > prev + noise)
      throw ConvergenceError("regular-part ladder does not converge", raw);
    sign = s;
    prev = std::abs(diff);
  }
  std::vector<double> lx, ly;
  for (size_t j = raw.size() - 4; j + 1 < raw.size(); ++j) {
    const double diff = raw[j] - raw[j + 1];
    if (std::abs(diff) <= noise) continue;
    lx.push_back(std::log(est.ladder[j].first));
    ly.push_back(std::log(std::abs(diff)));
  }
  if (lx.size() >= 3) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < lx.size(); ++k) {
      sx += lx[k];
      sy += ly[k];
      sxx += lx[k] * lx[k];
      sxy += lx[k] * ly[k];
    }
    est.difference_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    // Differences below rounding: the remainder is flat at this scale.
    est.difference_exponent = std::numeric_limits<double>::infinity();
  }
  return est;
}

double GreenFunction::green_mean_residual(const SurfacePoint& x) const {
  const auto [gx, gw] = gauss_legendre(64);
  switch (surface_.family()) {
    case Family::RoundSphere: {
      // Geodesic polar grid about x; r = pi a s^2 absorbs the log.
      const double a = surface_.spec().sphere_radius;
      constexpr int kAz = 8;
      double acc = 0.0;
      for (size_t q = 0; q < gx.size(); ++q) {
        const double s = 0.5 * (gx[q] + 1.0);
        const double r = kPi * a * s * s;
        const double jac = 0.5 * gw[q] * 2.0 * kPi * a * s * a * std::sin(r / a);
        for (int k = 0; k < kAz; ++k) {
          const double t = kTwoPi * (k + 0.5) / kAz;
          const SurfacePoint y = surface_.exp_map(
              {x, r * Eigen::Vector2d(std::cos(t), std::sin(t))});
          acc += jac * (kTwoPi / kAz) * value(x, y);
        }
      }
      return acc;
    }
    case Family::FlatTorus:
    case Family::ConformalTorus: {
      const auto& sp = surface_.spec();
      const int n = surface_.family() == Family::ConformalTorus ? sp.grid_n : 256;
      const double h1 = sp.L1 / n;
      const double h2 = sp.L2 / n;
      const double delta = 0.25 * std::min(sp.L1, sp.L2);
      const double ex = std::exp(2.0 * surface_.phi(x));
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Eigen::Vector2d off((i + 0.5) * h1 - 0.5 * sp.L1,
                                    (j + 0.5) * h2 - 0.5 * sp.L2);
          const SurfacePoint y =
              surface_.point(x.coords[0] + off[0], x.coords[1] + off[1]);
          const double r = off.norm();
          const double sub =
              -std::log(r) / kTwoPi * smooth_cutoff(r, 0.5 * delta, delta);
          acc += value(x, y) * std::exp(2.0 * surface_.phi(y)) - sub * ex;
        }
      acc *= h1 * h2;
      // Add back the integral of the subtracted radial term.
      double back = 0.0;
      for (size_t q = 0; q < gx.size(); ++q) {
        const double s = 0.5 * (gx[q] + 1.0);
        const double r = delta * s * s;
        back += 0.5 * gw[q] * 2.0 * delta * s * r * std::log(r) *
                smooth_cutoff(r, 0.5 * delta, delta);
      }
      return acc - ex * back;
    }
    case Family::FlatUnitDisk: {
      if (!(x.uv().norm() < 1.0))
        throw DomainError("mean residual needs an interior point");
      constexpr int kAz = 128;
      const Eigen::Vector2d p = x.uv();
      double acc = 0.0;
      for (int k = 0; k < kAz; ++k) {
        const double t = kTwoPi * (k + 0.5) / kAz;
        const Eigen::Vector2d u(std::cos(t), std::sin(t));
        const double b = p.dot(u);
        const double R = -b + std::sqrt(b * b + 1.0 - p.squaredNorm());
        for (size_t q = 0; q < gx.size(); ++q) {
          const double s = 0.5 * (gx[q] + 1.0);
          const double r = R * s * s;
          const Eigen::Vector2d y = p + r * u;
          SurfacePoint ys;
          ys.family = Family::FlatUnitDisk;
          ys.coords = {y[0], y[1], 0.0};
          acc += 0.5 * gw[q] * 2.0 * R * s * r * (kTwoPi / kAz) * value(x, ys);
        }
      }
      return acc;
    }
  }
  return 0.0;
}

double GreenFunction::trap_kernel_constant(const SurfacePoint& x0, double eps,
                                           int n_points) const {
  validate_trap(surface_, {x0, eps});
  const int n = n_points;
  std::vector<SurfacePoint> ys(n);
  for (int j = 0; j < n; ++j) {
    const double b = kTwoPi * (j + 0.5) / n;
    ys[j] = surface_.chart_point(x0, eps * Eigen::Vector2d(std::cos(b), std::sin(b)));
  }
  // Closest approach between the two staggered rings.
  const double min_sep = 2.0 * eps * std::sin(kPi / (2.0 * n));
  double h = 1e-3 * eps;
  int shrinks = 0;
  while (h > 0.25 * min_sep) {
    if (++shrinks > 5)
      throw ConvergenceError("finite-difference step collides with the kernel");
    h *= 0.5;
  }
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = kTwoPi * i / n;
    const Eigen::Vector2d e(std::cos(a), std::sin(a));
    const SurfacePoint in = surface_.chart_point(x0, (eps - h) * e);
    const SurfacePoint out = surface_.chart_point(x0, (eps + h) * e);
    for (int j = 0; j < n; ++j)
      acc += (value(in, ys[j]) - value(out, ys[j])) / (2.0 * h);
  }
  return acc / (static_cast<double>(n) * n);
}

}  // namespace narrowcap
