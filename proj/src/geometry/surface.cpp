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

#include "narrowcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "conformal_geodesics.hpp"
#include "narrowcap/errors.hpp"

namespace narrowcap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kChartSteps = 64;
constexpr double kExpTol = 1e-10;

double reduce(double a, double L) {
  double r = a - L * std::floor(a / L);
  if (r >= L) r = 0.0;
  return r;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::RoundSphere: return "round_sphere";
    case Family::FlatTorus: return "flat_torus";
    case Family::ConformalTorus: return "conformal_torus";
    case Family::FlatUnitDisk: return "unit_disk";
  }
  return "unknown";
}

SurfaceSpec SurfaceSpec::round_sphere(double radius) {
  SurfaceSpec s;
  s.family = Family::RoundSphere;
  s.sphere_radius = radius;
  return s;
}

SurfaceSpec SurfaceSpec::flat_torus(double L1, double L2) {
  SurfaceSpec s;
  s.family = Family::FlatTorus;
  s.L1 = L1;
  s.L2 = L2;
  return s;
}

SurfaceSpec SurfaceSpec::conformal_torus(double L1, double L2,
                                         ConformalFactor phi, int grid_n) {
  SurfaceSpec s;
  s.family = Family::ConformalTorus;
  s.L1 = L1;
  s.L2 = L2;
  s.phi = std::move(phi);
  s.grid_n = grid_n;
  return s;
}

SurfaceSpec SurfaceSpec::unit_disk() {
  SurfaceSpec s;
  s.family = Family::FlatUnitDisk;
  return s;
}

void SurfaceSpec::validate() const {
  switch (family) {
    case Family::RoundSphere:
      if (!(sphere_radius > 0.0) || !std::isfinite(sphere_radius))
        throw ConfigError("sphere_radius must be positive");
      break;
    case Family::ConformalTorus:
      if (!is_pow2(grid_n) || grid_n < 64)
        throw ConfigError("grid must be a power of two >= 64");
      if (rho_override && !(*rho_override > 0.0))
        throw ConfigError("rho override must be positive");
      [[fallthrough]];
    case Family::FlatTorus:
      if (!(L1 > 0.0) || !(L2 > 0.0) || !std::isfinite(L1) ||
          !std::isfinite(L2))
        throw ConfigError("lattice lengths must be positive");
      break;
    case Family::FlatUnitDisk:
      break;
  }
}

Surface::Surface(SurfaceSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  switch (spec_.family) {
    case Family::RoundSphere:
      area_ = 4.0 * kPi * spec_.sphere_radius * spec_.sphere_radius;
      break;
    case Family::FlatTorus:
      area_ = spec_.L1 * spec_.L2;
      break;
    case Family::FlatUnitDisk:
      area_ = kPi;
      break;
    case Family::ConformalTorus: {
      const int n = spec_.grid_n;
      phi_samples_ = spec_.phi.sample(n, spec_.L1, spec_.L2);
      double acc = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (double v : phi_samples_) {
        if (!std::isfinite(v)) throw ConfigError("phi sample not finite");
        acc += std::exp(2.0 * v);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      area_ = acc * spec_.L1 * spec_.L2 / (static_cast<double>(n) * n);
      // Grid maxima undershoot the true supremum by O(h^2 |phi''|).
      const double slack = 1e-3 * (hi - lo) + 1e-12;
      sup_phi_ = hi + slack;
      sup_abs_phi_ = std::max(std::abs(hi), std::abs(lo)) + slack;
      conformal_ = std::make_unique<ConformalGeodesics>(
          spec_.L1, spec_.L2, spec_.phi, n, phi_samples_);
      break;
    }
  }
}

Surface::~Surface() = default;

Surface::Surface(const Surface& o)
    : spec_(o.spec_), area_(o.area_), sup_phi_(o.sup_phi_),
      sup_abs_phi_(o.sup_abs_phi_), phi_samples_(o.phi_samples_) {
  if (o.conformal_)
    conformal_ = std::make_unique<ConformalGeodesics>(*o.conformal_);
}

Surface& Surface::operator=(const Surface& o) {
  if (this != &o) {
    Surface tmp(o);
    spec_ = std::move(tmp.spec_);
    area_ = tmp.area_;
    sup_phi_ = tmp.sup_phi_;
    sup_abs_phi_ = tmp.sup_abs_phi_;
    phi_samples_ = std::move(tmp.phi_samples_);
    conformal_ = std::move(tmp.conformal_);
  }
  return *this;
}

SurfacePoint Surface::point(double a, double b) const {
  SurfacePoint p;
  p.family = spec_.family;
  switch (spec_.family) {
    case Family::RoundSphere: {
      // (polar angle, azimuth)
      const double r = spec_.sphere_radius;
      p.coords = {r * std::sin(a) * std::cos(b), r * std::sin(a) * std::sin(b),
                  r * std::cos(a)};
      break;
    }
    case Family::FlatTorus:
    case Family::ConformalTorus:
      if (!std::isfinite(a) || !std::isfinite(b))
        throw DomainError("torus coordinates must be finite");
      p.coords = {reduce(a, spec_.L1), reduce(b, spec_.L2), 0.0};
      break;
    case Family::FlatUnitDisk:
      if (!(a * a + b * b <= 1.0 + 1e-12))
        throw DomainError("point outside the closed unit disk");
      p.coords = {a, b, 0.0};
      break;
  }
  return p;
}

SurfacePoint Surface::point(const Eigen::Vector3d& v) const {
  if (spec_.family != Family::RoundSphere) return point(v[0], v[1]);
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw DomainError("cannot project the zero vector onto the sphere");
  SurfacePoint p;
  p.family = Family::RoundSphere;
  p.coords = v * (spec_.sphere_radius / n);
  return p;
}

Eigen::Vector2d Surface::flat_offset(const SurfacePoint& x,
                                     const SurfacePoint& y) const {
  Eigen::Vector2d d = y.uv() - x.uv();
  if (spec_.is_torus()) {
    d[0] -= spec_.L1 * std::round(d[0] / spec_.L1);
    d[1] -= spec_.L2 * std::round(d[1] / spec_.L2);
  } else if (spec_.family == Family::RoundSphere) {
    throw DomainError("flat_offset is undefined on the sphere");
  }
  return d;
}

double Surface::distance(const SurfacePoint& x, const SurfacePoint& y) const {
  if (x == y) return 0.0;
  switch (spec_.family) {
    case Family::RoundSphere: {
      const double a = spec_.sphere_radius;
      return a * std::atan2(x.coords.cross(y.coords).norm(),
                            x.coords.dot(y.coords));
    }
    case Family::FlatTorus: {
      double best = std::numeric_limits<double>::infinity();
      const Eigen::Vector2d d = y.uv() - x.uv();
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
          best = std::min(
              best, (d + Eigen::Vector2d(i * spec_.L1, j * spec_.L2)).norm());
      return best;
    }
    case Family::ConformalTorus: {
      // Canonical argument order makes the result exactly symmetric.
      const bool swap = std::lexicographical_compare(
          y.coords.data(), y.coords.data() + 2, x.coords.data(),
          x.coords.data() + 2);
      return swap ? conformal_->distance(y.uv(), x.uv())
                  : conformal_->distance(x.uv(), y.uv());
    }
    case Family::FlatUnitDisk:
      return (y.uv() - x.uv()).norm();
  }
  return 0.0;
}

double Surface::graph_distance(const SurfacePoint& x,
                               const SurfacePoint& y) const {
  if (spec_.family != Family::ConformalTorus) return distance(x, y);
  return conformal_->graph_distance(x.uv(), y.uv());
}

std::array<Eigen::Vector3d, 2> Surface::frame(const SurfacePoint& x) const {
  if (spec_.family == Family::RoundSphere) {
    const Eigen::Vector3d p = x.coords.normalized();
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    int k = 0;
    p.cwiseAbs().minCoeff(&k);
    a[k] = 1.0;
    const Eigen::Vector3d e1 = (a - a.dot(p) * p).normalized();
    return {e1, p.cross(e1)};
  }
  const double s = std::exp(-phi(x));
  return {Eigen::Vector3d(s, 0.0, 0.0), Eigen::Vector3d(0.0, s, 0.0)};
}

GeodesicEnd Surface::geodesic(const TangentVector& v) const {
  const SurfacePoint& x = v.base;
  const Eigen::Vector2d& c = v.components;
  if (!c.allFinite()) throw DomainError("tangent components must be finite");
  GeodesicEnd out;
  switch (spec_.family) {
    case Family::RoundSphere: {
      const double a = spec_.sphere_radius;
      const auto f = frame(x);
      const double s = c.norm();
      if (s == 0.0) return {x, c};
      const Eigen::Vector3d vhat = (c[0] * f[0] + c[1] * f[1]) / s;
      const Eigen::Vector3d p = x.coords / a;
      const double th = s / a;
      const Eigen::Vector3d q = std::cos(th) * p + std::sin(th) * vhat;
      const Eigen::Vector3d w = s * (-std::sin(th) * p + std::cos(th) * vhat);
      out.point = point(Eigen::Vector3d(a * q));
      const auto g = frame(out.point);
      out.velocity = {w.dot(g[0]), w.dot(g[1])};
      return out;
    }
    case Family::FlatTorus:
      out.point = point(x.coords[0] + c[0], x.coords[1] + c[1]);
      out.velocity = c;
      return out;
    case Family::ConformalTorus: {
      if (c.isZero(0.0)) return {x, c};
      ConformalGeodesics::State s{x.uv(), std::exp(-phi(x)) * c};
      s = conformal_->integrate_adaptive(s, kExpTol);
      out.point = point(s.x[0], s.x[1]);
      out.velocity = std::exp(phi(out.point)) * s.v;
      return out;
    }
    case Family::FlatUnitDisk: {
      const Eigen::Vector2d e = x.uv() + c;
      if (e.squaredNorm() > 1.0 + 1e-12)
        throw DomainError("geodesic leaves the disk; use reflect_step");
      out.point = point(e[0], e[1]);
      out.velocity = c;
      return out;
    }
  }
  return out;
}

SurfacePoint Surface::exp_map(const TangentVector& v) const {
  return geodesic(v).point;
}

GeodesicEnd Surface::chart_geodesic(const SurfacePoint& x0,
                                    const Eigen::Vector2d& t) const {
  if (spec_.family != Family::ConformalTorus || t.isZero(0.0))
    return geodesic({x0, t});
  ConformalGeodesics::State s{x0.uv(), std::exp(-phi(x0)) * t};
  s = conformal_->integrate_fixed(s, kChartSteps);
  GeodesicEnd out;
  out.point = point(s.x[0], s.x[1]);
  out.velocity = std::exp(phi(out.point)) * s.v;
  return out;
}

SurfacePoint Surface::chart_point(const SurfacePoint& x0,
                                  const Eigen::Vector2d& t) const {
  return chart_geodesic(x0, t).point;
}

double Surface::injectivity_bound(const SurfacePoint& x0) const {
  switch (spec_.family) {
    case Family::RoundSphere:
      return kPi * spec_.sphere_radius / 2.0;
    case Family::FlatTorus:
      return std::min(spec_.L1, spec_.L2) / 2.0;
    case Family::ConformalTorus:
      if (spec_.rho_override) return *spec_.rho_override;
      return 0.2 * std::min(spec_.L1, spec_.L2) * std::exp(-sup_abs_phi_);
    case Family::FlatUnitDisk:
      return 1.0 - x0.uv().norm();
  }
  return 0.0;
}

Eigen::Matrix2d Surface::normal_chart_metric(const SurfacePoint& x0,
                                             const Eigen::Vector2d& t) const {
  if (!(t.norm() < injectivity_bound(x0)))
    throw DomainError("|t| must be below the injectivity bound");
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  switch (spec_.family) {
    case Family::RoundSphere: {
      const double r = t.norm();
      if (r == 0.0) return I;
      const double a = spec_.sphere_radius;
      const Eigen::Vector2d th = t / r;
      const Eigen::Matrix2d P = th * th.transpose();
      const double s = a * std::sin(r / a) / r;
      return P + s * s * (I - P);
    }
    case Family::FlatTorus:
    case Family::FlatUnitDisk:
      return I;
    case Family::ConformalTorus: {
      const double h = 1e-5;
      const SurfacePoint c = chart_point(x0, t);
      Eigen::Matrix2d J;
      for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d dt = Eigen::Vector2d::Zero();
        dt[k] = h;
        const Eigen::Vector2d up = flat_offset(c, chart_point(x0, t + dt));
        const Eigen::Vector2d dn = flat_offset(c, chart_point(x0, t - dt));
        J.col(k) = (up - dn) / (2.0 * h);
      }
      return std::exp(2.0 * phi(c)) * J.transpose() * J;
    }
  }
  return I;
}

SurfacePoint Surface::reflect_step(const SurfacePoint& x,
                                   const Eigen::Vector2d& displacement) const {
  if (spec_.family != Family::FlatUnitDisk)
    throw DomainError("reflect_step is only defined on the unit disk");
  Eigen::Vector2d p = x.uv();
  if (p.squaredNorm() > 1.0 + 1e-12)
    throw DomainError("reflect_step needs an interior start point");
  Eigen::Vector2d d = displacement;
  double remaining = d.norm();
  if (remaining == 0.0) return x;
  Eigen::Vector2d dir = d / remaining;
  for (int bounce = 0; bounce <= 100; ++bounce) {
    // Exit parameter of p + s dir through |.| = 1.
    const double b = p.dot(dir);
    const double c = p.squaredNorm() - 1.0;
    const double disc = std::max(b * b - c, 0.0);
    const double s_exit = std::max(-b + std::sqrt(disc), 0.0);
    if (remaining <= s_exit) {
      p += remaining * dir;
      const double n = p.norm();
      if (n > 1.0) p /= n;
      SurfacePoint out;
      out.family = Family::FlatUnitDisk;
      out.coords = {p[0], p[1], 0.0};
      return out;
    }
    p += s_exit * dir;
    p /= p.norm();
    remaining -= s_exit;
    dir -= 2.0 * dir.dot(p) * p;
  }
  throw DomainError("more than 100 reflections in one step");
}

SurfacePoint Surface::sample_uniform(std::uint64_t seed) const {
  RandomStream rng(seed, 0);
  return sample_uniform(rng);
}

SurfacePoint Surface::sample_uniform(RandomStream& rng) const {
  switch (spec_.family) {
    case Family::RoundSphere: {
      Eigen::Vector3d g;
      do {
        g = {rng.normal(), rng.normal(), rng.normal()};
      } while (g.squaredNorm() < 1e-300);
      return point(g);
    }
    case Family::FlatTorus:
      return point(rng.uniform() * spec_.L1, rng.uniform() * spec_.L2);
    case Family::ConformalTorus:
      for (;;) {
        const double u = rng.uniform() * spec_.L1;
        const double v = rng.uniform() * spec_.L2;
        const double acc = std::exp(2.0 * (phi_at(u, v) - sup_phi_));
        if (rng.uniform() < acc) return point(u, v);
      }
    case Family::FlatUnitDisk: {
      const double r = std::sqrt(rng.uniform());
      const double t = 2.0 * kPi * rng.uniform();
      return point(r * std::cos(t), r * std::sin(t));
    }
  }
  return {};
}

double Surface::phi(const SurfacePoint& x) const {
  if (spec_.family != Family::ConformalTorus) return 0.0;
  return phi_at(x.coords[0], x.coords[1]);
}

double Surface::phi_at(double u, double v) const {
  if (spec_.family != Family::ConformalTorus) return 0.0;
  return spec_.phi.value(u, v, spec_.L1, spec_.L2);
}

Eigen::Vector2d Surface::phi_gradient(double u, double v) const {
  if (spec_.family != Family::ConformalTorus) return Eigen::Vector2d::Zero();
  return spec_.phi.gradient(u, v, spec_.L1, spec_.L2);
}

}  // namespace narrowcap
