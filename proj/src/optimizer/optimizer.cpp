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

#include "narrowcap/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "narrowcap/errors.hpp"
#include "narrowcap/parallel.hpp"

namespace narrowcap {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDiskMargin = 0.15;
constexpr int kRecenterEvery = 10;

std::string describe(const SurfacePoint& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.coords[0] << ", " << p.coords[1];
  if (p.family == Family::RoundSphere) os << ", " << p.coords[2];
  os << ")";
  return os.str();
}

// Objective in a 2-D parameter space. Torus: flat coordinates, wrapped on
// evaluation. Disk: Cartesian, +inf outside the margin. Sphere: normal chart
// coordinates about a movable centre.
class Objective {
 public:
  Objective(const GreenFunction& g, double shift) : g_(g), s_(g.surface()), shift_(shift) {}

  SurfacePoint to_point(const Eigen::Vector2d& p) const {
    if (s_.family() == Family::RoundSphere) return s_.chart_point(chart_, p);
    if (s_.family() == Family::FlatUnitDisk) return s_.point(p[0], p[1]);
    return s_.point(p[0], p[1]);
  }

  bool admissible(const Eigen::Vector2d& p) const {
    return s_.family() != Family::FlatUnitDisk || p.norm() <= 1.0 - kDiskMargin;
  }

  double operator()(const Eigen::Vector2d& p) const {
    if (!admissible(p)) return std::numeric_limits<double>::infinity();
    return g_.regular_part(to_point(p)).value + shift_;
  }

  // Parameters of a surface point in the current chart.
  Eigen::Vector2d to_param(const SurfacePoint& x) const {
    if (s_.family() != Family::RoundSphere) return x.uv();
    const double a = s_.spec().sphere_radius;
    const Eigen::Vector3d p = chart_.coords / a;
    const Eigen::Vector3d q = x.coords / a;
    const Eigen::Vector3d v = q - p.dot(q) * p;
    const double vn = v.norm();
    if (vn == 0.0) return Eigen::Vector2d::Zero();
    const double th = std::atan2(vn, p.dot(q));
    const Eigen::Vector3d t = a * th * v / vn;
    const auto f = s_.frame(chart_);
    return {t.dot(f[0]), t.dot(f[1])};
  }

  void set_chart(const SurfacePoint& c) { chart_ = c; }
  const SurfacePoint& chart() const { return chart_; }

 private:
  const GreenFunction& g_;
  const Surface& s_;
  double shift_;
  SurfacePoint chart_;
};

double diameter(const std::array<Eigen::Vector2d, 3>& v) {
  return std::max({(v[0] - v[1]).norm(), (v[0] - v[2]).norm(), (v[1] - v[2]).norm()});
}

}  // namespace

RobinLandscape robin_landscape(const GreenFunction& g, int grid_n, int threads) {
  if (grid_n < 2) throw ConfigError("landscape grid needs at least 2 points per side");
  const Surface& s = g.surface();
  RobinLandscape out;
  out.n = grid_n;
  const int total = grid_n * grid_n;
  out.centers.resize(total);
  out.a.resize(total);
  out.b.resize(total);
  std::vector<char> active(total, 1);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const int k = i * grid_n + j;
      double a = 0.0, b = 0.0;
      switch (s.family()) {
        case Family::RoundSphere:
          a = kPi * (i + 0.5) / grid_n;
          b = 2.0 * kPi * (j + 0.5) / grid_n;
          break;
        case Family::FlatTorus:
        case Family::ConformalTorus:
          a = s.spec().L1 * (i + 0.5) / grid_n;
          b = s.spec().L2 * (j + 0.5) / grid_n;
          break;
        case Family::FlatUnitDisk: {
          const double r = 1.0 - kDiskMargin;
          a = -r + 2.0 * r * (i + 0.5) / grid_n;
          b = -r + 2.0 * r * (j + 0.5) / grid_n;
          active[k] = std::hypot(a, b) <= r;
          break;
        }
      }
      out.a[k] = a;
      out.b[k] = b;
      out.centers[k] = active[k] ? s.point(a, b) : s.point(0.0, 0.0);
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.values.assign(total, nan);
  out.errors.assign(total, nan);
  parallel_for(total, threads, 4, [&](int k) {
    if (!active[k]) return;
    try {
      const RegularPartEstimate r = g.regular_part(out.centers[k]);
      out.values[k] = r.value;
      out.errors[k] = r.extrapolation_error;
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at center " +
                                 describe(out.centers[k]),
                             e.history());
    }
  });
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < total; ++k) {
    if (!active[k]) continue;
    if (out.values[k] < out.min_value) {
      out.min_value = out.values[k];
      out.argmin = k;
    }
    out.max_value = std::max(out.max_value, out.values[k]);
    out.max_error = std::max(out.max_error, out.errors[k]);
  }
  return out;
}

OptimizationResult optimize_trap_center(const GreenFunction& g,
                                        const OptimizerOptions& opt) {
  if (opt.coarse_n < 2) throw ConfigError("coarse_n must be at least 2");
  if (opt.refine_iters < 0) throw ConfigError("refine_iters must be non-negative");
  if (!(opt.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  const Surface& s = g.surface();
  OptimizationResult res;
  RobinLandscape land = robin_landscape(g, opt.coarse_n, opt.threads);

  // Differences below the extraction error (or rounding) are noise.
  const double noise = std::max(3.0 * land.max_error,
                                1e-12 * (1.0 + std::abs(land.min_value)));
  res.degenerate = land.spread() <= noise;
  res.best_center = land.centers[land.argmin];
  res.best_value = land.min_value + opt.shift;
  if (res.degenerate && !opt.seed) {
    res.trace.push_back({res.best_center, res.best_value});
    res.converged = true;
    res.landscape = std::move(land);
    return res;
  }

  Objective f(g, opt.shift);
  SurfacePoint start = opt.seed ? *opt.seed : res.best_center;
  f.set_chart(start);
  double h;
  if (s.family() == Family::RoundSphere) {
    h = kPi * s.spec().sphere_radius / opt.coarse_n;
  } else if (s.family() == Family::FlatUnitDisk) {
    h = 2.0 * (1.0 - kDiskMargin) / opt.coarse_n;
  } else {
    h = std::min(s.spec().L1, s.spec().L2) / opt.coarse_n;
  }
  // Triangle symmetric under a sign flip of the first coordinate so that
  // mirrored seeds produce mirrored simplices.
  const Eigen::Vector2d c = f.to_param(start);
  std::array<Eigen::Vector2d, 3> v = {
      c + 0.5 * h * Eigen::Vector2d(0.0, 1.0),
      c + 0.5 * h * Eigen::Vector2d(-std::sqrt(3.0) / 2.0, -0.5),
      c + 0.5 * h * Eigen::Vector2d(std::sqrt(3.0) / 2.0, -0.5)};
  std::array<double, 3> fv;
  for (int k = 0; k < 3; ++k) fv[k] = f(v[k]);

  double best_val = std::numeric_limits<double>::infinity();
  SurfacePoint best_pt = start;
  auto record = [&]() {
    const int b = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    const SurfacePoint p = f.to_point(v[b]);
    if (fv[b] < best_val) {
      best_val = fv[b];
      best_pt = p;
    }
    res.trace.push_back({p, fv[b]});
  };
  record();

  int it = 0;
  for (; it < opt.refine_iters; ++it) {
    if (diameter(v) < opt.tolerance) {
      res.converged = true;
      break;
    }
    if (s.family() == Family::RoundSphere && it > 0 && it % kRecenterEvery == 0) {
      // Move the chart to the best vertex to keep distortion small.
      const int b = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
      std::array<SurfacePoint, 3> pts;
      for (int k = 0; k < 3; ++k) pts[k] = f.to_point(v[k]);
      f.set_chart(pts[b]);
      for (int k = 0; k < 3; ++k) v[k] = f.to_param(pts[k]);
    }
    std::array<int, 3> idx = {0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return fv[x] < fv[y]; });
    const int lo = idx[0], mid = idx[1], hi = idx[2];
    const Eigen::Vector2d cen = 0.5 * (v[lo] + v[mid]);
    const Eigen::Vector2d xr = cen + (cen - v[hi]);
    const double fr = f(xr);
    if (fr < fv[lo]) {
      const Eigen::Vector2d xe = cen + 2.0 * (cen - v[hi]);
      const double fe = f(xe);
      if (fe < fr) {
        v[hi] = xe;
        fv[hi] = fe;
      } else {
        v[hi] = xr;
        fv[hi] = fr;
      }
    } else if (fr < fv[mid]) {
      v[hi] = xr;
      fv[hi] = fr;
    } else {
      const bool outside = fr < fv[hi];
      const Eigen::Vector2d xc = outside ? cen + 0.5 * (xr - cen) : cen + 0.5 * (v[hi] - cen);
      const double fc = f(xc);
      if (fc < (outside ? fr : fv[hi])) {
        v[hi] = xc;
        fv[hi] = fc;
      } else {
        for (int k : {mid, hi}) {
          v[k] = v[lo] + 0.5 * (v[k] - v[lo]);
          fv[k] = f(v[k]);
        }
      }
    }
    record();
  }
  if (!res.converged && diameter(v) < opt.tolerance) res.converged = true;
  res.iterations = it;
  if (!res.converged)
    res.warning = "simplex did not reach the diameter tolerance within refine_iters";

  // Refinement never ends above the coarse-scan minimum.
  const double grid_best = land.min_value + opt.shift;
  if (best_val <= grid_best || opt.seed) {
    res.best_center = best_pt;
    res.best_value = best_val;
  }
  res.landscape = std::move(land);
  return res;
}

}  // namespace narrowcap
