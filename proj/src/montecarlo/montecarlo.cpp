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

#include "narrowcap/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "narrowcap/errors.hpp"
#include "narrowcap/parallel.hpp"
#include "narrowcap/philox.hpp"

namespace narrowcap {

namespace {

constexpr int kTickBits = 32;
constexpr std::uint64_t kTicksPerUnit = std::uint64_t{1} << kTickBits;
constexpr std::uint64_t kStartSalt = 0x9E3779B97F4A7C15ull;

// Brownian path in R^dim on time blocks of length `unit`; values inside a
// block come from midpoint bridge refinement keyed by the node index.
class BrownianPath {
 public:
  BrownianPath(std::uint64_t seed, std::uint32_t path, int dim, double unit)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        path_(path), dim_(dim), unit_(unit) {
    w_start_.setZero();
    w_end_ = w_start_ + std::sqrt(unit_) * normals(0, 0);
  }

  // W at time ticks / 2^32 * unit; calls must not go back past a block.
  Eigen::Vector3d at(std::uint64_t ticks) {
    const std::uint64_t b = ticks >> kTickBits;
    while (block_ < b) {
      ++block_;
      w_start_ = w_end_;
      w_end_ = w_start_ + std::sqrt(unit_) * normals(block_, 0);
    }
    const std::uint64_t frac = ticks & (kTicksPerUnit - 1);
    if (frac == 0) return w_start_;
    std::uint64_t lo = 0, hi = kTicksPerUnit, node = 1;
    Eigen::Vector3d wl = w_start_, wr = w_end_;
    for (;;) {
      const std::uint64_t mid = (lo + hi) / 2;
      const double var = static_cast<double>(hi - lo) / kTicksPerUnit * unit_ / 4.0;
      const Eigen::Vector3d wm = 0.5 * (wl + wr) + std::sqrt(var) * normals(block_, node);
      if (frac == mid) return wm;
      if (frac < mid) {
        hi = mid;
        wr = wm;
        node = 2 * node;
      } else {
        lo = mid;
        wl = wm;
        node = 2 * node + 1;
      }
    }
  }

 private:
  Eigen::Vector3d normals(std::uint64_t block, std::uint64_t node) const {
    Eigen::Vector3d z = Eigen::Vector3d::Zero();
    const PhiloxCounter c0{static_cast<std::uint32_t>(node),
                           static_cast<std::uint32_t>(node >> 32),
                           static_cast<std::uint32_t>(block), path_};
    const auto a = philox_normal_pair(c0, key_);
    z[0] = a[0];
    z[1] = a[1];
    if (dim_ == 3) {
      PhiloxCounter c1 = c0;
      c1[1] |= 0x80000000u;
      z[2] = philox_normal_pair(c1, key_)[0];
    }
    return z;
  }

  PhiloxKey key_;
  std::uint32_t path_;
  int dim_;
  double unit_;
  std::uint64_t block_ = 0;
  Eigen::Vector3d w_start_, w_end_;
};

struct Level {
  double unit = 0.0;   // block length
  int m_base = 0;      // base step = unit / 2^m_base
  int m_max = 0;       // floor step
  double floor_ratio = 0.0;
};

struct PathResult {
  double tau = 0.0;
  bool censored = false;
  std::uint64_t steps = 0;
  int m_deepest = 0;
};

class Walker {
 public:
  Walker(const Surface& s, const TrapSpec& trap)
      : s_(s), shape_(s, trap), eps_(trap.eps) {}

  const TrapShape& shape() const { return shape_; }

  SurfacePoint start(const MCConfig& cfg, std::uint32_t path) const {
    if (cfg.start) return *cfg.start;
    RandomStream rng(cfg.seed ^ kStartSalt, path);
    for (;;) {
      const SurfacePoint p = s_.sample_uniform(rng);
      if (!shape_.inside(p)) return p;
    }
  }

  PathResult run(const MCConfig& cfg, const Level& lv,
                 std::uint32_t path) const {
    PathResult res;
    SurfacePoint x = start(cfg, path);
    const bool sphere = s_.family() == Family::RoundSphere;
    BrownianPath w(cfg.seed, path, sphere ? 3 : 2, lv.unit);
    const double scale = std::sqrt(cfg.step_variance_factor);
    std::uint64_t ticks = 0;
    Eigen::Vector3d w_now = w.at(0);
    const auto max_ticks = static_cast<std::uint64_t>(
        std::ceil(cfg.max_time / lv.unit * static_cast<double>(kTicksPerUnit)));
    double dist = shape_.center_distance(x);
    while (dist > eps_) {
      if (ticks >= max_ticks) {
        res.censored = true;
        break;
      }
      // Within 4 eps the step shrinks with the squared gap to the trap.
      int m = lv.m_base;
      if (dist < 4.0 * eps_) {
        const double g = (dist - eps_) / (3.0 * eps_);
        const double want = std::max(g * g, lv.floor_ratio);
        while (m < lv.m_max && std::ldexp(1.0, lv.m_base - m) > want) ++m;
      }
      const std::uint64_t step = kTicksPerUnit >> m;
      if (ticks % step != 0) m = kTickBits - std::countr_zero(ticks);
      const std::uint64_t next = ticks + (kTicksPerUnit >> m);
      const Eigen::Vector3d w_next = w.at(next);
      const Eigen::Vector3d xi = scale * (w_next - w_now);
      x = advance(x, xi);
      w_now = w_next;
      ticks = next;
      ++res.steps;
      res.m_deepest = std::max(res.m_deepest, m);
      dist = shape_.center_distance(x);
    }
    res.tau = static_cast<double>(ticks) / kTicksPerUnit * lv.unit;
    return res;
  }

 private:
  SurfacePoint advance(const SurfacePoint& x, const Eigen::Vector3d& xi) const {
    switch (s_.family()) {
      case Family::RoundSphere: {
        const double a = s_.spec().sphere_radius;
        const Eigen::Vector3d p = x.coords / a;
        const Eigen::Vector3d t = xi - xi.dot(p) * p;
        const double len = t.norm();
        if (len == 0.0) return x;
        const double th = len / a;
        SurfacePoint y;
        y.family = Family::RoundSphere;
        const Eigen::Vector3d q = std::cos(th) * p + std::sin(th) * (t / len);
        y.coords = q * (a / q.norm());
        return y;
      }
      case Family::FlatTorus:
        return s_.point(x.coords[0] + xi[0], x.coords[1] + xi[1]);
      case Family::ConformalTorus: {
        // Lap_g = e^{-2 phi} Lap_flat has no drift in 2-D, so the first-order
        // geodesic step is consistent.
        const double f = std::exp(-s_.phi(x));
        return s_.point(x.coords[0] + f * xi[0], x.coords[1] + f * xi[1]);
      }
      case Family::FlatUnitDisk:
        return s_.reflect_step(x, xi.head<2>());
    }
    return x;
  }

  const Surface& s_;
  TrapShape shape_;
  double eps_;
};

MCEstimate summarise(const std::vector<PathResult>& res, const MCConfig& cfg,
                     const Level& lv) {
  MCEstimate est;
  const size_t n = res.size();
  std::vector<double> tau(n), steps(n);
  int deepest = 0;
  for (size_t i = 0; i < n; ++i) {
    tau[i] = res[i].tau;
    steps[i] = static_cast<double>(res[i].steps);
    if (res[i].censored) ++est.n_censored;
    deepest = std::max(deepest, res[i].m_deepest);
  }
  est.n_paths = static_cast<int>(n);
  est.mean = pairwise_sum(tau.data(), n) / n;
  std::vector<double> sq(n);
  for (size_t i = 0; i < n; ++i) sq[i] = (tau[i] - est.mean) * (tau[i] - est.mean);
  const double var = pairwise_sum(sq.data(), n) / (n - 1);
  est.std_error = std::sqrt(var / n);
  est.valid = est.n_censored < 0.1 * n;
  est.dt = lv.unit / std::ldexp(1.0, lv.m_base);
  est.dt_floor = est.dt * lv.floor_ratio;
  est.dt_min_used = lv.unit / std::ldexp(1.0, deepest);
  est.mean_steps = pairwise_sum(steps.data(), n) / n;
  if (cfg.keep_samples) est.samples = std::move(tau);
  return est;
}

Level make_level(double unit, double dt, double floor_ratio) {
  Level lv;
  lv.unit = unit;
  const double m = std::log2(unit / dt);
  lv.m_base = static_cast<int>(std::lround(m));
  if (std::abs(m - lv.m_base) > 1e-9 || lv.m_base < 0)
    throw ConfigError("dt values must differ from the largest by powers of two");
  lv.floor_ratio = floor_ratio;
  lv.m_max = lv.m_base + static_cast<int>(std::floor(std::log2(1.0 / floor_ratio) + 1e-9));
  lv.m_max = std::min(lv.m_max, kTickBits);
  return lv;
}

}  // namespace

double pairwise_sum(const double* v, size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (size_t k = 0; k < n; ++k) s += v[k];
    return s;
  }
  const size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

void MCConfig::validate() const {
  if (n_paths < 100) throw ConfigError("n_paths must be at least 100");
  if (!(base_dt > 0.0) || !(dt_floor > 0.0) || dt_floor > base_dt)
    throw ConfigError("need 0 < dt_floor <= base_dt");
  if (!(max_time > 0.0) || !std::isfinite(max_time))
    throw ConfigError("max_time must be finite and positive");
  if (!(step_variance_factor > 0.0))
    throw ConfigError("step_variance_factor must be positive");
}

MCEstimate simulate_first_passage(const Surface& s, const TrapSpec& trap,
                                  const MCConfig& cfg) {
  cfg.validate();
  const Walker walker(s, trap);
  const Level lv = make_level(cfg.base_dt, cfg.base_dt, cfg.dt_floor / cfg.base_dt);
  std::vector<PathResult> res(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, 64, [&](int i) {
    res[i] = walker.run(cfg, lv, static_cast<std::uint32_t>(i));
  });
  return summarise(res, cfg, lv);
}

BiasProbe bias_probe(const Surface& s, const TrapSpec& trap, const MCConfig& cfg,
                     const std::vector<double>& dt_ladder) {
  cfg.validate();
  if (dt_ladder.size() < 2) throw ConfigError("dt ladder needs at least 2 values");
  const Walker walker(s, trap);
  const double unit = *std::max_element(dt_ladder.begin(), dt_ladder.end());
  const double floor_ratio = cfg.dt_floor / cfg.base_dt;
  const size_t L = dt_ladder.size();
  const int n = cfg.n_paths;
  std::vector<std::vector<PathResult>> res(L, std::vector<PathResult>(n));
  std::vector<Level> levels;
  for (double dt : dt_ladder) levels.push_back(make_level(unit, dt, floor_ratio));
  parallel_for(n, cfg.threads, 64, [&](int i) {
    for (size_t k = 0; k < L; ++k)
      res[k][i] = walker.run(cfg, levels[k], static_cast<std::uint32_t>(i));
  });

  BiasProbe out;
  std::vector<double> x(L);
  for (size_t k = 0; k < L; ++k) {
    out.levels.push_back(summarise(res[k], cfg, levels[k]));
    x[k] = std::sqrt(dt_ladder[k]);
  }
  // Per-path least squares in sqrt(dt); mean and spread over paths.
  double xm = 0.0;
  for (double v : x) xm += v / L;
  double sxx = 0.0;
  for (double v : x) sxx += (v - xm) * (v - xm);
  std::vector<double> icpt(n), slope(n);
  for (int i = 0; i < n; ++i) {
    double ym = 0.0, sxy = 0.0;
    for (size_t k = 0; k < L; ++k) ym += res[k][i].tau / L;
    for (size_t k = 0; k < L; ++k) sxy += (x[k] - xm) * (res[k][i].tau - ym);
    slope[i] = sxy / sxx;
    icpt[i] = ym - slope[i] * xm;
  }
  out.intercept = pairwise_sum(icpt.data(), n) / n;
  out.slope = pairwise_sum(slope.data(), n) / n;
  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) sq[i] = (icpt[i] - out.intercept) * (icpt[i] - out.intercept);
  out.intercept_stderr = std::sqrt(pairwise_sum(sq.data(), n) / (n - 1) / n);

  ScalingReport& rep = out.report;
  rep.quantity = "mc_bias_probe";
  rep.eps = dt_ladder;
  std::vector<double> se, sqrt_dt;
  for (size_t k = 0; k < L; ++k) {
    rep.values.push_back(out.levels[k].mean);
    se.push_back(out.levels[k].std_error);
    sqrt_dt.push_back(x[k]);
  }
  rep.series = {{"sqrt_dt", sqrt_dt}, {"stderr", se}};
  rep.scalars = {{"intercept", out.intercept},
                 {"intercept_stderr", out.intercept_stderr},
                 {"slope", out.slope}};
  rep.exponent = out.slope;
  // Means should move monotonically with dt (beyond 2 standard errors
  // the ordering must agree with the slope sign).
  std::vector<size_t> order(L);
  for (size_t k = 0; k < L; ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return dt_ladder[a] < dt_ladder[b]; });
  for (size_t k = 1; k < L; ++k) {
    const double d = rep.values[order[k]] - rep.values[order[k - 1]];
    const double tol = 2.0 * std::hypot(se[order[k]], se[order[k - 1]]);
    if (d * out.slope < 0.0 && std::abs(d) > tol) rep.inconclusive = true;
  }
  bool valid = true;
  for (const auto& lv : out.levels) valid = valid && lv.valid;
  rep.pass = valid && !rep.inconclusive;
  if (!valid) rep.note = "censoring above 10%";
  return out;
}

}  // namespace narrowcap
