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

#include "conformal_geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <Eigen/Dense>

#include "narrowcap/errors.hpp"

namespace narrowcap {

namespace {

constexpr double kShootTol = 1e-12;

struct Stencil {
  int di, dj;
};
constexpr Stencil kStencil16[] = {
    {1, 0},  {0, 1},  {-1, 0}, {0, -1}, {1, 1},   {1, -1},  {-1, 1},  {-1, -1},
    {1, 2},  {2, 1},  {-1, 2}, {-2, 1}, {1, -2},  {2, -1},  {-1, -2}, {-2, -1}};

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

}  // namespace

ConformalGeodesics::ConformalGeodesics(double L1, double L2,
                                       ConformalFactor phi, int n,
                                       std::vector<double> samples)
    : L1_(L1), L2_(L2), phi_(std::move(phi)), n_(n),
      samples_(std::move(samples)) {}

double ConformalGeodesics::phi(const Eigen::Vector2d& x) const {
  return phi_.value(x[0], x[1], L1_, L2_);
}

Eigen::Vector2d ConformalGeodesics::grad_phi(const Eigen::Vector2d& x) const {
  return phi_.gradient(x[0], x[1], L1_, L2_);
}

Eigen::Vector2d ConformalGeodesics::accel(const Eigen::Vector2d& x,
                                          const Eigen::Vector2d& v) const {
  const Eigen::Vector2d g = grad_phi(x);
  return -2.0 * g.dot(v) * v + v.squaredNorm() * g;
}

ConformalGeodesics::State ConformalGeodesics::rk4_step(const State& s,
                                                       double h) const {
  const Eigen::Vector2d k1x = s.v;
  const Eigen::Vector2d k1v = accel(s.x, s.v);
  const Eigen::Vector2d k2x = s.v + 0.5 * h * k1v;
  const Eigen::Vector2d k2v = accel(s.x + 0.5 * h * k1x, k2x);
  const Eigen::Vector2d k3x = s.v + 0.5 * h * k2v;
  const Eigen::Vector2d k3v = accel(s.x + 0.5 * h * k2x, k3x);
  const Eigen::Vector2d k4x = s.v + h * k3v;
  const Eigen::Vector2d k4v = accel(s.x + h * k3x, k4x);
  return {s.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
          s.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

ConformalGeodesics::State ConformalGeodesics::integrate_fixed(State s,
                                                              int steps) const {
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) s = rk4_step(s, h);
  return s;
}

ConformalGeodesics::State ConformalGeodesics::integrate_adaptive(
    State s, double rel_tol, long max_steps) const {
  const double speed = s.v.norm();
  if (speed == 0.0) return s;
  // Error per unit time is measured against the travelled length scale.
  const double scale = speed;
  double t = 0.0;
  double h = std::min(1.0, 0.05 / speed);
  long steps = 0;
  while (t < 1.0) {
    if (++steps > max_steps)
      throw ConvergenceError("geodesic integration exceeded the step budget");
    h = std::min(h, 1.0 - t);
    const State full = rk4_step(s, h);
    const State half = rk4_step(rk4_step(s, 0.5 * h), 0.5 * h);
    const double err = std::max((half.x - full.x).lpNorm<Eigen::Infinity>(),
                                (half.v - full.v).lpNorm<Eigen::Infinity>()) /
                       (15.0 * scale);
    const double allowed = rel_tol * h;
    if (err <= allowed || h < 1e-14) {
      s.x = half.x + (half.x - full.x) / 15.0;
      s.v = half.v + (half.v - full.v) / 15.0;
      t += h;
    }
    const double ratio = err > 0.0 ? allowed / err : 1e4;
    h *= std::clamp(0.9 * std::pow(ratio, 0.25), 0.2, 4.0);
  }
  return s;
}

double ConformalGeodesics::graph_distance(
    const Eigen::Vector2d& x, const Eigen::Vector2d& y,
    Eigen::Vector2d* unwrapped_y, std::vector<Eigen::Vector2d>* path) const {
  const int n = n_;
  const double hu = L1_ / n;
  const double hv = L2_ / n;
  const size_t total = static_cast<size_t>(n) * n;
  std::vector<double> dist(total, std::numeric_limits<double>::infinity());
  std::vector<Eigen::Vector2d> pos(total);
  std::vector<int> parent(total, -1);
  std::vector<char> done(total, 0);
  auto node = [n](int i, int j) { return wrap(i, n) * n + wrap(j, n); };
  auto expphi = [&](int k) { return std::exp(samples_[k]); };

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const int xi = static_cast<int>(std::floor(x[0] / hu));
  const int xj = static_cast<int>(std::floor(x[1] / hv));
  const double ex = std::exp(phi(x));
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b) {
      const Eigen::Vector2d p((xi + a) * hu, (xj + b) * hv);
      const int k = node(xi + a, xj + b);
      const double d = 0.5 * (ex + expphi(k)) * (p - x).norm();
      if (d < dist[k]) {
        dist[k] = d;
        pos[k] = p;
        heap.push({d, k});
      }
    }

  const int yi = static_cast<int>(std::floor(y[0] / hu));
  const int yj = static_cast<int>(std::floor(y[1] / hv));
  int targets[4] = {node(yi, yj), node(yi + 1, yj), node(yi, yj + 1),
                    node(yi + 1, yj + 1)};
  int remaining = 4;
  while (!heap.empty() && remaining > 0) {
    const auto [d, k] = heap.top();
    heap.pop();
    if (done[k]) continue;
    done[k] = 1;
    for (int t = 0; t < 4; ++t)
      if (targets[t] == k) {
        --remaining;
        targets[t] = -2 - k;  // mark settled, keep the id recoverable
      }
    const int i = k / n;
    const int j = k % n;
    for (const auto& s : kStencil16) {
      const int m = node(i + s.di, j + s.dj);
      if (done[m]) continue;
      const Eigen::Vector2d step(s.di * hu, s.dj * hv);
      const double w = 0.5 * (expphi(k) + expphi(m)) * step.norm();
      if (d + w < dist[m]) {
        dist[m] = d + w;
        pos[m] = pos[k] + step;
        parent[m] = k;
        heap.push({dist[m], m});
      }
    }
  }

  const double ey = std::exp(phi(y));
  double best = std::numeric_limits<double>::infinity();
  int best_k = -1;
  Eigen::Vector2d best_y = y;
  for (int t = 0; t < 4; ++t) {
    const int k = -2 - targets[t];
    const Eigen::Vector2d p = pos[k];
    Eigen::Vector2d yu = y;
    yu[0] += L1_ * std::round((p[0] - y[0]) / L1_);
    yu[1] += L2_ * std::round((p[1] - y[1]) / L2_);
    const double d = dist[k] + 0.5 * (ey + expphi(k)) * (yu - p).norm();
    if (d < best) {
      best = d;
      best_k = k;
      best_y = yu;
    }
  }
  if (unwrapped_y) *unwrapped_y = best_y;
  if (path) {
    path->clear();
    path->push_back(best_y);
    for (int k = best_k; k >= 0; k = parent[k]) path->push_back(pos[k]);
    path->push_back(x);
    std::reverse(path->begin(), path->end());
  }
  return best;
}

Eigen::Vector2d ConformalGeodesics::shoot(const Eigen::Vector2d& x,
                                          double angle, double length,
                                          Eigen::Vector2d* end_velocity) const {
  const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
  State s{x, std::exp(-phi(x)) * length * dir};
  s = integrate_adaptive(s, kShootTol);
  if (end_velocity) *end_velocity = s.v / length;
  return s.x;
}

bool ConformalGeodesics::newton(const Eigen::Vector2d& x,
                                const Eigen::Vector2d& target, double angle,
                                double length, double* out_length) const {
  const double tol = 1e-13 * std::max(1.0, L1_ + L2_);
  // A seed that wanders far beyond its chord length is heading for a
  // different (longer) geodesic; give up on it.
  const double max_length = 3.0 * length;
  try {
    for (int it = 0; it < 40; ++it) {
      Eigen::Vector2d vel;
      const Eigen::Vector2d end = shoot(x, angle, length, &vel);
      const Eigen::Vector2d f = end - target;
      if (f.norm() <= tol + 1e-12 * length) {
        *out_length = length;
        return true;
      }
      const double da = 1e-7;
      const Eigen::Vector2d dfa =
          (shoot(x, angle + da, length, nullptr) -
           shoot(x, angle - da, length, nullptr)) /
          (2.0 * da);
      Eigen::Matrix2d J;
      J.col(0) = dfa;
      J.col(1) = vel;
      const double det = J.determinant();
      if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
      Eigen::Vector2d step = -J.inverse() * f;
      const double lim = 0.5;
      if (std::abs(step[0]) > lim) step *= lim / std::abs(step[0]);
      angle += step[0];
      length = std::max(length + step[1], 0.5 * length);
      if (length > max_length) return false;
    }
  } catch (const ConvergenceError&) {
    return false;
  }
  return false;
}

double ConformalGeodesics::chord_length(const Eigen::Vector2d& a,
                                        const Eigen::Vector2d& b) const {
  constexpr int kPts = 64;
  double acc = 0.0;
  for (int k = 0; k <= kPts; ++k) {
    const double w = (k == 0 || k == kPts) ? 0.5 : 1.0;
    acc += w * std::exp(phi(a + (b - a) * (static_cast<double>(k) / kPts)));
  }
  return acc / kPts * (b - a).norm();
}

double ConformalGeodesics::distance(const Eigen::Vector2d& x,
                                    const Eigen::Vector2d& y) const {
  double best = std::numeric_limits<double>::infinity();
  double min_phi = std::numeric_limits<double>::infinity();
  for (double v : samples_) min_phi = std::min(min_phi, v);
  const double lower_factor = std::exp(min_phi - 1e-3);

  struct Seed {
    Eigen::Vector2d target;
    double angle;
    double length;
    double flat;
  };
  std::vector<Seed> seeds;

  Eigen::Vector2d base = y - x;
  base[0] -= L1_ * std::round(base[0] / L1_);
  base[1] -= L2_ * std::round(base[1] / L2_);
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      const Eigen::Vector2d d = base + Eigen::Vector2d(a * L1_, b * L2_);
      seeds.push_back({x + d, std::atan2(d[1], d[0]), chord_length(x, x + d),
                       d.norm()});
    }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& p, const Seed& q) { return p.length < q.length; });

  // Graph seed: only worth the search when the points are several cells
  // apart; below that the nearest chord is already in the basin.
  double graph = std::numeric_limits<double>::infinity();
  const double cell = std::max(L1_, L2_) / n_;
  if (base.norm() > 4.0 * cell) {
    Eigen::Vector2d yu;
    std::vector<Eigen::Vector2d> path;
    graph = graph_distance(x, y, &yu, &path);
    const double reach = 0.25 * (yu - x).norm();
    Eigen::Vector2d aim = yu;
    for (const auto& p : path)
      if ((p - x).norm() >= reach) {
        aim = p;
        break;
      }
    const Eigen::Vector2d d = aim - x;
    seeds.insert(seeds.begin(), {yu, std::atan2(d[1], d[0]), graph,
                                 (yu - x).norm()});
  }

  bool any = false;
  for (const auto& s : seeds) {
    if (lower_factor * s.flat >= best) continue;
    double len = 0.0;
    if (newton(x, s.target, s.angle, s.length, &len)) {
      any = true;
      best = std::min(best, len);
    }
  }
  if (!any) {
    if (!std::isfinite(graph)) graph = graph_distance(x, y);
    throw DistanceError("geodesic shooting did not converge", graph);
  }
  return best;
}

}  // namespace narrowcap
