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

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "narrowcap/conformal_factor.hpp"
#include "narrowcap/philox.hpp"

namespace narrowcap {

enum class Family { RoundSphere, FlatTorus, ConformalTorus, FlatUnitDisk };

std::string family_name(Family f);

struct SurfaceSpec {
  Family family = Family::RoundSphere;
  double sphere_radius = 1.0;
  double L1 = 1.0;
  double L2 = 1.0;
  ConformalFactor phi;
  // Resolution of the phi sample grid (conformal torus only). Power of two.
  int grid_n = 256;
  // Overrides the default injectivity surrogate of the conformal torus.
  std::optional<double> rho_override;

  static SurfaceSpec round_sphere(double radius = 1.0);
  static SurfaceSpec flat_torus(double L1 = 1.0, double L2 = 1.0);
  static SurfaceSpec conformal_torus(double L1, double L2, ConformalFactor phi,
                                     int grid_n = 256);
  static SurfaceSpec unit_disk();

  bool has_boundary() const { return family == Family::FlatUnitDisk; }
  bool is_torus() const {
    return family == Family::FlatTorus || family == Family::ConformalTorus;
  }
  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// A point on a surface. Sphere points are embedded 3-vectors of norm
/// sphere_radius; torus points are (u, v) reduced to [0,L1) x [0,L2); disk
/// points are Cartesian (x1, x2). The third coordinate is 0 off the sphere.
struct SurfacePoint {
  Family family = Family::RoundSphere;
  Eigen::Vector3d coords = Eigen::Vector3d::Zero();

  Eigen::Vector2d uv() const { return coords.head<2>(); }
  bool operator==(const SurfacePoint& o) const {
    return family == o.family && coords == o.coords;
  }
};

/// Tangent vector given by its components in the orthonormal frame
/// (E1, E2) returned by Surface::frame() at the base point.
struct TangentVector {
  SurfacePoint base;
  Eigen::Vector2d components = Eigen::Vector2d::Zero();
};

/// End point of a geodesic plus its velocity there, in the orthonormal frame
/// at the end point.
struct GeodesicEnd {
  SurfacePoint point;
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

class ConformalGeodesics;

/// Immutable surface with cached metric data. All member functions are
/// const and safe to call concurrently.
class Surface {
 public:
  explicit Surface(SurfaceSpec spec);
  ~Surface();
  Surface(const Surface&);
  Surface& operator=(const Surface&);

  const SurfaceSpec& spec() const { return spec_; }
  Family family() const { return spec_.family; }
  double area() const { return area_; }

  // Construction helpers. Torus coordinates are reduced to the fundamental
  // domain; sphere vectors are projected onto the sphere; disk points must
  // lie in the closed unit disk.
  SurfacePoint point(double a, double b) const;
  SurfacePoint point(const Eigen::Vector3d& p) const;

  double distance(const SurfacePoint& x, const SurfacePoint& y) const;

  SurfacePoint exp_map(const TangentVector& v) const;
  GeodesicEnd geodesic(const TangentVector& v) const;

  /// Straight step with specular reflection at the unit circle (disk only).
  SurfacePoint reflect_step(const SurfacePoint& x,
                            const Eigen::Vector2d& displacement) const;

  SurfacePoint sample_uniform(std::uint64_t seed) const;
  SurfacePoint sample_uniform(RandomStream& rng) const;

  /// Orthonormal frame at x. Sphere: ambient 3-vectors. 2-D families: the
  /// coordinate velocities of the unit vectors (third entry 0).
  std::array<Eigen::Vector3d, 2> frame(const SurfacePoint& x) const;

  /// exp_{x0}(t1 E1 + t2 E2), smooth in t (fixed-step integration on the
  /// conformal torus) so that it can be differentiated numerically.
  SurfacePoint chart_point(const SurfacePoint& x0,
                           const Eigen::Vector2d& t) const;
  /// Chart point together with the geodesic velocity at it.
  GeodesicEnd chart_geodesic(const SurfacePoint& x0,
                             const Eigen::Vector2d& t) const;

  /// Pullback metric of the normal chart at x0; requires |t| < rho(x0).
  Eigen::Matrix2d normal_chart_metric(const SurfacePoint& x0,
                                      const Eigen::Vector2d& t) const;

  /// Radius below which the normal chart at x0 is trusted.
  double injectivity_bound(const SurfacePoint& x0) const;

  /// Minimal-image flat displacement y - x (torus), y - x (disk).
  Eigen::Vector2d flat_offset(const SurfacePoint& x,
                              const SurfacePoint& y) const;

  // Conformal factor helpers (zero off the conformal torus).
  double phi(const SurfacePoint& x) const;
  double phi_at(double u, double v) const;
  Eigen::Vector2d phi_gradient(double u, double v) const;
  double sup_phi() const { return sup_phi_; }
  double sup_abs_phi() const { return sup_abs_phi_; }
  /// phi sampled on the grid_n x grid_n lattice (conformal torus only).
  const std::vector<double>& phi_samples() const { return phi_samples_; }

  /// Graph shortest-path estimate (conformal torus), exposed for tests.
  double graph_distance(const SurfacePoint& x, const SurfacePoint& y) const;

 private:
  SurfaceSpec spec_;
  double area_ = 0.0;
  double sup_phi_ = 0.0;
  double sup_abs_phi_ = 0.0;
  std::vector<double> phi_samples_;
  std::unique_ptr<ConformalGeodesics> conformal_;
};

}  // namespace narrowcap
