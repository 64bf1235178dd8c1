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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "narrowcap/green.hpp"
#include "narrowcap/report.hpp"
#include "narrowcap/trap_shape.hpp"

namespace narrowcap {

struct SolverOptions {
  double rel_tol = 1e-10;
  int max_iter_factor = 50;  // iteration cap = factor * N
  // FFT-diagonalised trap-free operator as preconditioner; false gives Jacobi.
  bool spectral_preconditioner = true;
};

/// Discrete solution of -Lap_g u = 1 on M_eps, u = 0 on the trap (and
/// d_nu u = 0 on the unit circle for the disk). Torus families use an N x N
/// periodic grid with nodes (i L1/N, j L2/N); the disk a polar grid with
/// nodes ((i + 1/2) dr, j dtheta), i < n1, j < n2.
struct PDESolution {
  struct CutArm {
    int node;
    double coef;  // face / arm length
  };

  PDESolution(Surface s, TrapSpec t) : surface(std::move(s)), trap(t) {}

  Surface surface;
  TrapSpec trap;
  bool polar = false;
  int N = 0;
  int n1 = 0;
  int n2 = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  std::vector<double> u;
  std::vector<char> mask;
  std::vector<double> source;  // right-hand side = quadrature weight of node
  std::vector<CutArm> arms;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  // every 10th iteration

  /// Grid spacing in metric units near the trap.
  double spacing() const;
  Eigen::Vector2d node_position(int k) const;
  /// Bicubic (Catmull-Rom) interpolation of u.
  double interpolate(const SurfacePoint& p) const;
  /// Weighted average of u over M_eps.
  double average() const;
  /// Sum of the node weights, the discrete |M_eps|.
  double discrete_area() const;
};

PDESolution solve_trapped_bvp(const Surface& s, const TrapSpec& trap, int N,
                              const SolverOptions& opt = {});

/// Discrete outward flux through the trap boundary (telescoped cut arms).
double flux_on_trap(const PDESolution& sol);

/// (angle, d_nu u) with nu the outward normal of M_eps (towards x0).
std::vector<std::pair<double, double>> normal_derivative_profile(
    const PDESolution& sol, int n_angles);

/// Grid size used for a trap radius.
struct NPolicy {
  double cells_per_unit_eps = 20.0;  // N >= factor / eps
  int min_n = 128;
  int max_n = 4096;
  int grid_for(double eps) const;
};

enum class ScalingQuantity { ISup, DISup, KernelConst, NormalDerivative };
std::string quantity_name(ScalingQuantity q);
ScalingQuantity parse_quantity(const std::string& s);

/// I_eps(x0, x) = integral of E(x, y) over the trap, x on the boundary.
double trap_potential(const GreenFunction& g, const SurfacePoint& x0,
                      double eps, double angle);
/// Normal derivative (towards x0) of I_eps(x0, .) at the boundary point.
double trap_potential_derivative(const GreenFunction& g,
                                 const SurfacePoint& x0, double eps,
                                 double angle);

ScalingReport scaling_check(const GreenFunction& g, const SurfacePoint& x0,
                            ScalingQuantity q, const std::vector<double>& ladder,
                            const NPolicy& policy = {});

/// Discrepancy between the grid average and the averaged asymptotic formula.
/// Consecutive ratios of Delta/(eps |log eps|) must lie in [ratio_lo,
/// ratio_hi] and Delta must decrease.
ScalingReport asymptotic_convergence(const GreenFunction& g,
                                     const SurfacePoint& x0,
                                     const std::vector<double>& ladder,
                                     const NPolicy& policy = {},
                                     double ratio_lo = 0.3,
                                     double ratio_hi = 3.0);

}  // namespace narrowcap
