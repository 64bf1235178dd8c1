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
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "narrowcap/errors.hpp"
#include "narrowcap/fftw_planner.hpp"
#include "narrowcap/pde.hpp"

namespace narrowcap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Poly = std::vector<Eigen::Vector2d>;

// Clip against the half-plane sign * (p[axis] - bound) <= 0.
Poly clip(const Poly& in, int axis, double bound, double sign) {
  Poly out;
  const size_t n = in.size();
  for (size_t k = 0; k < n; ++k) {
    const Eigen::Vector2d& a = in[k];
    const Eigen::Vector2d& b = in[(k + 1) % n];
    const double fa = sign * (a[axis] - bound);
    const double fb = sign * (b[axis] - bound);
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
      out.push_back(a + (b - a) * (fa / (fa - fb)));
  }
  return out;
}

double poly_area(const Poly& p) {
  double a = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    const auto& u = p[k];
    const auto& v = p[(k + 1) % p.size()];
    a += u[0] * v[1] - u[1] * v[0];
  }
  return 0.5 * std::abs(a);
}

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  return p1 + 0.5 * t *
                  (p2 - p0 +
                   t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                        t * (3.0 * (p1 - p2) + p3 - p0)));
}

struct Operator {
  // Torus: diag - cu (E + W) - cv (N + S). Disk: per-ring conductances.
  bool polar = false;
  int n1 = 0, n2 = 0;
  double cu = 0.0, cv = 0.0;
  std::vector<double> cr;  // radial conductance between ring i and i+1
  std::vector<double> ct;  // angular conductance on ring i
  std::vector<double> diag;
  const std::vector<char>* mask = nullptr;

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int N1 = n1, N2 = n2;
    const char* m = mask->data();
    const double* xp = x.data();
    double* yp = y.data();
    if (!polar) {
      for (int i = 0; i < N1; ++i) {
        const double* row = xp + static_cast<size_t>(i) * N2;
        const double* up = xp + static_cast<size_t>((i + 1) % N1) * N2;
        const double* dn = xp + static_cast<size_t>((i + N1 - 1) % N1) * N2;
        const size_t base = static_cast<size_t>(i) * N2;
        for (int j = 0; j < N2; ++j) {
          const size_t k = base + j;
          if (m[k]) {
            yp[k] = 0.0;
            continue;
          }
          const int jp = j + 1 == N2 ? 0 : j + 1;
          const int jm = j == 0 ? N2 - 1 : j - 1;
          yp[k] = diag[k] * row[j] - cu * (up[j] + dn[j]) -
                  cv * (row[jp] + row[jm]);
        }
      }
      return;
    }
    for (int i = 0; i < N1; ++i) {
      const size_t base = static_cast<size_t>(i) * N2;
      const double cin = i > 0 ? cr[i - 1] : 0.0;
      const double cout = i + 1 < N1 ? cr[i] : 0.0;
      for (int j = 0; j < N2; ++j) {
        const size_t k = base + j;
        if (m[k]) {
          yp[k] = 0.0;
          continue;
        }
        const int jp = j + 1 == N2 ? 0 : j + 1;
        const int jm = j == 0 ? N2 - 1 : j - 1;
        double v = diag[k] * xp[k] - ct[i] * (xp[base + jp] + xp[base + jm]);
        if (i > 0) v -= cin * xp[k - N2];
        if (i + 1 < N1) v -= cout * xp[k + N2];
        yp[k] = v;
      }
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Inverse of the trap-free operator plus a small mass shift, diagonalised by
// FFT in the periodic direction(s). The disk keeps a tridiagonal solve per
// angular mode. The trap only changes a few rows, so CG needs few iterations.
class SpectralPreconditioner {
 public:
  SpectralPreconditioner(const Operator& A, double shift, double cell_area)
      : A_(A), nc_(A.n2 / 2 + 1) {
    const size_t nreal = static_cast<size_t>(A.n1) * A.n2;
    const size_t ncplx = static_cast<size_t>(A.n1) * nc_;
    buf_ = fftw_alloc_real(nreal);
    spec_ = fftw_alloc_complex(ncplx);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      if (A.polar) {
        int n = A.n2;
        fwd_ = fftw_plan_many_dft_r2c(1, &n, A.n1, buf_, nullptr, 1, A.n2, spec_,
                                      nullptr, 1, nc_, FFTW_ESTIMATE);
        inv_ = fftw_plan_many_dft_c2r(1, &n, A.n1, spec_, nullptr, 1, nc_, buf_,
                                      nullptr, 1, A.n2, FFTW_ESTIMATE);
      } else {
        fwd_ = fftw_plan_dft_r2c_2d(A.n1, A.n2, buf_, spec_, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_2d(A.n1, A.n2, spec_, buf_, FFTW_ESTIMATE);
      }
    }
    std::vector<double> lam(nc_);
    for (int m = 0; m < nc_; ++m)
      lam[m] = 2.0 - 2.0 * std::cos(kTwoPi * m / A.n2);
    if (!A.polar) {
      eig_.resize(ncplx);
      for (int i = 0; i < A.n1; ++i) {
        const double li = 2.0 - 2.0 * std::cos(kTwoPi * i / A.n1);
        for (int m = 0; m < nc_; ++m)
          eig_[static_cast<size_t>(i) * nc_ + m] =
              1.0 / ((A.cu * li + A.cv * lam[m] + shift * cell_area) *
                     static_cast<double>(nreal));
      }
      return;
    }
    // Thomas factors per mode; ring i has mass (i + 1/2) * cell_area.
    cp_.resize(ncplx);
    inv_denom_.resize(ncplx);
    for (int i = 0; i < A.n1; ++i) {
      const double cin = i > 0 ? A.cr[i - 1] : 0.0;
      const double cout = i + 1 < A.n1 ? A.cr[i] : 0.0;
      for (int m = 0; m < nc_; ++m) {
        const size_t k = static_cast<size_t>(i) * nc_ + m;
        double b = cin + cout + A.ct[i] * lam[m] + shift * (i + 0.5) * cell_area;
        if (i > 0) b += cin * cp_[k - nc_];
        inv_denom_[k] = 1.0 / b;
        cp_[k] = -cout / b;
      }
    }
  }
  ~SpectralPreconditioner() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
    fftw_free(spec_);
  }
  SpectralPreconditioner(const SpectralPreconditioner&) = delete;
  SpectralPreconditioner& operator=(const SpectralPreconditioner&) = delete;

  void apply(const std::vector<double>& r, std::vector<double>& z) const {
    const char* mask = A_.mask->data();
    const size_t nreal = r.size();
    for (size_t k = 0; k < nreal; ++k) buf_[k] = mask[k] ? 0.0 : r[k];
    fftw_execute(fwd_);
    if (!A_.polar) {
      for (size_t k = 0; k < eig_.size(); ++k) {
        spec_[k][0] *= eig_[k];
        spec_[k][1] *= eig_[k];
      }
    } else {
      const int n1 = A_.n1;
      for (int i = 0; i < n1; ++i) {
        const double a = i > 0 ? -A_.cr[i - 1] : 0.0;
        for (int m = 0; m < nc_; ++m) {
          const size_t k = static_cast<size_t>(i) * nc_ + m;
          double re = spec_[k][0], im = spec_[k][1];
          if (i > 0) {
            re -= a * spec_[k - nc_][0];
            im -= a * spec_[k - nc_][1];
          }
          spec_[k][0] = re * inv_denom_[k];
          spec_[k][1] = im * inv_denom_[k];
        }
      }
      for (int i = n1 - 2; i >= 0; --i)
        for (int m = 0; m < nc_; ++m) {
          const size_t k = static_cast<size_t>(i) * nc_ + m;
          spec_[k][0] -= cp_[k] * spec_[k + nc_][0];
          spec_[k][1] -= cp_[k] * spec_[k + nc_][1];
        }
      const double norm = 1.0 / A_.n2;
      for (size_t k = 0; k < static_cast<size_t>(n1) * nc_; ++k) {
        spec_[k][0] *= norm;
        spec_[k][1] *= norm;
      }
    }
    fftw_execute(inv_);
    for (size_t k = 0; k < nreal; ++k) z[k] = mask[k] ? 0.0 : buf_[k];
  }

 private:
  const Operator& A_;
  int nc_;
  double* buf_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
  std::vector<double> eig_;
  std::vector<double> cp_;
  std::vector<double> inv_denom_;
};

template <class Precond>
void conjugate_gradient(const Operator& A, const std::vector<double>& b,
                        PDESolution& sol, const SolverOptions& opt,
                        const Precond& precond) {
  const size_t n = b.size();
  std::vector<double>& x = sol.u;
  x.assign(n, 0.0);
  std::vector<double> r = b, z(n), p(n), q(n);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return;
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  const long max_it = static_cast<long>(opt.max_iter_factor) * sol.N;
  for (long it = 1; it <= max_it; ++it) {
    A.apply(p, q);
    const double alpha = rz / dot(p, q);
    double rr = 0.0;
    for (size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
      rr += r[k] * r[k];
    }
    const double rel = std::sqrt(rr) / bnorm;
    if (it % 10 == 0) sol.residual_history.push_back(rel);
    if (rel <= opt.rel_tol) {
      sol.iterations = static_cast<int>(it);
      sol.residual = rel;
      return;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw ConvergenceError("conjugate gradients did not converge",
                         sol.residual_history);
}

void solve_system(const Operator& A, const std::vector<double>& b,
                  PDESolution& sol, const SolverOptions& opt, double area) {
  if (!opt.spectral_preconditioner) {
    conjugate_gradient(A, b, sol, opt,
                       [&](const std::vector<double>& r, std::vector<double>& z) {
                         for (size_t k = 0; k < r.size(); ++k) z[k] = r[k] / A.diag[k];
                       });
    return;
  }
  // Mass shift near the lowest eigenvalue of the trapped problem.
  const double shift = kTwoPi / (area * std::max(1.0, std::log(1.0 / sol.trap.eps)));
  const SpectralPreconditioner P(A, shift, A.polar ? sol.h1 * sol.h1 * sol.h2
                                                   : sol.h1 * sol.h2);
  conjugate_gradient(A, b, sol, opt,
                     [&](const std::vector<double>& r, std::vector<double>& z) {
                       P.apply(r, z);
                     });
}

void assemble_torus(PDESolution& sol, const TrapShape& shape, Operator& A) {
  const Surface& s = sol.surface;
  const int N = sol.N;
  const double h1 = sol.h1, h2 = sol.h2;
  const Eigen::Vector2d c = sol.trap.center.uv();
  const size_t total = static_cast<size_t>(N) * N;
  auto offset = [&](int i, int j) {
    Eigen::Vector2d d(i * h1 - c[0], j * h2 - c[1]);
    d[0] -= s.spec().L1 * std::round(d[0] / s.spec().L1);
    d[1] -= s.spec().L2 * std::round(d[1] / s.spec().L2);
    return d;
  };
  sol.mask.assign(total, 0);
  // Only nodes within the bounding radius can be masked or cut.
  const double reach = shape.max_flat_radius() + 2.0 * std::max(h1, h2);
  std::vector<int> near;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (offset(i, j).norm() <= reach) {
        near.push_back(i * N + j);
        sol.mask[static_cast<size_t>(i) * N + j] =
            shape.inside_offset(offset(i, j)) ? 1 : 0;
      }

  A.polar = false;
  A.n1 = A.n2 = N;
  A.cu = h2 / h1;
  A.cv = h1 / h2;
  A.diag.assign(total, 2.0 * (A.cu + A.cv));
  A.mask = &sol.mask;

  std::vector<std::pair<double, Eigen::Vector2d>> crossings;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int k : near) {
    if (sol.mask[k]) {
      A.diag[k] = 1.0;
      continue;
    }
    const int i = k / N, j = k % N;
    const Eigen::Vector2d o = offset(i, j);
    double diag = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int ni = (i + di[d] + N) % N, nj = (j + dj[d] + N) % N;
      const double hd = di[d] != 0 ? h1 : h2;
      const double face = di[d] != 0 ? h2 : h1;
      if (!sol.mask[static_cast<size_t>(ni) * N + nj]) {
        diag += face / hd;
        continue;
      }
      const Eigen::Vector2d step(di[d] * h1, dj[d] * h2);
      const double frac = shape.crossing(o, o + step);
      const double arm = std::max(frac * hd, 1e-3 * hd);
      diag += face / arm;
      sol.arms.push_back({k, face / arm});
      const Eigen::Vector2d p = o + frac * step;
      crossings.push_back({std::atan2(p[1], p[0]), p});
    }
    A.diag[k] = diag;
  }

  // Cut-cell weights: area of each dual cell outside the crossing polygon.
  std::vector<double> area(total, h1 * h2);
  std::sort(crossings.begin(), crossings.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Poly poly;
  for (const auto& cr : crossings) poly.push_back(cr.second);
  if (poly.size() >= 3) {
    for (int k : near) {
      const Eigen::Vector2d o = offset(k / N, k % N);
      Poly p = clip(poly, 0, o[0] + 0.5 * h1, 1.0);
      p = clip(p, 0, o[0] - 0.5 * h1, -1.0);
      p = clip(p, 1, o[1] + 0.5 * h2, 1.0);
      p = clip(p, 1, o[1] - 0.5 * h2, -1.0);
      area[k] = h1 * h2 - (p.size() >= 3 ? poly_area(p) : 0.0);
    }
  }
  for (int k : near) {
    if (!sol.mask[k]) continue;
    const double out = area[k];
    area[k] = 0.0;
    if (out <= 0.0) continue;
    const int i = k / N, j = k % N;
    std::vector<int> open;
    for (int d = 0; d < 4; ++d) {
      const int m = ((i + di[d] + N) % N) * N + (j + dj[d] + N) % N;
      if (!sol.mask[m]) open.push_back(m);
    }
    for (int m : open) area[m] += out / open.size();
  }

  sol.source.assign(total, 0.0);
  const auto& phi = s.phi_samples();
  const bool conformal = s.family() == Family::ConformalTorus;
  const int pn = conformal ? s.spec().grid_n : 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const size_t k = static_cast<size_t>(i) * N + j;
      if (sol.mask[k]) continue;
      double w = 1.0;
      if (conformal) {
        // Solve grids nest in the phi grid when N divides grid_n.
        if (pn % N == 0)
          w = std::exp(2.0 * phi[static_cast<size_t>(i * (pn / N)) * pn +
                                 j * (pn / N)]);
        else
          w = std::exp(2.0 * s.phi_at(i * h1, j * h2));
      }
      sol.source[k] = area[k] * w;
    }
}

void assemble_disk(PDESolution& sol, const TrapShape& shape, Operator& A) {
  const int nr = sol.n1, nt = sol.n2;
  const double dr = sol.h1, dt = sol.h2;
  const size_t total = static_cast<size_t>(nr) * nt;
  sol.mask.assign(total, 0);
  std::vector<Eigen::Vector2d> off(total);
  const Eigen::Vector2d c = sol.trap.center.uv();
  for (size_t k = 0; k < total; ++k) {
    off[k] = sol.node_position(static_cast<int>(k)) - c;
    sol.mask[k] = shape.inside_offset(off[k]) ? 1 : 0;
  }
  A.polar = true;
  A.n1 = nr;
  A.n2 = nt;
  A.mask = &sol.mask;
  A.cr.resize(nr);
  A.ct.resize(nr);
  for (int i = 0; i < nr; ++i) {
    const double ri = (i + 0.5) * dr;
    A.cr[i] = (i + 1) * dr * dt / dr;
    A.ct[i] = dr / (ri * dt);
  }
  A.diag.assign(total, 1.0);
  sol.source.assign(total, 0.0);
  for (int i = 0; i < nr; ++i) {
    const double ri = (i + 0.5) * dr;
    for (int j = 0; j < nt; ++j) {
      const size_t k = static_cast<size_t>(i) * nt + j;
      if (sol.mask[k]) continue;
      sol.source[k] = ri * dr * dt;
      double diag = 0.0;
      struct Nb {
        long idx;
        double cond;
        double len;
      };
      Nb nbs[4] = {
          {j + 1 == nt ? static_cast<long>(k) - j : static_cast<long>(k) + 1,
           A.ct[i], ri * dt},
          {j == 0 ? static_cast<long>(k) + nt - 1 : static_cast<long>(k) - 1,
           A.ct[i], ri * dt},
          {i + 1 < nr ? static_cast<long>(k) + nt : -1, A.cr[i], dr},
          {i > 0 ? static_cast<long>(k) - nt : -1, i > 0 ? A.cr[i - 1] : 0.0,
           dr}};
      for (const auto& nb : nbs) {
        if (nb.idx < 0) continue;
        if (!sol.mask[nb.idx]) {
          diag += nb.cond;
          continue;
        }
        const double frac = shape.crossing(off[k], off[nb.idx]);
        const double arm = std::max(frac * nb.len, 1e-3 * nb.len);
        const double coef = nb.cond * nb.len / arm;
        diag += coef;
        sol.arms.push_back({static_cast<int>(k), coef});
      }
      A.diag[k] = diag;
    }
  }
}

}  // namespace

double PDESolution::spacing() const {
  if (polar) return h1;
  return std::max(h1, h2) * std::exp(surface.phi(trap.center));
}

Eigen::Vector2d PDESolution::node_position(int k) const {
  const int i = k / n2, j = k % n2;
  if (!polar) return {i * h1, j * h2};
  const double r = (i + 0.5) * h1;
  return {r * std::cos(j * h2), r * std::sin(j * h2)};
}

double PDESolution::interpolate(const SurfacePoint& p) const {
  double fi, fj;
  if (!polar) {
    fi = p.coords[0] / h1;
    fj = p.coords[1] / h2;
  } else {
    const double r = p.uv().norm();
    double th = std::atan2(p.coords[1], p.coords[0]);
    if (th < 0.0) th += kTwoPi;
    fi = r / h1 - 0.5;
    fj = th / h2;
  }
  const int i0 = static_cast<int>(std::floor(fi));
  const int j0 = static_cast<int>(std::floor(fj));
  const double ti = fi - i0, tj = fj - j0;
  auto at = [&](int i, int j) {
    if (!polar) {
      i = ((i % n1) + n1) % n1;
      j = ((j % n2) + n2) % n2;
      return u[static_cast<size_t>(i) * n2 + j];
    }
    if (i < 0) {  // through the centre
      i = -1 - i;
      j += n2 / 2;
    }
    if (i >= n1) i = 2 * n1 - 1 - i;  // mirror at the Neumann wall
    j = ((j % n2) + n2) % n2;
    return u[static_cast<size_t>(i) * n2 + j];
  };
  double col[4];
  for (int a = 0; a < 4; ++a)
    col[a] = catmull_rom(at(i0 - 1 + a, j0 - 1), at(i0 - 1 + a, j0),
                         at(i0 - 1 + a, j0 + 1), at(i0 - 1 + a, j0 + 2), tj);
  return catmull_rom(col[0], col[1], col[2], col[3], ti);
}

double PDESolution::average() const {
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k < u.size(); ++k) {
    num += source[k] * u[k];
    den += source[k];
  }
  return num / den;
}

double PDESolution::discrete_area() const {
  double a = 0.0;
  for (double b : source) a += b;
  return a;
}

PDESolution solve_trapped_bvp(const Surface& s, const TrapSpec& trap, int N,
                              const SolverOptions& opt) {
  if (s.family() == Family::RoundSphere)
    throw ConfigError("the grid solver covers the torus families and the disk");
  if (N < 128) throw DomainError("grid size must be at least 128");
  const TrapShape shape(s, trap);
  PDESolution sol(s, trap);
  sol.N = N;
  Operator A;
  if (s.family() == Family::FlatUnitDisk) {
    sol.polar = true;
    sol.n1 = N / 2;
    sol.n2 = 2 * N;
    sol.h1 = 1.0 / sol.n1;
    sol.h2 = kTwoPi / sol.n2;
    if (sol.h1 > trap.eps / 4.0)
      throw DomainError("trap is under-resolved (need dr <= eps/4)");
    assemble_disk(sol, shape, A);
  } else {
    sol.n1 = sol.n2 = N;
    sol.h1 = s.spec().L1 / N;
    sol.h2 = s.spec().L2 / N;
    if (std::max(sol.h1, sol.h2) > trap.eps * std::exp(-s.sup_phi()) / 4.0)
      throw DomainError("trap is under-resolved (need h <= eps/4)");
    assemble_torus(sol, shape, A);
  }
  const double flat_area = sol.polar ? std::numbers::pi : s.spec().L1 * s.spec().L2;
  solve_system(A, sol.source, sol, opt, flat_area);
  return sol;
}

double flux_on_trap(const PDESolution& sol) {
  double f = 0.0;
  for (const auto& a : sol.arms) f -= a.coef * sol.u[a.node];
  return f;
}

std::vector<std::pair<double, double>> normal_derivative_profile(
    const PDESolution& sol, int n_angles) {
  const Surface& s = sol.surface;
  const double eps = sol.trap.eps;
  const double h = sol.spacing();
  const double s1 = 3.5 * h, s2 = 7.0 * h;
  const double r1 = std::log((eps + s1) / eps);
  const double r2 = std::log((eps + s2) / eps);
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < n_angles; ++k) {
    const double a = kTwoPi * k / n_angles;
    const Eigen::Vector2d e(std::cos(a), std::sin(a));
    const double u1 = sol.interpolate(s.chart_point(sol.trap.center, (eps + s1) * e));
    const double u2 = sol.interpolate(s.chart_point(sol.trap.center, (eps + s2) * e));
    // u = a rho + b rho^2 with rho = log((eps + s)/eps), u = 0 on the trap.
    const double coef = (u1 * r2 * r2 - u2 * r1 * r1) / (r1 * r2 * (r2 - r1));
    out.push_back({a, -coef / eps});
  }
  return out;
}

}  // namespace narrowcap
