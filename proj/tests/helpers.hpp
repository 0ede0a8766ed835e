#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "mkv/cloud.hpp"
#include "mkv/models.hpp"
#include "mkv/rng.hpp"
#include "mkv/time_grid.hpp"

namespace testing {

inline mkv::ModelCommon common(double tau, double T, mkv::InitLaw init = mkv::ConstantInit{},
                               mkv::MediaLaw media = mkv::PointMassMedia{{0.0}}, mkv::Diffusion h = {}) {
  mkv::ModelCommon c;
  c.tau = tau;
  c.T = T;
  c.init_law = init;
  c.media_law = media;
  c.diffusion = h;
  return c;
}

/// Small hand-rolled generator for property tests.
struct Gen {
  mkv::SplitMix64 g;
  explicit Gen(std::uint64_t seed) : g(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * mkv::uniform01(g); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(mkv::uniform01(g) * static_cast<double>(n)); }
  double normal() {
    const double u1 = 1.0 - mkv::uniform01(g);
    const double u2 = mkv::uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  std::vector<double> walk(std::size_t n, double step) {
    std::vector<double> v(n);
    double x = uniform(-1.0, 1.0);
    for (auto& e : v) {
      e = x;
      x += step * normal();
    }
    return v;
  }
};

/// Cloud of `n` random-walk paths with media drawn from `atoms` (or uniform in [-1, 1] when empty).
inline mkv::ParticleCloud random_cloud(const mkv::GridPtr& grid, std::size_t n, Gen& gen, double step = 0.1,
                                       const std::vector<double>& atoms = {}) {
  std::vector<double> values, media;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = gen.walk(grid->size(), step);
    values.insert(values.end(), p.begin(), p.end());
    media.push_back(atoms.empty() ? gen.uniform(-1.0, 1.0) : atoms[gen.index(atoms.size())]);
  }
  return mkv::ParticleCloud(grid, 1, std::move(values), std::move(media));
}

/// Dense tableau simplex for max c.x subject to A x <= b, x >= 0, b >= 0 (origin feasible).
/// Bland's rule, so it terminates on degenerate problems.
inline double simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c) {
  const std::size_t m = A.size(), n = c.size();
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
  constexpr double eps = 1e-12;
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == n + m) return t[m][n + m];
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps) {
        const double r = t[i][n + m] / t[i][enter];
        if (r < best - eps || (std::abs(r - best) <= eps && leave < m && basis[i] < basis[leave])) {
          best = r;
          leave = i;
        }
      }
    }
    if (leave == m) return std::numeric_limits<double>::infinity();
    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Dudley distance between uniform measures on na and nb atoms from a full distance
/// matrix, by the LP over (phi, L, B) with phi_i = psi_i - B and psi >= 0.
inline double bl_oracle(std::size_t na, std::size_t nb, const std::vector<double>& dist) {
  const std::size_t n = na + nb;
  const std::size_t L = n, B = n + 1, vars = n + 2;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> row(vars, 0.0);
      row[i] = 1.0;
      row[j] = -1.0;
      row[L] = -dist[i * n + j];
      A.push_back(row);
      b.push_back(0.0);
    }
    std::vector<double> row(vars, 0.0);
    row[i] = 1.0;
    row[B] = -2.0;
    A.push_back(row);
    b.push_back(0.0);
  }
  std::vector<double> budget(vars, 0.0);
  budget[L] = 1.0;
  budget[B] = 1.0;
  A.push_back(budget);
  b.push_back(1.0);
  std::vector<double> c(vars, 0.0);
  for (std::size_t i = 0; i < n; ++i) c[i] = i < na ? 1.0 / na : -1.0 / nb;
  return simplex_max(A, b, c);
}

/// Optimal assignment cost by enumerating permutations (n <= 8).
inline double brute_assignment(std::size_t n, const std::vector<double>& cost) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + p[i]];
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace testing
