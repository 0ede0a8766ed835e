#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mkv {

struct TransportEntry {
  std::size_t row;
  std::size_t col;
  double mass;
};

/// Optimal plan between the uniform measure on n rows and the uniform measure on
/// m columns, with dual potentials satisfying u_i + v_j <= c_ij.
struct TransportPlan {
  std::vector<TransportEntry> entries;
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  double cost = 0.0;
};

/// Hungarian method for the square case (n == m, each row matched to one column).
TransportPlan solve_assignment(std::size_t n, std::span<const double> cost);

/// Successive shortest paths with Dijkstra on reduced costs. Integer masses
/// m/g per row and n/g per column, g = gcd(n, m). Costs must be >= 0.
TransportPlan solve_transport_ssp(std::size_t n, std::size_t m, std::span<const double> cost);

/// Dispatches to solve_assignment when n == m.
TransportPlan solve_uniform_transport(std::size_t n, std::size_t m, std::span<const double> cost);

}  // namespace mkv
