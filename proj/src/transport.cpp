#include "mkv/transport.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

#include "mkv/error.hpp"

namespace mkv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TransportPlan solve_assignment(std::size_t n, std::span<const double> cost) {
  if (n == 0 || cost.size() != n * n) throw Error(ErrorCode::SizeMismatch, "assignment cost matrix");
  // 1-based potentials; column 0 is the virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      const double* row = cost.data() + (i0 - 1) * n;
      const double ui0 = u[i0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - ui0 - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw Error(ErrorCode::Internal, "assignment: no augmenting column");
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  TransportPlan plan;
  plan.row_potential.assign(u.begin() + 1, u.end());
  plan.col_potential.assign(v.begin() + 1, v.end());
  const double mass = 1.0 / static_cast<double>(n);
  plan.entries.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j] - 1;
    plan.entries.push_back({i, j - 1, mass});
  }
  std::sort(plan.entries.begin(), plan.entries.end(),
            [](const TransportEntry& a, const TransportEntry& b) { return a.row < b.row; });
  double total = 0.0;
  for (const auto& e : plan.entries) total += cost[e.row * n + e.col];
  plan.cost = total * mass;
  return plan;
}

TransportPlan solve_transport_ssp(std::size_t n, std::size_t m, std::span<const double> cost) {
  if (n == 0 || m == 0 || cost.size() != n * m) throw Error(ErrorCode::SizeMismatch, "transport cost matrix");
  const std::size_t g = std::gcd(n, m);
  const std::int64_t row_supply = static_cast<std::int64_t>(m / g);
  const std::int64_t col_demand = static_cast<std::int64_t>(n / g);
  const std::size_t nodes = n + m;

  std::vector<std::int64_t> supply(n, row_supply), demand(m, col_demand);
  std::vector<std::int64_t> flow(n * m, 0);
  std::vector<std::vector<std::size_t>> carriers(m);  // rows with positive flow into column j
  std::vector<double> pot(nodes, 0.0), dist(nodes);
  std::vector<std::size_t> prev(nodes);
  std::vector<char> done(nodes);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::int64_t remaining = row_supply * static_cast<std::int64_t>(n);
  while (remaining > 0) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (supply[i] > 0) dist[i] = 0.0;
    }
    std::size_t target = kNone;
    double reach = 0.0;
    for (;;) {
      std::size_t u = kNone;
      double best = kInf;
      for (std::size_t k = 0; k < nodes; ++k) {
        if (!done[k] && dist[k] < best) {
          best = dist[k];
          u = k;
        }
      }
      if (u == kNone) throw Error(ErrorCode::Internal, "transport: sink unreachable");
      done[u] = 1;
      if (u >= n && demand[u - n] > 0) {
        target = u;
        reach = best;
        break;
      }
      if (u < n) {
        const double* row = cost.data() + u * m;
        const double base = best + pot[u];
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t w = n + j;
          if (done[w]) continue;
          const double nd = base + row[j] - pot[w];
          if (nd < dist[w]) {
            dist[w] = nd;
            prev[w] = u;
          }
        }
      } else {
        const std::size_t j = u - n;
        const double base = best + pot[u];
        for (std::size_t i : carriers[j]) {
          if (done[i]) continue;
          const double nd = std::max(best, base - cost[i * m + j] - pot[i]);
          if (nd < dist[i]) {
            dist[i] = nd;
            prev[i] = u;
          }
        }
      }
    }
    for (std::size_t k = 0; k < nodes; ++k) pot[k] += done[k] ? dist[k] : reach;

    // Bottleneck along the path: start supply, end demand and reverse-arc flows.
    std::int64_t push = demand[target - n];
    std::size_t w = target;
    while (prev[w] != kNone) {
      const std::size_t p = prev[w];
      if (p >= n) push = std::min(push, flow[w * m + (p - n)]);  // reverse arc p(col) -> w(row)
      w = p;
    }
    push = std::min(push, supply[w]);
    supply[w] -= push;
    demand[target - n] -= push;
    w = target;
    while (prev[w] != kNone) {
      const std::size_t p = prev[w];
      if (p < n) {
        const std::size_t j = w - n;
        if (flow[p * m + j] == 0) carriers[j].push_back(p);
        flow[p * m + j] += push;
      } else {
        const std::size_t j = p - n;
        flow[w * m + j] -= push;
        if (flow[w * m + j] == 0) {
          auto& c = carriers[j];
          c.erase(std::find(c.begin(), c.end(), w));
        }
      }
      w = p;
    }
    remaining -= push;
  }

  TransportPlan plan;
  const double total = static_cast<double>(row_supply) * static_cast<double>(n);
  plan.row_potential.resize(n);
  plan.col_potential.resize(m);
  for (std::size_t i = 0; i < n; ++i) plan.row_potential[i] = -pot[i];
  for (std::size_t j = 0; j < m; ++j) plan.col_potential[j] = pot[n + j];
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::int64_t f = flow[i * m + j];
      if (f > 0) {
        const double mass = static_cast<double>(f) / total;
        plan.entries.push_back({i, j, mass});
        c += mass * cost[i * m + j];
      }
    }
  }
  plan.cost = c;
  return plan;
}

TransportPlan solve_uniform_transport(std::size_t n, std::size_t m, std::span<const double> cost) {
  if (n == m) return solve_assignment(n, cost);
  return solve_transport_ssp(n, m, cost);
}

}  // namespace mkv
