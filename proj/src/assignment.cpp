#include "probagen/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "probagen/errors.hpp"

namespace probagen {

std::size_t levenshtein(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double normalized_levenshtein(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

TransportPlan min_cost_transport(std::span<const std::size_t> supply, std::span<const std::size_t> demand,
                                 const CostMatrix& cost) {
  const std::size_t R = supply.size();
  const std::size_t C = demand.size();
  if (cost.rows != R || cost.cols != C || cost.values.size() != R * C)
    throw InputError("cost matrix does not match supply/demand sizes");
  if (std::accumulate(supply.begin(), supply.end(), std::size_t{0}) !=
      std::accumulate(demand.begin(), demand.end(), std::size_t{0}))
    throw InputError("transport problem is unbalanced");
  for (double c : cost.values)
    if (!(c >= 0.0)) throw InputError("transport costs must be non-negative");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const std::size_t V = R + C;  // sources 0..R-1, sinks R..R+C-1

  std::vector<std::size_t> left(supply.begin(), supply.end());
  std::vector<std::size_t> need(demand.begin(), demand.end());
  std::vector<std::size_t> flow(R * C, 0);
  std::vector<double> potential(V, 0.0);
  std::vector<double> dist(V);
  std::vector<std::size_t> parent(V);
  std::vector<char> done(V);

  std::size_t remaining = std::accumulate(left.begin(), left.end(), std::size_t{0});
  while (remaining > 0) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < R; ++i)
      if (left[i] > 0) dist[i] = 0.0;

    // Dense Dijkstra on reduced costs, stopped at the first sink with demand.
    std::size_t target = kNone;
    while (true) {
      std::size_t u = kNone;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && dist[v] < kInf && (u == kNone || dist[v] < dist[u])) u = v;
      if (u == kNone) break;
      done[u] = 1;
      if (u < R) {
        for (std::size_t j = 0; j < C; ++j) {
          const std::size_t v = R + j;
          if (done[v]) continue;
          const double nd = std::max(dist[u], dist[u] + cost(u, j) + potential[u] - potential[v]);
          if (nd < dist[v]) {
            dist[v] = nd;
            parent[v] = u;
          }
        }
      } else {
        const std::size_t j = u - R;
        if (need[j] > 0) {
          target = u;
          break;
        }
        for (std::size_t i = 0; i < R; ++i) {
          if (done[i] || flow[i * C + j] == 0) continue;
          const double nd = std::max(dist[u], dist[u] - cost(i, j) + potential[u] - potential[i]);
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = u;
          }
        }
      }
    }
    if (target == kNone) throw Error("transport solver found no augmenting path");

    const double reach = dist[target];
    for (std::size_t v = 0; v < V; ++v) potential[v] += std::min(dist[v], reach);

    std::size_t amount = need[target - R];
    std::size_t v = target;
    while (parent[v] != kNone) {
      const std::size_t p = parent[v];
      if (p >= R) amount = std::min(amount, flow[v * C + (p - R)]);  // backward edge sink p -> source v
      v = p;
    }
    amount = std::min(amount, left[v]);

    left[v] -= amount;
    need[target - R] -= amount;
    remaining -= amount;
    v = target;
    while (parent[v] != kNone) {
      const std::size_t p = parent[v];
      if (p < R)
        flow[p * C + (v - R)] += amount;
      else
        flow[v * C + (p - R)] -= amount;
      v = p;
    }
  }

  TransportPlan plan;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j)
      if (flow[i * C + j] > 0) {
        plan.flows.push_back({i, j, flow[i * C + j]});
        plan.cost += static_cast<double>(flow[i * C + j]) * cost(i, j);
      }
  return plan;
}

double assignment_cost(const CostMatrix& cost) {
  if (cost.rows != cost.cols) throw InputError("assignment needs a square cost matrix");
  std::vector<std::size_t> ones(cost.rows, 1);
  return min_cost_transport(ones, ones, cost).cost;
}

}  // namespace probagen
