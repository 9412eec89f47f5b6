#include "lorentz_ot/network.hpp"

#include <algorithm>
#include <deque>

#include "lorentz_ot/errors.hpp"

namespace lorentz_ot::network {

std::pair<int, int> FlowNetwork::add_arc(int from, int to, std::int64_t capacity, std::int64_t cost) {
  auto& fwd = adjacency_[static_cast<std::size_t>(from)];
  auto& bwd = adjacency_[static_cast<std::size_t>(to)];
  const int pos = static_cast<int>(fwd.size());
  const int rev = static_cast<int>(bwd.size()) + (from == to ? 1 : 0);
  fwd.push_back(Arc{to, rev, capacity, cost, 0});
  bwd.push_back(Arc{from, pos, 0, -cost, 0});
  return {from, pos};
}

bool FlowNetwork::build_levels(int source, int sink) {
  level_.assign(adjacency_.size(), -1);
  std::deque<int> queue{source};
  level_[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Arc& a : adjacency_[static_cast<std::size_t>(u)]) {
      if (a.residual() > 0 && level_[static_cast<std::size_t>(a.to)] < 0) {
        level_[static_cast<std::size_t>(a.to)] = level_[static_cast<std::size_t>(u)] + 1;
        queue.push_back(a.to);
      }
    }
  }
  return level_[static_cast<std::size_t>(sink)] >= 0;
}

std::int64_t FlowNetwork::push(int node, int sink, std::int64_t limit) {
  if (node == sink) return limit;
  auto& arcs = adjacency_[static_cast<std::size_t>(node)];
  for (std::size_t& i = cursor_[static_cast<std::size_t>(node)]; i < arcs.size(); ++i) {
    Arc& a = arcs[i];
    if (a.residual() <= 0 || level_[static_cast<std::size_t>(a.to)] != level_[static_cast<std::size_t>(node)] + 1)
      continue;
    const std::int64_t pushed = push(a.to, sink, std::min(limit, a.residual()));
    if (pushed > 0) {
      a.flow += pushed;
      adjacency_[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.reverse)].flow -= pushed;
      return pushed;
    }
  }
  return 0;
}

std::int64_t FlowNetwork::max_flow(int source, int sink) {
  std::int64_t total = 0;
  while (build_levels(source, sink)) {
    cursor_.assign(adjacency_.size(), 0);
    while (const std::int64_t pushed = push(source, sink, kUnbounded)) total += pushed;
  }
  return total;
}

std::vector<bool> FlowNetwork::residual_reachable(int source) const {
  std::vector<bool> seen(adjacency_.size(), false);
  std::deque<int> queue{source};
  seen[static_cast<std::size_t>(source)] = true;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Arc& a : adjacency_[static_cast<std::size_t>(u)]) {
      if (a.residual() > 0 && !seen[static_cast<std::size_t>(a.to)]) {
        seen[static_cast<std::size_t>(a.to)] = true;
        queue.push_back(a.to);
      }
    }
  }
  return seen;
}

FlowNetwork::MinCostResult FlowNetwork::min_cost_flow(int source, int sink, std::int64_t amount) {
  const std::size_t n = adjacency_.size();
  constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max() / 4;

  // Initial potentials by Bellman–Ford over arcs with residual capacity.
  std::vector<std::int64_t> potential(n, kFar);
  potential[static_cast<std::size_t>(source)] = 0;
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (potential[u] == kFar) continue;
      for (const Arc& a : adjacency_[u]) {
        if (a.residual() > 0 && potential[u] + a.cost < potential[static_cast<std::size_t>(a.to)]) {
          potential[static_cast<std::size_t>(a.to)] = potential[u] + a.cost;
          changed = true;
        }
      }
    }
    if (!changed) break;
    if (round + 1 == n) throw NumericalFailure("negative cycle in min-cost flow network", 0.0);
  }
  for (auto& p : potential)
    if (p == kFar) p = 0;

  MinCostResult result;
  std::vector<std::int64_t> dist(n);
  std::vector<int> prev_node(n);
  std::vector<int> prev_arc(n);
  std::vector<bool> done(n);
  while (result.flow < amount) {
    // Dense Dijkstra on reduced costs; ties go to the lowest node index.
    std::fill(dist.begin(), dist.end(), kFar);
    std::fill(done.begin(), done.end(), false);
    dist[static_cast<std::size_t>(source)] = 0;
    for (;;) {
      int u = -1;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && dist[v] < kFar && (u < 0 || dist[v] < dist[static_cast<std::size_t>(u)]))
          u = static_cast<int>(v);
      if (u < 0) break;
      done[static_cast<std::size_t>(u)] = true;
      const auto& arcs = adjacency_[static_cast<std::size_t>(u)];
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        const Arc& a = arcs[i];
        if (a.residual() <= 0) continue;
        const auto to = static_cast<std::size_t>(a.to);
        const std::int64_t reduced = a.cost + potential[static_cast<std::size_t>(u)] - potential[to];
        const std::int64_t candidate = dist[static_cast<std::size_t>(u)] + reduced;
        if (candidate < dist[to]) {
          dist[to] = candidate;
          prev_node[to] = u;
          prev_arc[to] = static_cast<int>(i);
        }
      }
    }
    if (dist[static_cast<std::size_t>(sink)] >= kFar) break;
    for (std::size_t v = 0; v < n; ++v)
      if (dist[v] < kFar) potential[v] += dist[v];

    std::int64_t bottleneck = amount - result.flow;
    for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
      const Arc& a = adjacency_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                               [static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
      bottleneck = std::min(bottleneck, a.residual());
    }
    for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
      Arc& a = adjacency_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                         [static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
      a.flow += bottleneck;
      adjacency_[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.reverse)].flow -= bottleneck;
      result.cost += bottleneck * a.cost;
    }
    result.flow += bottleneck;
  }
  return result;
}

}  // namespace lorentz_ot::network
