#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace lorentz_ot::network {

inline constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max() / 4;

struct Arc {
  int to;
  int reverse;  // index of the paired arc in adjacency[to]
  std::int64_t capacity;
  std::int64_t cost;
  std::int64_t flow = 0;

  std::int64_t residual() const { return capacity - flow; }
};

/// Residual network with paired forward/backward arcs. Arcs are scanned in
/// insertion order, which fixes every tie-break.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : adjacency_(static_cast<std::size_t>(nodes)) {}

  int nodes() const { return static_cast<int>(adjacency_.size()); }

  /// Returns (from, position) of the forward arc.
  std::pair<int, int> add_arc(int from, int to, std::int64_t capacity, std::int64_t cost = 0);

  const Arc& arc(std::pair<int, int> handle) const {
    return adjacency_[static_cast<std::size_t>(handle.first)][static_cast<std::size_t>(handle.second)];
  }
  const std::vector<Arc>& out(int node) const { return adjacency_[static_cast<std::size_t>(node)]; }

  /// Dinic max-flow. Returns the total flow value pushed (added to existing flow).
  std::int64_t max_flow(int source, int sink);

  /// Nodes reachable from `source` in the residual network.
  std::vector<bool> residual_reachable(int source) const;

  /// Successive shortest paths with Johnson potentials; sends up to `amount`
  /// units from source to sink at minimum cost. Negative arc costs are allowed
  /// provided the initial network has no negative cycle.
  struct MinCostResult {
    std::int64_t flow = 0;
    std::int64_t cost = 0;
  };
  MinCostResult min_cost_flow(int source, int sink, std::int64_t amount);

 private:
  bool build_levels(int source, int sink);
  std::int64_t push(int node, int sink, std::int64_t limit);

  std::vector<std::vector<Arc>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

}  // namespace lorentz_ot::network
