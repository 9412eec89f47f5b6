#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lorentz_ot/geometry.hpp"
#include "lorentz_ot/measures.hpp"
#include "lorentz_ot/transport.hpp"

namespace lorentz_ot {

struct GeometryCheck {
  bool ok = true;
  std::optional<std::pair<Index, Index>> violating_pair;
};

/// No ordered pair of points is timelike related.
GeometryCheck achronal_check(const SpacetimeModel& model, std::span<const Event> points);

/// Pairwise |Δt| ≤ (1 − eps)·a(t̄)·|Δx|, t̄ the mean time of the pair. Repeated
/// spatial projections throw InvalidInput.
GeometryCheck spacelike_check(const SpacetimeModel& model, std::span<const Event> points, double eps);

struct SplitWitness {
  Index source = 0;
  Index target1 = 0;
  Index target2 = 0;
};

struct MongeResult {
  bool is_map = false;
  std::vector<Index> map;  // map[i] = target of source i when is_map
  std::optional<SplitWitness> witness;
  bool supports_disjoint = true;
  CostMatrix cost;
  TransportPlan plan;
};

/// Solves the plan and reads off a map when every row has a single entry
/// above 1e-10 times its row sum.
MongeResult monge_solve(const SpacetimeModel& model, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct UniquenessProbe {
  bool unique = true;
  int trials = 0;
  Eigen::MatrixXd first;   // coupling of the unpermuted solve
  std::optional<Eigen::MatrixXd> second;  // a different optimal coupling
  double first_cost = 0.0;
  double second_cost = 0.0;
};

/// Re-solves under `trials` random row/column permutations of the instance
/// and compares supports in the original indexing.
UniquenessProbe uniqueness_probe(const SpacetimeModel& model, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, int trials, std::uint64_t seed);

struct DoubleIntersection {
  Index source = 0;
  Index target1 = 0;
  Index target2 = 0;
  double defect = 0.0;  // angle between the initial tangents towards both targets
};

std::vector<DoubleIntersection> double_intersection_scan(const SpacetimeModel& model, const DiscreteMeasure& mu,
                                                         const DiscreteMeasure& nu, const TransportPlan& plan);

/// Fraction of source atoms whose row has more than one positive entry.
double split_fraction(const TransportPlan& plan);

}  // namespace lorentz_ot
