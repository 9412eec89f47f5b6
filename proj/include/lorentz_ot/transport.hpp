#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "lorentz_ot/feasibility.hpp"
#include "lorentz_ot/geometry.hpp"
#include "lorentz_ot/measures.hpp"

namespace lorentz_ot {

/// Extended-real cost c_L(x_i, y_j); +∞ exactly where `admissible` is false.
struct CostMatrix {
  Eigen::MatrixXd cost;
  BoolMatrix admissible;

  Index rows() const { return cost.rows(); }
  Index cols() const { return cost.cols(); }
  CausalRelation relation() const { return CausalRelation{admissible, 0.0}; }
};

CostMatrix cost_matrix(const SpacetimeModel& model, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct TransportPlan {
  Eigen::MatrixXd coupling;
  /// coupling = counts / denominator on the expanded integer form.
  CountMatrix counts;
  std::int64_t denominator = 1;
  double primal_cost = 0.0;
  double dual_value = 0.0;
  /// Potentials with φ_j − ψ_i ≤ c_ij; empty for plans without duals.
  Eigen::VectorXd psi;
  Eigen::VectorXd phi;

  bool has_duals() const { return psi.size() > 0; }
  /// Support pairs (i, j) with positive mass, row-major.
  std::vector<std::pair<Index, Index>> support() const;
};

/// Cost resolution of the integer min-cost flow.
inline constexpr double kCostResolution = 1e-9;

/// Min-cost flow on the expanded form with duals from the final residual
/// network, normalized so that ψ_0 = 0. Throws InfeasibleError when μ and ν
/// are not related under the mask.
TransportPlan solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c);

/// Exact minimum over all N! permutations of the expanded uniform form
/// (N ≤ 8). An infeasible instance returns primal_cost = +∞ and an empty coupling.
TransportPlan brute_force_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c);

/// Σ π_ij c_ij over the support.
double plan_cost(const Eigen::MatrixXd& coupling, const CostMatrix& c);

struct DualCheck {
  double max_violation = 0.0;      // max over admissible (i,j) of φ_j − ψ_i − c_ij
  double max_slack_on_support = 0.0;  // max over support of |φ_j − ψ_i − c_ij|
};
DualCheck check_duals(const TransportPlan& plan, const CostMatrix& c);

struct MonotonicityReport {
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  /// min over sampled cycles of Σ c(x_i, y_σ(i)) − Σ c(x_i, y_i); +∞ if none finite.
  double worst_margin = kInfinity;
};

/// Samples cycles of 2..k_max distinct support pairs and checks that the
/// cyclic shift does not lower the cost beyond 1e-9.
MonotonicityReport check_cyclical_monotonicity(const TransportPlan& plan, const CostMatrix& c, int k_max,
                                               std::int64_t trials, std::uint64_t seed);

}  // namespace lorentz_ot
