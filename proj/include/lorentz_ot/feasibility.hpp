#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lorentz_ot/errors.hpp"
#include "lorentz_ot/geometry.hpp"
#include "lorentz_ot/measures.hpp"

namespace lorentz_ot {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// adjacency(i, j) ⇔ y_j ∈ J^+(x_i), possibly after ε-fattening.
struct CausalRelation {
  BoolMatrix adjacency;
  double epsilon = 0.0;

  Index rows() const { return adjacency.rows(); }
  Index cols() const { return adjacency.cols(); }

  /// J^+(A) for a set of source indices, sorted.
  std::vector<Index> future_of(std::span<const Index> sources) const;
  /// J^−(B) for a set of target indices, sorted.
  std::vector<Index> past_of(std::span<const Index> targets) const;
};

enum class Side { source, target };
const char* to_string(Side side);

/// A or B in the Hall condition that fails: ν(J^+(A)) < μ(A) or μ(J^−(B)) < ν(B).
struct ViolatingSet {
  Side side = Side::source;
  std::vector<Index> indices;  // sorted, 0-based
};

/// μ and ν are not J-related.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, ViolatingSet set) : Error(what), set_(std::move(set)) {}
  const ViolatingSet& violating_set() const { return set_; }

 private:
  ViolatingSet set_;
};

struct FeasibilityVerdict {
  bool related = false;
  /// Coupling with π(J) = 1 when related; entries are counts / denominator.
  std::optional<Eigen::MatrixXd> witness_coupling;
  std::optional<CountMatrix> witness_counts;
  std::int64_t denominator = 1;
  std::optional<ViolatingSet> violating_set;
};

/// adjacency(i, j) = cost(x_i, y_j) < ∞, or for ε > 0 the target shifted by
/// ±ε along ∂t is causally reachable (temporal surrogate for the ε-fattening).
CausalRelation build_relation(const SpacetimeModel& model, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, double epsilon = 0.0);

/// Exhaustive Hall check over all 2^m source subsets, then all 2^n target
/// subsets, in exact integer arithmetic. Supports are limited to 20 atoms.
std::optional<ViolatingSet> hall_bruteforce(const CausalRelation& rel, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu);

/// Max-flow decision on the counting form with a witness coupling or a
/// min-cut violating set.
FeasibilityVerdict j_related(const CausalRelation& rel, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu);

struct PermutationResult {
  /// sigma[i] = column matched to row i, when a perfect matching exists.
  std::optional<std::vector<Index>> permutation;
  /// Rows R with |N(R)| < |R| otherwise (König witness).
  std::vector<Index> deficient_rows;
  std::vector<Index> deficient_neighbours;
};

/// Augmenting-path perfect matching on a square counting relation, trying
/// columns in increasing order.
PermutationResult extract_permutation(const CausalRelation& rel);

/// True when `sigma` is the only perfect matching contained in the relation
/// (no alternating cycle).
bool is_unique_perfect_matching(const CausalRelation& rel, std::span<const Index> sigma);

struct Subproblem {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  CausalRelation relation;
  std::vector<Index> source_indices;  // into the parent μ
  std::vector<Index> target_indices;  // into the parent ν
};

struct TightSplit {
  Subproblem inside;   // (μ|A, ν|J^+(A)) / μ(A)
  Subproblem outside;  // (μ|A^c, ν|J^+(A)^c) / μ(A^c)
};

/// Splits along a tight source set A with 0 < μ(A) = ν(J^+(A)) < 1.
TightSplit tight_split(const CausalRelation& rel, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, std::span<const Index> source_set);

}  // namespace lorentz_ot
