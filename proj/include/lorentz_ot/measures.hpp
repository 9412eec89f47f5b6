#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lorentz_ot/geometry.hpp"

namespace lorentz_ot {

/// Finitely supported probability measure. Points are pairwise distinct and
/// share one spatial dimension; weights are positive and sum to 1.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  const std::vector<Event>& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Index size() const { return static_cast<Index>(points_.size()); }
  Index spatial_dim() const { return points_.empty() ? 0 : points_.front().spatial_dim(); }
  double total_mass() const { return weights_.sum(); }

  friend DiscreteMeasure make_measure(std::vector<Event> points, std::vector<double> weights);
  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b);

 private:
  std::vector<Event> points_;
  Eigen::VectorXd weights_;
};

/// Validates and normalizes. Weights already summing to 1 within 1e-12 are kept
/// bit-for-bit; otherwise they are divided by their sum.
DiscreteMeasure make_measure(std::vector<Event> points, std::vector<double> weights);

bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b);
inline bool operator!=(const DiscreteMeasure& a, const DiscreteMeasure& b) { return !(a == b); }

/// Weights written as counts over a shared denominator: w_i = counts[i] / denominator.
struct IntegerWeights {
  std::vector<std::int64_t> counts;
  std::int64_t denominator = 1;
};

/// Exact counts over `denominator`; throws RationalizationError (with a
/// continued-fraction suggestion) when some w_i·N is not within 1e-9 of an integer.
IntegerWeights to_counts(const DiscreteMeasure& m, std::int64_t denominator);

/// Smallest common denominator ≤ max_denominator found from the continued
/// fraction convergents of every weight; 0 if none exists.
std::int64_t suggest_denominator(std::span<const double> weights,
                                 std::int64_t max_denominator = 1'000'000);

/// Counting form: x_i repeated α_i times, where w_i = α_i / N.
std::vector<Event> expand_uniform(const DiscreteMeasure& m, std::int64_t denominator);

/// Inverse of expand_uniform: merges repeated points, weight = multiplicity / size.
DiscreteMeasure aggregate(std::span<const Event> counted);

/// Counts for μ and ν over one shared denominator ≤ max_denominator. When no
/// exact denominator exists within the bound, weights are rounded onto
/// max_denominator by largest remainder (`exact` is then false).
struct SharedCounts {
  IntegerWeights source;
  IntegerWeights target;
  bool exact = true;
};
SharedCounts shared_counts(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           std::int64_t max_denominator = 1'000'000);

}  // namespace lorentz_ot
