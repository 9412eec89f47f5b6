#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lorentz_ot/geometry.hpp"
#include "lorentz_ot/measures.hpp"
#include "lorentz_ot/transport.hpp"

namespace lorentz_ot {

struct CoupledPath {
  Geodesic path;
  double mass = 0.0;
  std::int64_t count = 0;  // mass = count / denominator
  Index source = 0;
  Index target = 0;
};

/// Finitely many minimizers with masses; (ev_0, ev_1) pushes forward to the
/// lifted plan. Paths are stored in row-major (source, target) order.
struct DynamicalCoupling {
  std::shared_ptr<const SpacetimeModel> model;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  std::vector<CoupledPath> paths;
  std::int64_t denominator = 1;

  double total_mass() const;
};

/// One geodesic per support pair of the plan.
DynamicalCoupling lift(const TransportPlan& plan, const SpacetimeModel& model, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu);

/// μ_s = (ev_s)_♯Π. Coincident atoms are merged; s = 0 and s = 1 return μ and ν.
DiscreteMeasure interpolate(const DynamicalCoupling& dc, double s);

struct RestrictedPlan {
  DiscreteMeasure from;
  DiscreteMeasure to;
  CostMatrix cost;
  TransportPlan plan;  // (ev_s, ev_t)_♯Π; no duals
};

/// Coupling of μ_s and μ_t induced by the paths, with its cost re-evaluated
/// from c_L between the intermediate events.
RestrictedPlan restrict_to(const DynamicalCoupling& dc, double s, double t);

/// Paths in `subset`, masses renormalized; marginals rebuilt from the subset.
DynamicalCoupling sub_coupling(const DynamicalCoupling& dc, std::span<const std::size_t> subset);

struct RegularityReport {
  double max_ratio = 0.0;        // max dir² / pos over pairs with pos ≥ 1e-9
  double fitted_exponent = 0.0;  // 0 when degenerate
  double fitted_constant = 0.0;
  std::int64_t crossings = 0;    // pos < 1e-9 with dir > 1e-6
  double eps_time = 0.0;
  bool degenerate = false;
  std::int64_t pairs = 0;
  std::int64_t envelope_points = 0;
  double max_speed_ratio = 0.0;  // max |v| / v0 over tested tangents
};

/// Pairwise position/direction gaps at the given parameters. The exponent is
/// the log-log least-squares slope through the upper envelope of direction
/// gap against position gap (running maxima in increasing position gap).
RegularityReport regularity_at(const DynamicalCoupling& dc, std::span<const double> times);

/// regularity_at on `grid` equally spaced times in [eps_time, 1 − eps_time].
/// Marginal supports must be disjoint.
RegularityReport regularity_report(const DynamicalCoupling& dc, double eps_time, int grid = 9);

struct HolderExperiment {
  DynamicalCoupling coupling;
  RegularityReport report;
  bool unique_matching = false;
  double t_star = 0.5;
};

/// Near-cancellation construction in 1+2: sources (0, x_i, 0), targets on the
/// unit circle around them at t = 1, angle π/2 + (x_i − 0.1)/t*. Sources are
/// x_i = 0.1 + t*·u_i with u_0 = 0 and N − 1 stratified log-uniform offsets in
/// [1e-3, 0.2]. Throws Error when the diagonal is not the unique matching.
HolderExperiment holder_sharpness_experiment(int n, std::uint64_t seed);

/// Strictly timelike 1+1 instance: sorted uniform sources on [0, 1] at t = 0,
/// targets 1.2·x + 0.1 at t = 1. Tangent speeds stay ≤ 0.3.
HolderExperiment lipschitz_interior_experiment(int n, std::uint64_t seed);

struct ShorteningGain {
  bool applicable = false;
  double gain = 0.0;
  double dir_gap = 0.0;  // angle between the tangents at b
};

/// [c(g1(0), g2(1)) + c(g2(0), g1(1))] − [c(g1(0), g1(1)) + c(g2(0), g2(1))].
/// Not applicable unless g2(1) ∈ J^+(g1(0)) and g1(1) ∈ J^+(g2(0)).
ShorteningGain shortening_gain(const SpacetimeModel& model, const Geodesic& g1, const Geodesic& g2, double b);

struct CrossingExperiment {
  std::vector<ShorteningGain> samples;
  std::int64_t negative = 0;
  double kappa = 0.0;  // least-squares fit of −gain ≈ κ·dir_gap²
  double crossed_nulls_gain = 0.0;
};

/// Random transversal crossings of timelike segments in Minkowski 1+2 plus the
/// crossed-nulls pair (0,−1)→(2,1), (0,1)→(2,−1) in 1+1.
CrossingExperiment crossing_experiment(int count, std::uint64_t seed);

}  // namespace lorentz_ot
