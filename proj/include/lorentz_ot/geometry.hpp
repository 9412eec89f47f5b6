#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lorentz_ot {

using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Relative tolerance for deciding that a vector or a pair of events sits on
/// the cone boundary.
inline constexpr double kNullTolerance = 1e-9;

/// Number of samples stored per geodesic, on a uniform s-grid over [0, 1].
inline constexpr int kGeodesicSamples = 65;

/// A point of R×N in splitting coordinates: t is the temporal function.
struct Event {
  double t = 0.0;
  Eigen::VectorXd x;

  Event() = default;
  Event(double time, Eigen::VectorXd space) : t(time), x(std::move(space)) {}

  Index spatial_dim() const { return x.size(); }
  bool is_finite() const { return std::isfinite(t) && x.allFinite(); }

  /// (t, x1, ..., xd).
  Eigen::VectorXd coords() const;
  static Event from_coords(const Eigen::Ref<const Eigen::VectorXd>& c);
};

bool operator==(const Event& a, const Event& b);
inline bool operator!=(const Event& a, const Event& b) { return !(a == b); }

/// Tangent vector (v0, v) at `base`; v0 is the dτ-component.
struct Tangent {
  Event base;
  double v0 = 0.0;
  Eigen::VectorXd v;

  Eigen::VectorXd components() const;
  bool is_zero() const { return v0 == 0.0 && (v.size() == 0 || v.isZero(0.0)); }
};

/// Euclidean unit representative of a future-pointing tangent line.
struct Direction {
  Eigen::VectorXd unit;

  static Direction of(const Tangent& w);
};

/// Angle in [0, π] between two directions, computed as 2·atan2(|a−b|, |a+b|).
double angle_between(const Direction& a, const Direction& b);

enum class CausalType { timelike, null, non_causal };
const char* to_string(CausalType type);

// Fiber kernels. Templated on the Eigen expression so they work with
// fixed-size, mapped, and autodiff-style scalars alike.

/// 𝕃(v0, v) = v0² − a²|v|² for the flat-slice metric with scale factor a.
template <typename Derived>
typename Derived::Scalar lorentz_quadratic(typename Derived::Scalar v0,
                                           const Eigen::MatrixBase<Derived>& v,
                                           typename Derived::Scalar scale) {
  return v0 * v0 - scale * scale * v.squaredNorm();
}

/// L_τ(v) = L(∂t + v) = −√(1 − a²|v|²), +∞ outside the closed disc a|v| ≤ 1.
template <typename Derived>
typename Derived::Scalar fiber_lagrangian(const Eigen::MatrixBase<Derived>& v,
                                          typename Derived::Scalar scale) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  const Scalar q = lorentz_quadratic(Scalar(1), v, scale);
  if (q < Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return -sqrt(q);
}

enum class ModelKind { minkowski, robertson_walker };
const char* to_string(ModelKind kind);

struct Geodesic;

/// A globally hyperbolic spacetime R×N with metric −dt² + a(t)²|dx|²
/// (signature written as 𝕃 = v0² − a²|v|²). Minkowski is a ≡ 1.
///
/// Models are immutable. Create them through make_minkowski /
/// make_robertson_walker so geodesics can keep a shared reference.
class SpacetimeModel : public std::enable_shared_from_this<SpacetimeModel> {
 public:
  virtual ~SpacetimeModel() = default;

  virtual ModelKind kind() const = 0;
  Index spatial_dim() const { return spatial_dim_; }
  Index dim() const { return 1 + spatial_dim_; }

  virtual double scale_factor(double t) const = 0;
  /// da/dt; right derivative where a is only piecewise smooth.
  virtual double scale_rate(double t) const = 0;
  /// Coordinate distance covered by a null curve from τ=t0 to τ=t1 (∫ dt/a).
  virtual double horizon(double t0, double t1) const = 0;

  /// 𝕃 at the tangent's base point.
  double quadratic(const Tangent& w) const;

  /// Causal character of the pair: timelike / null when q ∈ J^+(p) (p == q
  /// counts as null), non_causal otherwise.
  CausalType relation(const Event& p, const Event& q) const;
  bool precedes(const Event& p, const Event& q) const {
    return relation(p, q) != CausalType::non_causal;
  }

  /// S(p, q): minimal action over causal curves, +∞ off J^+.
  virtual double minimal_action(const Event& p, const Event& q) const = 0;
  virtual Geodesic geodesic(const Event& p, const Event& q) const = 0;

  void check_event(const Event& e) const;

 protected:
  explicit SpacetimeModel(Index spatial_dim);

 private:
  Index spatial_dim_;
};

class MinkowskiModel final : public SpacetimeModel {
 public:
  explicit MinkowskiModel(Index spatial_dim) : SpacetimeModel(spatial_dim) {}

  ModelKind kind() const override { return ModelKind::minkowski; }
  double scale_factor(double) const override { return 1.0; }
  double scale_rate(double) const override { return 0.0; }
  double horizon(double t0, double t1) const override { return t1 - t0; }
  double minimal_action(const Event& p, const Event& q) const override;
  Geodesic geodesic(const Event& p, const Event& q) const override;
};

/// Flat Robertson–Walker model; a(t) is linearly interpolated from a table of
/// (t, a) samples and held constant outside the table.
class RobertsonWalkerModel final : public SpacetimeModel {
 public:
  RobertsonWalkerModel(Index spatial_dim, std::vector<std::pair<double, double>> table);

  ModelKind kind() const override { return ModelKind::robertson_walker; }
  double scale_factor(double t) const override;
  double scale_rate(double t) const override;
  double horizon(double t0, double t1) const override;
  double minimal_action(const Event& p, const Event& q) const override;
  Geodesic geodesic(const Event& p, const Event& q) const override;

  const std::vector<std::pair<double, double>>& table() const { return table_; }

 private:
  std::vector<std::pair<double, double>> table_;
};

std::shared_ptr<const SpacetimeModel> make_minkowski(Index spatial_dim);
std::shared_ptr<const SpacetimeModel> make_robertson_walker(
    Index spatial_dim, std::vector<std::pair<double, double>> table);

struct GeodesicSample {
  double s = 0.0;
  Event event;
  Tangent tangent;  // derivative with respect to s
};

/// Action minimizer parameterized so that dτ(γ̇) is constant: s ∈ [0, 1] maps
/// affinely onto [τ(p), τ(q)].
struct Geodesic {
  std::shared_ptr<const SpacetimeModel> model;  // may be null for unshared models
  Event start;
  Event end;
  std::vector<GeodesicSample> samples;
  double action = 0.0;
  /// |integrated endpoint − q| before the last sample was pinned to q.
  double endpoint_residual = 0.0;

  /// Cubic Hermite interpolation through the stored samples; exact at the
  /// samples and for affine segments.
  Event at(double s) const;
  Tangent tangent_at(double s) const;
  Direction direction_at(double s) const { return Direction::of(tangent_at(s)); }
};

CausalType classify(const SpacetimeModel& model, const Tangent& w);

/// c_L(p, q): −(maximal proper time) on J^+(p), +∞ elsewhere.
double cost(const SpacetimeModel& model, const Event& p, const Event& q);

double minimal_action(const SpacetimeModel& model, const Event& p, const Event& q);

Geodesic geodesic(const SpacetimeModel& model, const Event& p, const Event& q);

/// State of the Euler–Lagrange flow of L_τ: time, position, spatial velocity.
struct FlowState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd v;
};

/// One classical RK4 step of size h of the Euler–Lagrange flow of L_τ.
FlowState el_flow(const SpacetimeModel& model, const FlowState& state, double h);

struct FlowConservation {
  /// max |𝕃 − 𝕃(0)| along the affinely parameterized geodesic of 𝕃 started
  /// from the same tangent line.
  double lagrangian_drift = 0.0;
  /// |x_affine(t_end) − x_flow(t_end)|: the graph of the Φ_τ trajectory
  /// against the independently integrated 𝕃-geodesic.
  double graph_gap = 0.0;
  /// max |1 − a|v|| along Φ_τ; only meaningful for null initial data.
  double boundary_defect = 0.0;
};

/// Integrates Φ_τ from `initial` over `duration` in `steps` steps and checks
/// it against the second-order geodesic equations of 𝕃.
FlowConservation flow_conservation(const SpacetimeModel& model, const FlowState& initial,
                                   double duration, int steps);

/// ∂²_v L_τ at (t, v) by central finite differences.
Eigen::MatrixXd fiber_hessian(const SpacetimeModel& model, double t,
                              const Eigen::Ref<const Eigen::VectorXd>& v, double step = 1e-4);

struct HessianRegion {
  double t_min = 0.0;
  double t_max = 0.0;
  Eigen::VectorXd x_min;
  Eigen::VectorXd x_max;
  double speed_max = 0.0;  // samples v uniformly in the ball |v| ≤ speed_max
};

struct HessianReport {
  double delta_hat = kInfinity;       // min over samples of λ_min · |L_τ|
  double min_eigenvalue = kInfinity;  // min over samples of λ_min
  std::int64_t evaluated = 0;
  std::int64_t skipped = 0;           // samples outside int D_τ
  bool positive_definite() const { return evaluated > 0 && min_eigenvalue > 0.0; }
};

HessianReport hessian_bound_check(const SpacetimeModel& model, const HessianRegion& region,
                                  std::int64_t n_samples, std::uint64_t seed = 0);

}  // namespace lorentz_ot
