#include "lorentz_ot/geometry.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "lorentz_ot/errors.hpp"

namespace lorentz_ot {

namespace {

constexpr int kIntervals = kGeodesicSamples - 1;
constexpr int kSubsteps = 16;
constexpr double kShootingTolerance = 1e-13;
constexpr double kResidualLimit = 1e-8;
constexpr int kShootingIterations = 200;

// Φ_τ together with the accumulated action ∫ L_τ dt.
struct ActionState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd v;
  double action = 0.0;
};

struct Derivative {
  Eigen::VectorXd dx;
  Eigen::VectorXd dv;
  double daction = 0.0;
};

// Step end points split at the kinks of a(t), so each RK4 piece sees a smooth profile.
std::vector<double> step_cuts(const SpacetimeModel& model, double t0, double t1) {
  std::vector<double> cuts{t0};
  if (const auto* rw = dynamic_cast<const RobertsonWalkerModel*>(&model)) {
    const double lo = std::min(t0, t1), hi = std::max(t0, t1);
    for (const auto& row : rw->table())
      if (row.first > lo && row.first < hi) cuts.push_back(row.first);
    if (t1 < t0) std::reverse(cuts.begin() + 1, cuts.end());
  }
  cuts.push_back(t1);
  return cuts;
}

Derivative flow_rhs(const SpacetimeModel& model, double t, double rate, const Eigen::VectorXd& v) {
  const double a = model.scale_factor(t);
  const double speed2 = a * a * v.squaredNorm();
  Derivative d;
  d.dx = v;
  d.dv = -v * (rate / a) * (2.0 - speed2);
  d.daction = -std::sqrt(std::max(0.0, 1.0 - speed2));
  return d;
}

ActionState rk4_piece(const SpacetimeModel& model, const ActionState& s, double h) {
  const double rate = model.scale_rate(s.t + 0.5 * h);
  const Derivative k1 = flow_rhs(model, s.t, rate, s.v);
  const Derivative k2 = flow_rhs(model, s.t + 0.5 * h, rate, s.v + 0.5 * h * k1.dv);
  const Derivative k3 = flow_rhs(model, s.t + 0.5 * h, rate, s.v + 0.5 * h * k2.dv);
  const Derivative k4 = flow_rhs(model, s.t + h, rate, s.v + h * k3.dv);
  ActionState out;
  out.t = s.t + h;
  out.x = s.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.v = s.v + (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  out.action = s.action + (h / 6.0) * (k1.daction + 2.0 * k2.daction + 2.0 * k3.daction + k4.daction);
  return out;
}

ActionState rk4_step(const SpacetimeModel& model, const ActionState& s, double h) {
  const std::vector<double> cuts = step_cuts(model, s.t, s.t + h);
  ActionState out = s;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    out = rk4_piece(model, out, cuts[k] - cuts[k - 1]);
    out.t = cuts[k];
  }
  return out;
}

struct ShotResult {
  ActionState final_state;
  std::vector<ActionState> samples;  // kGeodesicSamples entries when requested
};

// Integrates Φ_τ from (p, v0) up to τ = t_end on the fixed geodesic grid.
ShotResult shoot(const SpacetimeModel& model, const Event& p, const Eigen::VectorXd& v0,
                 double t_end, bool keep_samples) {
  ActionState state{p.t, p.x, v0, 0.0};
  const double h = (t_end - p.t) / (kIntervals * kSubsteps);
  ShotResult result;
  if (keep_samples) {
    result.samples.reserve(kGeodesicSamples);
    result.samples.push_back(state);
  }
  for (int k = 0; k < kIntervals; ++k) {
    for (int j = 0; j < kSubsteps; ++j) state = rk4_step(model, state, h);
    // Pin τ to the grid so sample times are exact affine images of s.
    state.t = p.t + (t_end - p.t) * (static_cast<double>(k + 1) / kIntervals);
    if (keep_samples) result.samples.push_back(state);
  }
  result.final_state = std::move(state);
  return result;
}

Geodesic affine_geodesic(std::shared_ptr<const SpacetimeModel> owner, const Event& p,
                         const Event& q, double action) {
  Geodesic g;
  g.model = std::move(owner);
  g.start = p;
  g.end = q;
  g.action = action;
  g.samples.reserve(kGeodesicSamples);
  const double dt = q.t - p.t;
  const Eigen::VectorXd dx = q.x - p.x;
  for (int k = 0; k < kGeodesicSamples; ++k) {
    const double s = static_cast<double>(k) / kIntervals;
    Event e = k == 0 ? p : (k == kIntervals ? q : Event(p.t + s * dt, p.x + s * dx));
    Tangent w{e, dt, dx};
    g.samples.push_back({s, std::move(e), std::move(w)});
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------- Event

Eigen::VectorXd Event::coords() const {
  Eigen::VectorXd c(1 + x.size());
  c(0) = t;
  c.tail(x.size()) = x;
  return c;
}

Event Event::from_coords(const Eigen::Ref<const Eigen::VectorXd>& c) {
  if (c.size() < 1) throw InvalidInput("event needs at least the time coordinate");
  return Event(c(0), c.tail(c.size() - 1));
}

bool operator==(const Event& a, const Event& b) {
  return a.t == b.t && a.x.size() == b.x.size() && a.x == b.x;
}

Eigen::VectorXd Tangent::components() const {
  Eigen::VectorXd c(1 + v.size());
  c(0) = v0;
  c.tail(v.size()) = v;
  return c;
}

Direction Direction::of(const Tangent& w) {
  const Eigen::VectorXd c = w.components();
  const double n = c.norm();
  if (!(n > 0.0)) throw InvalidInput("direction of the zero vector");
  return Direction{c / n};
}

double angle_between(const Direction& a, const Direction& b) {
  return 2.0 * std::atan2((a.unit - b.unit).norm(), (a.unit + b.unit).norm());
}

const char* to_string(CausalType type) {
  switch (type) {
    case CausalType::timelike: return "timelike";
    case CausalType::null: return "null";
    case CausalType::non_causal: return "non-causal";
  }
  return "?";
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::minkowski: return "minkowski";
    case ModelKind::robertson_walker: return "rw";
  }
  return "?";
}

// ---------------------------------------------------------------- models

SpacetimeModel::SpacetimeModel(Index spatial_dim) : spatial_dim_(spatial_dim) {
  if (spatial_dim < 1) throw InvalidInput("spatial dimension must be at least 1");
}

void SpacetimeModel::check_event(const Event& e) const {
  if (e.spatial_dim() != spatial_dim_) {
    std::ostringstream msg;
    msg << "event has " << e.spatial_dim() << " spatial coordinates, model expects "
        << spatial_dim_;
    throw InvalidInput(msg.str());
  }
  if (!e.is_finite()) throw InvalidInput("event coordinates must be finite");
}

double SpacetimeModel::quadratic(const Tangent& w) const {
  return lorentz_quadratic(w.v0, w.v, scale_factor(w.base.t));
}

CausalType SpacetimeModel::relation(const Event& p, const Event& q) const {
  check_event(p);
  check_event(q);
  const double dt = q.t - p.t;
  const double dx = (q.x - p.x).norm();
  if (dt <= 0.0) return (dt == 0.0 && dx == 0.0) ? CausalType::null : CausalType::non_causal;
  const double reach = horizon(p.t, q.t);
  const double disc = reach * reach - dx * dx;
  const double scale = reach * reach + dx * dx;
  if (std::abs(disc) <= kNullTolerance * scale) return CausalType::null;
  return disc > 0.0 ? CausalType::timelike : CausalType::non_causal;
}

double MinkowskiModel::minimal_action(const Event& p, const Event& q) const {
  switch (relation(p, q)) {
    case CausalType::non_causal: return kInfinity;
    case CausalType::null: return 0.0;
    case CausalType::timelike: break;
  }
  const double dt = q.t - p.t;
  return -std::sqrt(dt * dt - (q.x - p.x).squaredNorm());
}

Geodesic MinkowskiModel::geodesic(const Event& p, const Event& q) const {
  const double action = minimal_action(p, q);
  if (action == kInfinity) throw InfeasiblePair("geodesic requested between non-causal events");
  return affine_geodesic(weak_from_this().lock(), p, q, action);
}

RobertsonWalkerModel::RobertsonWalkerModel(Index spatial_dim,
                                           std::vector<std::pair<double, double>> table)
    : SpacetimeModel(spatial_dim), table_(std::move(table)) {
  if (table_.empty()) throw InvalidInput("scale-factor table is empty");
  for (std::size_t i = 0; i < table_.size(); ++i) {
    const auto [t, a] = table_[i];
    if (!std::isfinite(t) || !std::isfinite(a)) throw InvalidInput("scale-factor table entries must be finite");
    if (!(a > 0.0)) throw InvalidInput("scale factor must be positive");
    if (i > 0 && !(t > table_[i - 1].first))
      throw InvalidInput("scale-factor table times must be strictly increasing");
  }
}

double RobertsonWalkerModel::scale_factor(double t) const {
  if (t <= table_.front().first) return table_.front().second;
  if (t >= table_.back().first) return table_.back().second;
  const auto it = std::upper_bound(table_.begin(), table_.end(), t,
                                   [](double value, const auto& row) { return value < row.first; });
  const auto& [t1, a1] = *it;
  const auto& [t0, a0] = *(it - 1);
  const double w = (t - t0) / (t1 - t0);
  return a0 + w * (a1 - a0);
}

double RobertsonWalkerModel::scale_rate(double t) const {
  if (t < table_.front().first || t >= table_.back().first) return 0.0;
  const auto it = std::upper_bound(table_.begin(), table_.end(), t,
                                   [](double value, const auto& row) { return value < row.first; });
  const auto& [t1, a1] = *it;
  const auto& [t0, a0] = *(it - 1);
  return (a1 - a0) / (t1 - t0);
}

double RobertsonWalkerModel::horizon(double t0, double t1) const {
  if (t1 < t0) return -horizon(t1, t0);
  // Exact integral of 1/a over the piecewise-linear profile.
  std::vector<double> cuts{t0};
  for (const auto& [t, a] : table_)
    if (t > t0 && t < t1) cuts.push_back(t);
  cuts.push_back(t1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double a_lo = scale_factor(lo);
    const double a_hi = scale_factor(hi);
    const double slope = (a_hi - a_lo) / (hi - lo);
    if (std::abs(a_hi - a_lo) <= 1e-14 * a_lo) {
      total += (hi - lo) / a_lo;
    } else {
      total += std::log(a_hi / a_lo) / slope;
    }
  }
  return total;
}

namespace {

struct ShootingSolution {
  ShotResult shot;
  double residual = 0.0;
};

ShootingSolution solve_shooting(const SpacetimeModel& model, const Event& p, const Event& q,
                                CausalType type, bool keep_samples) {
  const Eigen::VectorXd dx = q.x - p.x;
  const double distance = dx.norm();
  const double a0 = model.scale_factor(p.t);
  if (distance == 0.0) {
    ShootingSolution sol;
    sol.shot = shoot(model, p, Eigen::VectorXd::Zero(dx.size()), q.t, keep_samples);
    sol.residual = (sol.shot.final_state.x - q.x).norm();
    return sol;
  }
  const Eigen::VectorXd heading = dx / distance;
  auto miss = [&](double fraction, bool keep) {
    ShotResult r = shoot(model, p, heading * (fraction / a0), q.t, keep);
    const double f = heading.dot(r.final_state.x - p.x) - distance;
    return std::pair<double, ShotResult>(f, std::move(r));
  };

  const double tol = kShootingTolerance * std::max(1.0, distance);
  double root = 1.0;
  if (type != CausalType::null) {
    double lo = 0.0, f_lo = -distance;
    double hi = 1.0, f_hi = miss(1.0, false).first;
    if (f_hi < 0.0 && f_hi < -kResidualLimit)
      throw NumericalFailure("shooting bracket lost: null ray falls short of the target", -f_hi);
    if (f_hi <= 0.0) {
      root = 1.0;
    } else {
      // Illinois variant of regula falsi on the initial speed fraction.
      int side = 0;
      root = 0.5;
      for (int iter = 0; iter < kShootingIterations; ++iter) {
        root = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(root > lo && root < hi)) root = 0.5 * (lo + hi);
        const double f = miss(root, false).first;
        if (std::abs(f) <= tol || hi - lo <= 4e-16) break;
        if (f > 0.0) {
          hi = root;
          f_hi = f;
          if (side == +1) f_lo *= 0.5;
          side = +1;
        } else {
          lo = root;
          f_lo = f;
          if (side == -1) f_hi *= 0.5;
          side = -1;
        }
      }
    }
  }
  ShootingSolution sol;
  auto [f, shot] = miss(root, keep_samples);
  (void)f;
  sol.shot = std::move(shot);
  sol.residual = (sol.shot.final_state.x - q.x).norm();
  if (!(sol.residual <= kResidualLimit * std::max(1.0, distance))) {
    std::ostringstream msg;
    msg << "shooting did not converge, endpoint residual " << sol.residual;
    throw NumericalFailure(msg.str(), sol.residual);
  }
  return sol;
}

}  // namespace

double RobertsonWalkerModel::minimal_action(const Event& p, const Event& q) const {
  const CausalType type = relation(p, q);
  if (type == CausalType::non_causal) return kInfinity;
  if (type == CausalType::null) return 0.0;
  return solve_shooting(*this, p, q, type, false).shot.final_state.action;
}

Geodesic RobertsonWalkerModel::geodesic(const Event& p, const Event& q) const {
  const CausalType type = relation(p, q);
  if (type == CausalType::non_causal) throw InfeasiblePair("geodesic requested between non-causal events");
  if (p == q) return affine_geodesic(weak_from_this().lock(), p, q, 0.0);

  ShootingSolution sol = solve_shooting(*this, p, q, type, true);
  Geodesic g;
  g.model = weak_from_this().lock();
  g.start = p;
  g.end = q;
  g.action = type == CausalType::null ? 0.0 : sol.shot.final_state.action;
  g.endpoint_residual = sol.residual;
  const double dt = q.t - p.t;
  g.samples.reserve(kGeodesicSamples);
  for (int k = 0; k < kGeodesicSamples; ++k) {
    const ActionState& st = sol.shot.samples[k];
    Event e = k == 0 ? p : (k == kIntervals ? q : Event(st.t, st.x));
    Tangent w{e, dt, dt * st.v};
    g.samples.push_back({static_cast<double>(k) / kIntervals, std::move(e), std::move(w)});
  }
  return g;
}

std::shared_ptr<const SpacetimeModel> make_minkowski(Index spatial_dim) {
  return std::make_shared<const MinkowskiModel>(spatial_dim);
}

std::shared_ptr<const SpacetimeModel> make_robertson_walker(
    Index spatial_dim, std::vector<std::pair<double, double>> table) {
  return std::make_shared<const RobertsonWalkerModel>(spatial_dim, std::move(table));
}

// ---------------------------------------------------------------- geodesic

Event Geodesic::at(double s) const {
  if (s <= 0.0) return start;
  if (s >= 1.0) return end;
  const int k = std::min(kIntervals - 1, static_cast<int>(std::floor(s * kIntervals)));
  const GeodesicSample& a = samples[k];
  const GeodesicSample& b = samples[k + 1];
  const double ds = b.s - a.s;
  const double u = (s - a.s) / ds;
  const double h00 = (2.0 * u - 3.0) * u * u + 1.0;
  const double h10 = ((u - 2.0) * u + 1.0) * u;
  const double h01 = (3.0 - 2.0 * u) * u * u;
  const double h11 = (u - 1.0) * u * u;
  Event e;
  e.t = h00 * a.event.t + h10 * ds * a.tangent.v0 + h01 * b.event.t + h11 * ds * b.tangent.v0;
  e.x = h00 * a.event.x + (h10 * ds) * a.tangent.v + h01 * b.event.x + (h11 * ds) * b.tangent.v;
  return e;
}

Tangent Geodesic::tangent_at(double s) const {
  s = std::clamp(s, 0.0, 1.0);
  const int k = std::min(kIntervals - 1, static_cast<int>(std::floor(s * kIntervals)));
  const GeodesicSample& a = samples[k];
  const GeodesicSample& b = samples[k + 1];
  const double ds = b.s - a.s;
  const double u = (s - a.s) / ds;
  const double d00 = (6.0 * u - 6.0) * u;
  const double d10 = (3.0 * u - 4.0) * u + 1.0;
  const double d01 = (6.0 - 6.0 * u) * u;
  const double d11 = (3.0 * u - 2.0) * u;
  Tangent w;
  w.base = at(s);
  w.v0 = (d00 * a.event.t + d01 * b.event.t) / ds + d10 * a.tangent.v0 + d11 * b.tangent.v0;
  w.v = (d00 * a.event.x + d01 * b.event.x) / ds + d10 * a.tangent.v + d11 * b.tangent.v;
  return w;
}

// ---------------------------------------------------------------- operations

CausalType classify(const SpacetimeModel& model, const Tangent& w) {
  if (w.v.size() != model.spatial_dim()) throw InvalidInput("tangent dimension does not match model");
  if (w.is_zero()) throw InvalidInput("cannot classify the zero vector");
  const double a = model.scale_factor(w.base.t);
  const double q = model.quadratic(w);
  const double scale = w.v0 * w.v0 + a * a * w.v.squaredNorm();
  if (!(w.v0 > 0.0)) return CausalType::non_causal;
  if (std::abs(q) <= kNullTolerance * scale) return CausalType::null;
  return q > 0.0 ? CausalType::timelike : CausalType::non_causal;
}

double cost(const SpacetimeModel& model, const Event& p, const Event& q) {
  return model.minimal_action(p, q);
}

double minimal_action(const SpacetimeModel& model, const Event& p, const Event& q) {
  return model.minimal_action(p, q);
}

Geodesic geodesic(const SpacetimeModel& model, const Event& p, const Event& q) {
  return model.geodesic(p, q);
}

FlowState el_flow(const SpacetimeModel& model, const FlowState& state, double h) {
  if (state.x.size() != model.spatial_dim() || state.v.size() != model.spatial_dim())
    throw InvalidInput("flow state dimension does not match model");
  const double a = model.scale_factor(state.t);
  if (!(a * state.v.norm() <= 1.0 + 1e-12)) throw DomainError("velocity outside the closed domain of L_tau");
  const ActionState next = rk4_step(model, ActionState{state.t, state.x, state.v, 0.0}, h);
  return FlowState{next.t, next.x, next.v};
}

FlowConservation flow_conservation(const SpacetimeModel& model, const FlowState& initial,
                                   double duration, int steps) {
  if (steps < 1) throw InvalidInput("steps must be positive");
  const double h = duration / steps;
  const double a0 = model.scale_factor(initial.t);
  const double speed2 = a0 * a0 * initial.v.squaredNorm();
  const bool null_start = std::abs(1.0 - speed2) <= kNullTolerance;

  // Affine geodesic of 𝕃 written with τ as the independent variable:
  //   dx/dt = X/T,  dT/dt = −a a' |X|²/T,  dX/dt = −2 (a'/a) X.
  struct Affine {
    Eigen::VectorXd x;
    double T;
    Eigen::VectorXd X;
  };
  auto rhs = [&](double t, double rate, const Affine& s) {
    const double a = model.scale_factor(t);
    return Affine{s.X / s.T, -a * rate * s.X.squaredNorm() / s.T, -2.0 * (rate / a) * s.X};
  };
  auto axpy = [](const Affine& s, double c, const Affine& d) {
    return Affine{s.x + c * d.x, s.T + c * d.T, s.X + c * d.X};
  };

  const double T0 = null_start ? 1.0 : 1.0 / std::sqrt(1.0 - speed2);
  Affine geo{initial.x, T0, initial.v * T0};
  auto lag = [&](double t, const Affine& s) {
    return lorentz_quadratic(s.T, s.X, model.scale_factor(t));
  };
  const double lag0 = lag(initial.t, geo);

  FlowConservation report;
  FlowState flow = initial;
  double t = initial.t;
  for (int i = 0; i < steps; ++i) {
    const double t_next = initial.t + (i + 1) * h;
    const std::vector<double> cuts = step_cuts(model, t, t_next);
    for (std::size_t k = 1; k < cuts.size(); ++k) {
      const double t0 = cuts[k - 1], dt = cuts[k] - t0;
      const double rate = model.scale_rate(t0 + 0.5 * dt);
      const Affine k1 = rhs(t0, rate, geo);
      const Affine k2 = rhs(t0 + 0.5 * dt, rate, axpy(geo, 0.5 * dt, k1));
      const Affine k3 = rhs(t0 + 0.5 * dt, rate, axpy(geo, 0.5 * dt, k2));
      const Affine k4 = rhs(t0 + dt, rate, axpy(geo, dt, k3));
      geo.x += (dt / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      geo.T += (dt / 6.0) * (k1.T + 2.0 * k2.T + 2.0 * k3.T + k4.T);
      geo.X += (dt / 6.0) * (k1.X + 2.0 * k2.X + 2.0 * k3.X + k4.X);
    }
    flow = el_flow(model, flow, h);
    t = t_next;
    flow.t = t;
    report.lagrangian_drift = std::max(report.lagrangian_drift, std::abs(lag(t, geo) - lag0));
    report.boundary_defect = std::max(
        report.boundary_defect, std::abs(1.0 - model.scale_factor(t) * flow.v.norm()));
  }
  report.graph_gap = (geo.x - flow.x).norm();
  return report;
}

Eigen::MatrixXd fiber_hessian(const SpacetimeModel& model, double t,
                              const Eigen::Ref<const Eigen::VectorXd>& v, double step) {
  const Index d = v.size();
  if (d != model.spatial_dim()) throw InvalidInput("velocity dimension does not match model");
  const double a = model.scale_factor(t);
  auto f = [&](const Eigen::VectorXd& w) {
    const double value = fiber_lagrangian(w, a);
    if (!std::isfinite(value)) throw DomainError("finite-difference stencil leaves the domain of L_tau");
    return value;
  };
  const Eigen::VectorXd center = v;
  const double f0 = f(center);
  Eigen::MatrixXd hess(d, d);
  for (Index i = 0; i < d; ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Zero(d);
    ei(i) = step;
    hess(i, i) = (f(center + ei) - 2.0 * f0 + f(center - ei)) / (step * step);
    for (Index j = i + 1; j < d; ++j) {
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(d);
      ej(j) = step;
      const double mixed = (f(center + ei + ej) - f(center + ei - ej) - f(center - ei + ej) +
                            f(center - ei - ej)) /
                           (4.0 * step * step);
      hess(i, j) = mixed;
      hess(j, i) = mixed;
    }
  }
  return hess;
}

HessianReport hessian_bound_check(const SpacetimeModel& model, const HessianRegion& region,
                                  std::int64_t n_samples, std::uint64_t seed) {
  const Index d = model.spatial_dim();
  if (region.t_max < region.t_min) throw InvalidInput("empty time range");
  if (region.x_min.size() != d || region.x_max.size() != d)
    throw InvalidInput("region box dimension does not match model");
  constexpr double kStep = 1e-4;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  HessianReport report;
  for (std::int64_t n = 0; n < n_samples; ++n) {
    const double t = region.t_min + unit(rng) * (region.t_max - region.t_min);
    Eigen::VectorXd x(d);
    for (Index i = 0; i < d; ++i) x(i) = region.x_min(i) + unit(rng) * (region.x_max(i) - region.x_min(i));
    Eigen::VectorXd dir(d);
    for (Index i = 0; i < d; ++i) dir(i) = gauss(rng);
    const double radius = region.speed_max * std::pow(unit(rng), 1.0 / static_cast<double>(d));
    const Eigen::VectorXd v = dir.norm() > 0.0 ? Eigen::VectorXd(dir * (radius / dir.norm()))
                                               : Eigen::VectorXd::Zero(d);
    const double a = model.scale_factor(t);
    if (a * (v.norm() + 2.0 * kStep) >= 1.0) {
      ++report.skipped;
      continue;
    }
    const Eigen::MatrixXd hess = fiber_hessian(model, t, v, kStep);
    const double lambda = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess).eigenvalues().minCoeff();
    const double magnitude = std::abs(fiber_lagrangian(v, a));
    report.min_eigenvalue = std::min(report.min_eigenvalue, lambda);
    report.delta_hat = std::min(report.delta_hat, lambda * magnitude);
    ++report.evaluated;
  }
  return report;
}

}  // namespace lorentz_ot
