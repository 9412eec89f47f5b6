#include "lorentz_ot/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lorentz_ot/errors.hpp"
#include "lorentz_ot/feasibility.hpp"

namespace lorentz_ot {

double DynamicalCoupling::total_mass() const {
  double m = 0.0;
  for (const auto& p : paths) m += p.mass;
  return m;
}

DynamicalCoupling lift(const TransportPlan& plan, const SpacetimeModel& model, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu) {
  if (plan.coupling.rows() != mu.size() || plan.coupling.cols() != nu.size())
    throw InvalidInput("plan shape does not match the measures");
  DynamicalCoupling dc;
  dc.model = model.weak_from_this().lock();
  dc.mu = mu;
  dc.nu = nu;
  dc.denominator = plan.denominator;
  for (Index i = 0; i < mu.size(); ++i)
    for (Index j = 0; j < nu.size(); ++j) {
      if (!(plan.coupling(i, j) > 0.0)) continue;
      CoupledPath p;
      p.path = model.geodesic(mu.points()[static_cast<std::size_t>(i)], nu.points()[static_cast<std::size_t>(j)]);
      p.mass = plan.coupling(i, j);
      p.count = plan.counts.size() > 0 ? plan.counts(i, j) : 0;
      p.source = i;
      p.target = j;
      dc.paths.push_back(std::move(p));
    }
  return dc;
}

namespace {

// Events of every path at s, merged exactly; index[k] is the atom of path k.
struct Snapshot {
  std::vector<Event> atoms;
  std::vector<std::int64_t> counts;
  std::vector<double> masses;
  std::vector<Index> index;
};

Snapshot snapshot(const DynamicalCoupling& dc, double s) {
  Snapshot snap;
  for (const CoupledPath& p : dc.paths) {
    const Event e = p.path.at(s);
    const auto it = std::find(snap.atoms.begin(), snap.atoms.end(), e);
    if (it == snap.atoms.end()) {
      snap.index.push_back(static_cast<Index>(snap.atoms.size()));
      snap.atoms.push_back(e);
      snap.counts.push_back(p.count);
      snap.masses.push_back(p.mass);
    } else {
      const auto k = static_cast<std::size_t>(it - snap.atoms.begin());
      snap.index.push_back(static_cast<Index>(k));
      snap.counts[k] += p.count;
      snap.masses[k] += p.mass;
    }
  }
  return snap;
}

DiscreteMeasure snapshot_measure(const DynamicalCoupling& dc, const Snapshot& snap) {
  std::vector<double> w;
  w.reserve(snap.atoms.size());
  const bool counted = std::all_of(snap.counts.begin(), snap.counts.end(), [](std::int64_t c) { return c > 0; });
  for (std::size_t k = 0; k < snap.atoms.size(); ++k)
    w.push_back(counted ? static_cast<double>(snap.counts[k]) / static_cast<double>(dc.denominator) : snap.masses[k]);
  return make_measure(snap.atoms, std::move(w));
}

}  // namespace

DiscreteMeasure interpolate(const DynamicalCoupling& dc, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidInput("interpolation parameter must lie in [0, 1]");
  if (dc.paths.empty()) throw InvalidInput("dynamical coupling has no paths");
  if (s == 0.0 && dc.mu.size() > 0) return dc.mu;
  if (s == 1.0 && dc.nu.size() > 0) return dc.nu;
  return snapshot_measure(dc, snapshot(dc, s));
}

RestrictedPlan restrict_to(const DynamicalCoupling& dc, double s, double t) {
  if (!(0.0 <= s && s < t && t <= 1.0)) throw InvalidInput("restriction needs 0 <= s < t <= 1");
  if (!dc.model) throw InvalidInput("dynamical coupling has no shared model");
  const Snapshot a = snapshot(dc, s);
  const Snapshot b = snapshot(dc, t);
  RestrictedPlan out{interpolate(dc, s), interpolate(dc, t), {}, {}};
  // interpolate() at the endpoints returns μ or ν, whose order may differ
  // from first appearance; map snapshot atoms onto the returned supports.
  auto locate = [](const DiscreteMeasure& m, const Event& e) {
    const auto it = std::find(m.points().begin(), m.points().end(), e);
    if (it == m.points().end()) throw NumericalFailure("interpolated atom not found in marginal", 0.0);
    return static_cast<Index>(it - m.points().begin());
  };
  out.cost = cost_matrix(*dc.model, out.from, out.to);
  out.plan.denominator = dc.denominator;
  out.plan.counts = CountMatrix::Zero(out.from.size(), out.to.size());
  out.plan.coupling = Eigen::MatrixXd::Zero(out.from.size(), out.to.size());
  for (std::size_t k = 0; k < dc.paths.size(); ++k) {
    const Index i = locate(out.from, a.atoms[static_cast<std::size_t>(a.index[k])]);
    const Index j = locate(out.to, b.atoms[static_cast<std::size_t>(b.index[k])]);
    out.plan.counts(i, j) += dc.paths[k].count;
    out.plan.coupling(i, j) += dc.paths[k].mass;
  }
  if (out.plan.counts.sum() == dc.denominator)
    out.plan.coupling = out.plan.counts.cast<double>() / static_cast<double>(dc.denominator);
  out.plan.primal_cost = plan_cost(out.plan.coupling, out.cost);
  out.plan.dual_value = out.plan.primal_cost;
  return out;
}

DynamicalCoupling sub_coupling(const DynamicalCoupling& dc, std::span<const std::size_t> subset) {
  if (subset.empty()) throw InvalidInput("sub-coupling needs a nonempty subset");
  DynamicalCoupling out;
  out.model = dc.model;
  std::vector<std::size_t> chosen(subset.begin(), subset.end());
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  double mass = 0.0;
  std::int64_t count = 0;
  for (const std::size_t k : chosen) {
    if (k >= dc.paths.size()) throw InvalidInput("path index out of range");
    mass += dc.paths[k].mass;
    count += dc.paths[k].count;
  }
  const bool counted = count > 0;
  out.denominator = counted ? count : 1;

  std::vector<Event> xs, ys;
  std::vector<double> wx, wy;
  std::vector<Index> source_map, target_map;
  auto add = [&](std::vector<Event>& pts, std::vector<double>& w, std::vector<Index>& map, Index original,
                 const Event& e, double weight) {
    const auto it = std::find(map.begin(), map.end(), original);
    if (it == map.end()) {
      map.push_back(original);
      pts.push_back(e);
      w.push_back(weight);
      return static_cast<Index>(map.size() - 1);
    }
    const auto k = static_cast<std::size_t>(it - map.begin());
    w[k] += weight;
    return static_cast<Index>(k);
  };
  for (const std::size_t k : chosen) {
    CoupledPath p = dc.paths[k];
    const double weight = counted ? static_cast<double>(p.count) : p.mass;
    p.source = add(xs, wx, source_map, p.source, p.path.start, weight);
    p.target = add(ys, wy, target_map, p.target, p.path.end, weight);
    p.mass = counted ? static_cast<double>(p.count) / static_cast<double>(count) : p.mass / mass;
    out.paths.push_back(std::move(p));
  }
  const double norm = counted ? static_cast<double>(count) : mass;
  for (double& w : wx) w /= norm;
  for (double& w : wy) w /= norm;
  out.mu = make_measure(std::move(xs), std::move(wx));
  out.nu = make_measure(std::move(ys), std::move(wy));
  return out;
}

RegularityReport regularity_at(const DynamicalCoupling& dc, std::span<const double> times) {
  RegularityReport report;
  if (dc.paths.size() < 2 || times.empty()) {
    report.degenerate = true;
    return report;
  }
  std::vector<std::pair<double, double>> gaps;  // (pos, dir)
  for (const double s : times) {
    std::vector<Eigen::VectorXd> pos;
    std::vector<Direction> dir;
    pos.reserve(dc.paths.size());
    dir.reserve(dc.paths.size());
    for (const CoupledPath& p : dc.paths) {
      pos.push_back(p.path.at(s).coords());
      const Tangent w = p.path.tangent_at(s);
      if (w.v0 > 0.0) report.max_speed_ratio = std::max(report.max_speed_ratio, w.v.norm() / w.v0);
      dir.push_back(Direction::of(w));
    }
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = a + 1; b < pos.size(); ++b) {
        const double pg = (pos[a] - pos[b]).norm();
        const double dg = angle_between(dir[a], dir[b]);
        ++report.pairs;
        if (pg < 1e-9) {
          if (dg > 1e-6) ++report.crossings;
          continue;
        }
        report.max_ratio = std::max(report.max_ratio, dg * dg / pg);
        gaps.emplace_back(pg, dg);
      }
  }

  std::sort(gaps.begin(), gaps.end());
  std::vector<double> lx, ly;
  double running = 1e-12;
  for (const auto& [pg, dg] : gaps)
    if (dg > running) {
      running = dg;
      lx.push_back(std::log(pg));
      ly.push_back(std::log(dg));
    }
  report.envelope_points = static_cast<std::int64_t>(lx.size());
  if (lx.size() < 3) {
    report.degenerate = true;
    return report;
  }
  const Eigen::Map<const Eigen::VectorXd> x(lx.data(), static_cast<Index>(lx.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ly.data(), static_cast<Index>(ly.size()));
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  if (!(sxx > 0.0)) {
    report.degenerate = true;
    return report;
  }
  report.fitted_exponent = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
  report.fitted_constant = std::exp(my - report.fitted_exponent * mx);
  return report;
}

RegularityReport regularity_report(const DynamicalCoupling& dc, double eps_time, int grid) {
  if (!(eps_time > 0.0 && eps_time < 0.5)) throw InvalidInput("eps_time must lie in (0, 0.5)");
  if (grid < 1) throw InvalidInput("time grid must have at least one point");
  for (const Event& x : dc.mu.points())
    if (std::find(dc.nu.points().begin(), dc.nu.points().end(), x) != dc.nu.points().end())
      throw PreconditionError("marginal supports are not disjoint");
  std::vector<double> times;
  for (int k = 0; k < grid; ++k)
    times.push_back(grid == 1 ? 0.5 : eps_time + (1.0 - 2.0 * eps_time) * k / (grid - 1));
  RegularityReport r = regularity_at(dc, times);
  r.eps_time = eps_time;
  return r;
}

namespace {

HolderExperiment finish_experiment(std::vector<Event> xs, std::vector<Event> ys, bool require_unique) {
  const auto model = make_minkowski(xs.front().spatial_dim());
  const auto n = static_cast<double>(xs.size());
  const DiscreteMeasure mu = make_measure(std::move(xs), std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
  const DiscreteMeasure nu = make_measure(std::move(ys), std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));

  HolderExperiment out;
  const CausalRelation rel = build_relation(*model, mu, nu);
  std::vector<Index> identity(static_cast<std::size_t>(mu.size()));
  for (Index i = 0; i < mu.size(); ++i) identity[static_cast<std::size_t>(i)] = i;
  bool diagonal = true;
  for (Index i = 0; i < mu.size(); ++i) diagonal = diagonal && rel.adjacency(i, i);
  out.unique_matching = diagonal && is_unique_perfect_matching(rel, identity);
  if (require_unique && !out.unique_matching)
    throw Error("diagonal is not the unique feasible matching; use a smaller x-range");

  const CostMatrix c = cost_matrix(*model, mu, nu);
  const TransportPlan plan = solve(mu, nu, c);
  out.coupling = lift(plan, *model, mu, nu);
  return out;
}

}  // namespace

HolderExperiment holder_sharpness_experiment(int n, std::uint64_t seed) {
  if (n < 16) throw InvalidInput("holder experiment needs N >= 16");
  constexpr double t_star = 0.5, x0 = 0.1, u_max = 0.2, u_min = 1e-3;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  std::vector<double> u{0.0};
  for (int k = 0; k <= n - 2; ++k)
    u.push_back(u_max * std::pow(u_min / u_max, (k + jitter(rng)) / (n - 2)));

  std::vector<Event> xs, ys;
  for (const double uk : u) {
    const double x = x0 + t_star * uk;
    const double f = std::numbers::pi / 2 + (x - x0) / t_star;
    xs.emplace_back(0.0, Eigen::Vector2d(x, 0.0));
    ys.emplace_back(1.0, Eigen::Vector2d(x + std::cos(f), std::sin(f)));
  }
  HolderExperiment out = finish_experiment(std::move(xs), std::move(ys), true);
  out.t_star = t_star;
  const double times[] = {t_star};
  out.report = regularity_at(out.coupling, times);
  out.report.eps_time = t_star;
  return out;
}

HolderExperiment lipschitz_interior_experiment(int n, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("interior experiment needs N >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = unit(rng);
  std::sort(x.begin(), x.end());
  std::vector<Event> xs, ys;
  for (const double v : x) {
    xs.emplace_back(0.0, Eigen::VectorXd::Constant(1, v));
    ys.emplace_back(1.0, Eigen::VectorXd::Constant(1, v + 0.1 + 0.2 * v));
  }
  HolderExperiment out = finish_experiment(std::move(xs), std::move(ys), false);
  out.report = regularity_report(out.coupling, 0.1, 9);
  return out;
}

ShorteningGain shortening_gain(const SpacetimeModel& model, const Geodesic& g1, const Geodesic& g2, double b) {
  ShorteningGain out;
  if (!model.precedes(g1.start, g2.end) || !model.precedes(g2.start, g1.end)) return out;
  out.applicable = true;
  out.gain = (cost(model, g1.start, g2.end) + cost(model, g2.start, g1.end)) -
             (cost(model, g1.start, g1.end) + cost(model, g2.start, g2.end));
  out.dir_gap = angle_between(g1.direction_at(b), g2.direction_at(b));
  return out;
}

CrossingExperiment crossing_experiment(int count, std::uint64_t seed) {
  CrossingExperiment out;
  const auto model = make_minkowski(2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto velocity = [&] {
    const double r = 0.9 * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    return Eigen::Vector2d(r * std::cos(phi), r * std::sin(phi));
  };
  double num = 0.0, den = 0.0;
  while (static_cast<int>(out.samples.size()) < count) {
    const double b = 0.2 + 0.6 * unit(rng);
    const Eigen::Vector2d centre(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
    const Eigen::Vector2d v1 = velocity(), v2 = velocity();
    if ((v1 - v2).norm() < 0.05) continue;
    auto segment = [&](const Eigen::Vector2d& v) {
      return model->geodesic(Event(0.0, centre - b * v), Event(1.0, centre + (1.0 - b) * v));
    };
    const ShorteningGain g = shortening_gain(*model, segment(v1), segment(v2), b);
    if (!g.applicable) continue;
    if (g.gain < 0.0) ++out.negative;
    num += -g.gain * g.dir_gap * g.dir_gap;
    den += std::pow(g.dir_gap, 4);
    out.samples.push_back(g);
  }
  out.kappa = den > 0.0 ? num / den : 0.0;

  const auto line = make_minkowski(1);
  auto ev = [](double t, double x) { return Event(t, Eigen::VectorXd::Constant(1, x)); };
  const Geodesic n1 = line->geodesic(ev(0, -1), ev(2, 1));
  const Geodesic n2 = line->geodesic(ev(0, 1), ev(2, -1));
  out.crossed_nulls_gain = shortening_gain(*line, n1, n2, 0.5).gain;
  return out;
}

}  // namespace lorentz_ot
