#include "lorentz_ot/monge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lorentz_ot/errors.hpp"

namespace lorentz_ot {

GeometryCheck achronal_check(const SpacetimeModel& model, std::span<const Event> points) {
  if (points.empty()) throw InvalidInput("achronal_check needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (model.relation(points[i], points[j]) == CausalType::timelike ||
          model.relation(points[j], points[i]) == CausalType::timelike)
        return GeometryCheck{false, std::pair{static_cast<Index>(i), static_cast<Index>(j)}};
  return {};
}

GeometryCheck spacelike_check(const SpacetimeModel& model, std::span<const Event> points, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double dx = (points[i].x - points[j].x).norm();
      if (dx == 0.0) throw InvalidInput("points share a spatial projection; not a graph");
      const double dt = std::abs(points[i].t - points[j].t);
      const double a = model.scale_factor(0.5 * (points[i].t + points[j].t));
      const double bound = (1.0 - eps) * a * dx;
      if (dt > bound + 1e-12 * std::max(1.0, bound))
        return GeometryCheck{false, std::pair{static_cast<Index>(i), static_cast<Index>(j)}};
    }
  return {};
}

namespace {

std::vector<Index> positive_entries(const Eigen::MatrixXd& coupling, Index row) {
  const double total = coupling.row(row).sum();
  std::vector<Index> out;
  for (Index j = 0; j < coupling.cols(); ++j)
    if (coupling(row, j) > 1e-10 * total) out.push_back(j);
  return out;
}

}  // namespace

MongeResult monge_solve(const SpacetimeModel& model, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  MongeResult out;
  for (const Event& x : mu.points())
    if (std::find(nu.points().begin(), nu.points().end(), x) != nu.points().end()) out.supports_disjoint = false;
  out.cost = cost_matrix(model, mu, nu);
  out.plan = solve(mu, nu, out.cost);
  out.map.reserve(static_cast<std::size_t>(mu.size()));
  for (Index i = 0; i < mu.size(); ++i) {
    const std::vector<Index> targets = positive_entries(out.plan.coupling, i);
    if (targets.size() != 1) {
      out.map.clear();
      out.witness = SplitWitness{i, targets[0], targets[1]};
      return out;
    }
    out.map.push_back(targets.front());
  }
  out.is_map = true;
  return out;
}

UniquenessProbe uniqueness_probe(const SpacetimeModel& model, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, int trials, std::uint64_t seed) {
  UniquenessProbe out;
  const CostMatrix c = cost_matrix(model, mu, nu);
  const TransportPlan base = solve(mu, nu, c);
  out.first = base.coupling;
  out.first_cost = base.primal_cost;
  const BoolMatrix support = base.coupling.array() > 0.0;

  std::mt19937_64 rng(seed);
  std::vector<Index> rows(static_cast<std::size_t>(mu.size())), cols(static_cast<std::size_t>(nu.size()));
  for (int trial = 0; trial < trials; ++trial) {
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    std::vector<Event> xs, ys;
    std::vector<double> wx, wy;
    for (const Index i : rows) {
      xs.push_back(mu.points()[static_cast<std::size_t>(i)]);
      wx.push_back(mu.weights()(i));
    }
    for (const Index j : cols) {
      ys.push_back(nu.points()[static_cast<std::size_t>(j)]);
      wy.push_back(nu.weights()(j));
    }
    CostMatrix pc;
    pc.cost.resize(c.rows(), c.cols());
    pc.admissible.resize(c.rows(), c.cols());
    for (Index a = 0; a < c.rows(); ++a)
      for (Index b = 0; b < c.cols(); ++b) {
        pc.cost(a, b) = c.cost(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
        pc.admissible(a, b) = c.admissible(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
      }
    const TransportPlan p = solve(make_measure(std::move(xs), std::move(wx)), make_measure(std::move(ys), std::move(wy)), pc);
    ++out.trials;

    Eigen::MatrixXd back = Eigen::MatrixXd::Zero(c.rows(), c.cols());
    for (Index a = 0; a < c.rows(); ++a)
      for (Index b = 0; b < c.cols(); ++b)
        back(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]) = p.coupling(a, b);
    if (((back.array() > 0.0) != support).any()) {
      out.unique = false;
      out.second = std::move(back);
      out.second_cost = p.primal_cost;
      return out;
    }
  }
  return out;
}

std::vector<DoubleIntersection> double_intersection_scan(const SpacetimeModel& model, const DiscreteMeasure& mu,
                                                         const DiscreteMeasure& nu, const TransportPlan& plan) {
  std::vector<DoubleIntersection> out;
  for (Index i = 0; i < plan.coupling.rows(); ++i) {
    const std::vector<Index> targets = positive_entries(plan.coupling, i);
    if (targets.size() < 2) continue;
    const Event& p = mu.points()[static_cast<std::size_t>(i)];
    std::vector<Direction> dirs;
    for (const Index j : targets)
      dirs.push_back(model.geodesic(p, nu.points()[static_cast<std::size_t>(j)]).direction_at(0.0));
    for (std::size_t a = 0; a < targets.size(); ++a)
      for (std::size_t b = a + 1; b < targets.size(); ++b)
        out.push_back(DoubleIntersection{i, targets[a], targets[b], angle_between(dirs[a], dirs[b])});
  }
  return out;
}

double split_fraction(const TransportPlan& plan) {
  if (plan.coupling.rows() == 0) return 0.0;
  Index split = 0;
  for (Index i = 0; i < plan.coupling.rows(); ++i)
    if (positive_entries(plan.coupling, i).size() > 1) ++split;
  return static_cast<double>(split) / static_cast<double>(plan.coupling.rows());
}

}  // namespace lorentz_ot
