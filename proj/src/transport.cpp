#include "lorentz_ot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lorentz_ot/errors.hpp"
#include "lorentz_ot/network.hpp"

namespace lorentz_ot {

std::vector<std::pair<Index, Index>> TransportPlan::support() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < coupling.rows(); ++i)
    for (Index j = 0; j < coupling.cols(); ++j)
      if (coupling(i, j) > 0.0) out.emplace_back(i, j);
  return out;
}

CostMatrix cost_matrix(const SpacetimeModel& model, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.spatial_dim() != model.spatial_dim() || nu.spatial_dim() != model.spatial_dim())
    throw InvalidInput("measure dimension does not match the model");
  CostMatrix c;
  c.cost.resize(mu.size(), nu.size());
  c.admissible.resize(mu.size(), nu.size());
  for (Index i = 0; i < mu.size(); ++i)
    for (Index j = 0; j < nu.size(); ++j) {
      const double v = cost(model, mu.points()[static_cast<std::size_t>(i)], nu.points()[static_cast<std::size_t>(j)]);
      c.cost(i, j) = v;
      c.admissible(i, j) = std::isfinite(v);
    }
  return c;
}

double plan_cost(const Eigen::MatrixXd& coupling, const CostMatrix& c) {
  double total = 0.0;
  for (Index i = 0; i < coupling.rows(); ++i)
    for (Index j = 0; j < coupling.cols(); ++j)
      if (coupling(i, j) > 0.0) total += coupling(i, j) * c.cost(i, j);
  return total;
}

namespace {

void check_shape(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  if (c.rows() != mu.size() || c.cols() != nu.size() || c.admissible.rows() != c.rows() ||
      c.admissible.cols() != c.cols())
    throw InvalidInput("cost matrix shape does not match the measures");
}

std::int64_t scaled(double c) { return std::llround(c / kCostResolution); }

}  // namespace

TransportPlan solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  check_shape(mu, nu, c);
  const FeasibilityVerdict verdict = j_related(c.relation(), mu, nu);
  if (!verdict.related) throw InfeasibleError("measures are not causally related", *verdict.violating_set);

  const Index m = c.rows(), n = c.cols();
  const SharedCounts counts = shared_counts(mu, nu);
  const std::int64_t total = counts.source.denominator;

  const int source = 0;
  const int sink = static_cast<int>(m + n + 1);
  network::FlowNetwork net(static_cast<int>(m + n + 2));
  for (Index i = 0; i < m; ++i)
    net.add_arc(source, static_cast<int>(1 + i), counts.source.counts[static_cast<std::size_t>(i)]);
  std::vector<std::pair<int, int>> handle(static_cast<std::size_t>(m * n), {-1, -1});
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (c.admissible(i, j))
        handle[static_cast<std::size_t>(i * n + j)] = net.add_arc(
            static_cast<int>(1 + i), static_cast<int>(1 + m + j), network::kUnbounded, scaled(c.cost(i, j)));
  for (Index j = 0; j < n; ++j)
    net.add_arc(static_cast<int>(1 + m + j), sink, counts.target.counts[static_cast<std::size_t>(j)]);

  const auto result = net.min_cost_flow(source, sink, total);
  if (result.flow != total) throw NumericalFailure("min-cost flow did not route the full mass", 0.0);

  TransportPlan plan;
  plan.denominator = total;
  plan.counts = CountMatrix::Zero(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (c.admissible(i, j)) plan.counts(i, j) = net.arc(handle[static_cast<std::size_t>(i * n + j)]).flow;
  plan.coupling = plan.counts.cast<double>() / static_cast<double>(total);
  plan.primal_cost = plan_cost(plan.coupling, c);

  // Shortest distances from a virtual root over forward arcs (cost c) and
  // reverse arcs on the support (cost −c). Optimality rules out negative cycles.
  std::vector<std::int64_t> d(static_cast<std::size_t>(m + n), 0);
  for (Index round = 0; round <= m + n; ++round) {
    bool changed = false;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) {
        if (!c.admissible(i, j)) continue;
        const std::int64_t w = scaled(c.cost(i, j));
        auto& di = d[static_cast<std::size_t>(i)];
        auto& dj = d[static_cast<std::size_t>(m + j)];
        if (di + w < dj) {
          dj = di + w;
          changed = true;
        }
        if (plan.counts(i, j) > 0 && dj - w < di) {
          di = dj - w;
          changed = true;
        }
      }
    if (!changed) break;
    if (round == m + n) throw NumericalFailure("negative cycle while recovering potentials", 0.0);
  }
  const std::int64_t shift = d[0];
  plan.psi.resize(m);
  plan.phi.resize(n);
  for (Index i = 0; i < m; ++i)
    plan.psi(i) = static_cast<double>(d[static_cast<std::size_t>(i)] - shift) * kCostResolution;
  for (Index j = 0; j < n; ++j)
    plan.phi(j) = static_cast<double>(d[static_cast<std::size_t>(m + j)] - shift) * kCostResolution;

  double dual = 0.0;
  for (Index j = 0; j < n; ++j)
    dual += static_cast<double>(counts.target.counts[static_cast<std::size_t>(j)]) * plan.phi(j);
  for (Index i = 0; i < m; ++i)
    dual -= static_cast<double>(counts.source.counts[static_cast<std::size_t>(i)]) * plan.psi(i);
  plan.dual_value = dual / static_cast<double>(total);
  return plan;
}

TransportPlan brute_force_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  check_shape(mu, nu, c);
  if (mu.size() > 8 || nu.size() > 8) throw SizeError("brute_force_solve needs an expanded size of at most 8");
  const SharedCounts counts = shared_counts(mu, nu, 8);
  if (!counts.exact) throw SizeError("brute_force_solve needs an expanded size of at most 8");
  const std::int64_t total = counts.source.denominator;

  std::vector<Index> rows, cols;
  for (std::size_t i = 0; i < counts.source.counts.size(); ++i)
    rows.insert(rows.end(), static_cast<std::size_t>(counts.source.counts[i]), static_cast<Index>(i));
  for (std::size_t j = 0; j < counts.target.counts.size(); ++j)
    cols.insert(cols.end(), static_cast<std::size_t>(counts.target.counts[j]), static_cast<Index>(j));

  std::vector<std::size_t> sigma(static_cast<std::size_t>(total));
  std::iota(sigma.begin(), sigma.end(), 0);
  double best = kInfinity;
  std::vector<std::size_t> best_sigma;
  do {
    double sum = 0.0;
    for (std::size_t k = 0; k < sigma.size() && std::isfinite(sum); ++k)
      sum += c.cost(rows[k], cols[sigma[k]]);
    if (sum < best) {
      best = sum;
      best_sigma = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  TransportPlan plan;
  plan.denominator = total;
  plan.primal_cost = kInfinity;
  plan.dual_value = kInfinity;
  if (!std::isfinite(best)) return plan;
  plan.counts = CountMatrix::Zero(c.rows(), c.cols());
  for (std::size_t k = 0; k < best_sigma.size(); ++k) ++plan.counts(rows[k], cols[best_sigma[k]]);
  plan.coupling = plan.counts.cast<double>() / static_cast<double>(total);
  plan.primal_cost = plan_cost(plan.coupling, c);
  return plan;
}

DualCheck check_duals(const TransportPlan& plan, const CostMatrix& c) {
  DualCheck out;
  out.max_violation = -kInfinity;
  for (Index i = 0; i < c.rows(); ++i)
    for (Index j = 0; j < c.cols(); ++j) {
      if (!c.admissible(i, j)) continue;
      const double gap = plan.phi(j) - plan.psi(i) - c.cost(i, j);
      out.max_violation = std::max(out.max_violation, gap);
      if (plan.coupling(i, j) > 0.0) out.max_slack_on_support = std::max(out.max_slack_on_support, std::abs(gap));
    }
  return out;
}

MonotonicityReport check_cyclical_monotonicity(const TransportPlan& plan, const CostMatrix& c, int k_max,
                                               std::int64_t trials, std::uint64_t seed) {
  MonotonicityReport report;
  std::vector<std::pair<Index, Index>> pairs = plan.support();
  if (pairs.size() < 2 || k_max < 2) return report;
  const auto k_hi = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(k_max), pairs.size()));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> length(2, k_hi);
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const std::size_t k = length(rng);
    for (std::size_t a = 0; a < k; ++a) {
      std::uniform_int_distribution<std::size_t> pick(a, pairs.size() - 1);
      std::swap(pairs[a], pairs[pick(rng)]);
    }
    double original = 0.0, shifted = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      original += c.cost(pairs[a].first, pairs[a].second);
      shifted += c.cost(pairs[a].first, pairs[(a + 1) % k].second);
    }
    ++report.trials;
    if (!std::isfinite(shifted)) continue;
    const double margin = shifted - original;
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -1e-9) ++report.violations;
  }
  return report;
}

}  // namespace lorentz_ot
