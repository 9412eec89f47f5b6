#include "lorentz_ot/feasibility.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "lorentz_ot/network.hpp"

namespace lorentz_ot {

std::vector<Index> CausalRelation::future_of(std::span<const Index> sources) const {
  std::vector<Index> out;
  for (Index j = 0; j < cols(); ++j)
    for (const Index i : sources)
      if (adjacency(i, j)) {
        out.push_back(j);
        break;
      }
  return out;
}

std::vector<Index> CausalRelation::past_of(std::span<const Index> targets) const {
  std::vector<Index> out;
  for (Index i = 0; i < rows(); ++i)
    for (const Index j : targets)
      if (adjacency(i, j)) {
        out.push_back(i);
        break;
      }
  return out;
}

const char* to_string(Side side) { return side == Side::source ? "source" : "target"; }

CausalRelation build_relation(const SpacetimeModel& model, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be nonnegative");
  if (mu.spatial_dim() != model.spatial_dim() || nu.spatial_dim() != model.spatial_dim())
    throw InvalidInput("measure dimension does not match the model");
  CausalRelation rel;
  rel.epsilon = epsilon;
  rel.adjacency.setConstant(mu.size(), nu.size(), false);
  for (Index i = 0; i < mu.size(); ++i) {
    const Event& x = mu.points()[static_cast<std::size_t>(i)];
    for (Index j = 0; j < nu.size(); ++j) {
      const Event& y = nu.points()[static_cast<std::size_t>(j)];
      bool ok = model.precedes(x, y);
      if (!ok && epsilon > 0.0)
        ok = model.precedes(x, Event(y.t + epsilon, y.x)) || model.precedes(x, Event(y.t - epsilon, y.x));
      rel.adjacency(i, j) = ok;
    }
  }
  return rel;
}

namespace {

void check_shape(const CausalRelation& rel, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (rel.rows() != mu.size() || rel.cols() != nu.size())
    throw InvalidInput("relation shape does not match the measures");
}

std::vector<Index> bits_to_indices(std::uint32_t mask, Index size) {
  std::vector<Index> out;
  for (Index k = 0; k < size; ++k)
    if (mask & (std::uint32_t{1} << k)) out.push_back(k);
  return out;
}

}  // namespace

std::optional<ViolatingSet> hall_bruteforce(const CausalRelation& rel, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu) {
  check_shape(rel, mu, nu);
  const Index m = rel.rows(), n = rel.cols();
  if (m > 20 || n > 20) throw SizeError("hall_bruteforce supports at most 20 atoms per side");
  const SharedCounts counts = shared_counts(mu, nu);
  const auto& alpha = counts.source.counts;
  const auto& beta = counts.target.counts;

  // Neighbourhood bitmasks make J^± of a subset a single OR per element.
  std::vector<std::uint32_t> row_mask(static_cast<std::size_t>(m), 0), col_mask(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (rel.adjacency(i, j)) {
        row_mask[static_cast<std::size_t>(i)] |= std::uint32_t{1} << j;
        col_mask[static_cast<std::size_t>(j)] |= std::uint32_t{1} << i;
      }
  auto mass = [](const std::vector<std::int64_t>& w, std::uint32_t mask) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (mask & (std::uint32_t{1} << k)) s += w[k];
    return s;
  };

  for (std::uint32_t a = 1; a < (std::uint32_t{1} << m); ++a) {
    std::uint32_t future = 0;
    for (Index i = 0; i < m; ++i)
      if (a & (std::uint32_t{1} << i)) future |= row_mask[static_cast<std::size_t>(i)];
    if (mass(beta, future) < mass(alpha, a)) return ViolatingSet{Side::source, bits_to_indices(a, m)};
  }
  for (std::uint32_t b = 1; b < (std::uint32_t{1} << n); ++b) {
    std::uint32_t past = 0;
    for (Index j = 0; j < n; ++j)
      if (b & (std::uint32_t{1} << j)) past |= col_mask[static_cast<std::size_t>(j)];
    if (mass(alpha, past) < mass(beta, b)) return ViolatingSet{Side::target, bits_to_indices(b, n)};
  }
  return std::nullopt;
}

FeasibilityVerdict j_related(const CausalRelation& rel, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu) {
  check_shape(rel, mu, nu);
  const Index m = rel.rows(), n = rel.cols();
  const SharedCounts counts = shared_counts(mu, nu);
  const std::int64_t total = counts.source.denominator;

  const int source = 0;
  const int sink = static_cast<int>(m + n + 1);
  network::FlowNetwork net(static_cast<int>(m + n + 2));
  for (Index i = 0; i < m; ++i)
    net.add_arc(source, static_cast<int>(1 + i), counts.source.counts[static_cast<std::size_t>(i)]);
  std::vector<std::pair<std::pair<int, int>, std::pair<Index, Index>>> edges;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (rel.adjacency(i, j))
        edges.push_back({net.add_arc(static_cast<int>(1 + i), static_cast<int>(1 + m + j), network::kUnbounded),
                         {i, j}});
  for (Index j = 0; j < n; ++j)
    net.add_arc(static_cast<int>(1 + m + j), sink, counts.target.counts[static_cast<std::size_t>(j)]);

  FeasibilityVerdict verdict;
  verdict.denominator = total;
  const std::int64_t flow = net.max_flow(source, sink);
  if (flow == total) {
    verdict.related = true;
    CountMatrix c = CountMatrix::Zero(m, n);
    for (const auto& [handle, ij] : edges) c(ij.first, ij.second) = net.arc(handle).flow;
    verdict.witness_coupling = c.cast<double>() / static_cast<double>(total);
    verdict.witness_counts = std::move(c);
    return verdict;
  }
  const std::vector<bool> reach = net.residual_reachable(source);
  ViolatingSet set{Side::source, {}};
  for (Index i = 0; i < m; ++i)
    if (reach[static_cast<std::size_t>(1 + i)]) set.indices.push_back(i);
  verdict.violating_set = std::move(set);
  return verdict;
}

namespace {

bool augment(const BoolMatrix& adj, Index row, std::vector<Index>& match_col, std::vector<bool>& seen) {
  for (Index j = 0; j < adj.cols(); ++j) {
    if (!adj(row, j) || seen[static_cast<std::size_t>(j)]) continue;
    seen[static_cast<std::size_t>(j)] = true;
    const Index owner = match_col[static_cast<std::size_t>(j)];
    if (owner < 0 || augment(adj, owner, match_col, seen)) {
      match_col[static_cast<std::size_t>(j)] = row;
      return true;
    }
  }
  return false;
}

}  // namespace

PermutationResult extract_permutation(const CausalRelation& rel) {
  const Index n = rel.rows();
  if (rel.cols() != n) throw InvalidInput("extract_permutation needs a square relation");
  std::vector<Index> match_col(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen;
  Index unmatched = -1;
  for (Index i = 0; i < n; ++i) {
    seen.assign(static_cast<std::size_t>(n), false);
    if (!augment(rel.adjacency, i, match_col, seen) && unmatched < 0) unmatched = i;
  }

  PermutationResult out;
  if (unmatched < 0) {
    std::vector<Index> sigma(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) sigma[static_cast<std::size_t>(match_col[static_cast<std::size_t>(j)])] = j;
    out.permutation = std::move(sigma);
    return out;
  }
  // Rows reachable from the unmatched row by alternating paths: |N(R)| = |R| − 1.
  std::vector<bool> row_in(static_cast<std::size_t>(n), false), col_in(static_cast<std::size_t>(n), false);
  std::vector<Index> stack{unmatched};
  row_in[static_cast<std::size_t>(unmatched)] = true;
  while (!stack.empty()) {
    const Index r = stack.back();
    stack.pop_back();
    for (Index j = 0; j < n; ++j) {
      if (!rel.adjacency(r, j) || col_in[static_cast<std::size_t>(j)]) continue;
      col_in[static_cast<std::size_t>(j)] = true;
      const Index owner = match_col[static_cast<std::size_t>(j)];
      if (owner >= 0 && !row_in[static_cast<std::size_t>(owner)]) {
        row_in[static_cast<std::size_t>(owner)] = true;
        stack.push_back(owner);
      }
    }
  }
  for (Index k = 0; k < n; ++k) {
    if (row_in[static_cast<std::size_t>(k)]) out.deficient_rows.push_back(k);
    if (col_in[static_cast<std::size_t>(k)]) out.deficient_neighbours.push_back(k);
  }
  return out;
}

bool is_unique_perfect_matching(const CausalRelation& rel, std::span<const Index> sigma) {
  const Index n = rel.rows();
  if (rel.cols() != n || static_cast<Index>(sigma.size()) != n)
    throw InvalidInput("matching size does not match the relation");
  std::vector<Index> owner(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index j = sigma[static_cast<std::size_t>(i)];
    if (j < 0 || j >= n || owner[static_cast<std::size_t>(j)] >= 0 || !rel.adjacency(i, j))
      throw InvalidInput("sigma is not a perfect matching inside the relation");
    owner[static_cast<std::size_t>(j)] = i;
  }
  // Row graph i → owner(j) for admissible non-matching (i, j); another perfect
  // matching exists iff this graph has a cycle. Kahn's algorithm detects it.
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (rel.adjacency(i, j) && j != sigma[static_cast<std::size_t>(i)]) ++indegree[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])];
  std::vector<Index> ready;
  for (Index i = 0; i < n; ++i)
    if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
  Index removed = 0;
  while (!ready.empty()) {
    const Index i = ready.back();
    ready.pop_back();
    ++removed;
    for (Index j = 0; j < n; ++j)
      if (rel.adjacency(i, j) && j != sigma[static_cast<std::size_t>(i)]) {
        const auto k = static_cast<std::size_t>(owner[static_cast<std::size_t>(j)]);
        if (--indegree[k] == 0) ready.push_back(static_cast<Index>(k));
      }
  }
  return removed == n;
}

namespace {

Subproblem restrict_pair(const CausalRelation& rel, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const SharedCounts& counts, std::vector<Index> rows, std::vector<Index> cols) {
  std::int64_t mass = 0;
  for (const Index i : rows) mass += counts.source.counts[static_cast<std::size_t>(i)];
  std::vector<Event> xs, ys;
  std::vector<double> wx, wy;
  for (const Index i : rows) {
    xs.push_back(mu.points()[static_cast<std::size_t>(i)]);
    wx.push_back(static_cast<double>(counts.source.counts[static_cast<std::size_t>(i)]) / static_cast<double>(mass));
  }
  for (const Index j : cols) {
    ys.push_back(nu.points()[static_cast<std::size_t>(j)]);
    wy.push_back(static_cast<double>(counts.target.counts[static_cast<std::size_t>(j)]) / static_cast<double>(mass));
  }
  Subproblem sub{make_measure(std::move(xs), std::move(wx)), make_measure(std::move(ys), std::move(wy)),
                 CausalRelation{}, std::move(rows), std::move(cols)};
  sub.relation.epsilon = rel.epsilon;
  sub.relation.adjacency.resize(static_cast<Index>(sub.source_indices.size()), static_cast<Index>(sub.target_indices.size()));
  for (std::size_t a = 0; a < sub.source_indices.size(); ++a)
    for (std::size_t b = 0; b < sub.target_indices.size(); ++b)
      sub.relation.adjacency(static_cast<Index>(a), static_cast<Index>(b)) =
          rel.adjacency(sub.source_indices[a], sub.target_indices[b]);
  return sub;
}

}  // namespace

TightSplit tight_split(const CausalRelation& rel, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       std::span<const Index> source_set) {
  check_shape(rel, mu, nu);
  std::vector<Index> a(source_set.begin(), source_set.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  for (const Index i : a)
    if (i < 0 || i >= rel.rows()) throw InvalidInput("source index out of range");

  const SharedCounts counts = shared_counts(mu, nu);
  const std::vector<Index> future = rel.future_of(a);
  std::int64_t mass_a = 0, mass_future = 0;
  for (const Index i : a) mass_a += counts.source.counts[static_cast<std::size_t>(i)];
  for (const Index j : future) mass_future += counts.target.counts[static_cast<std::size_t>(j)];
  const std::int64_t total = counts.source.denominator;
  if (mass_a <= 0 || mass_a >= total || mass_a != mass_future) {
    std::ostringstream msg;
    msg << "source set is not tight: mu(A) = " << mass_a << "/" << total << ", nu(J+(A)) = " << mass_future
        << "/" << total;
    throw PreconditionError(msg.str());
  }

  std::vector<Index> a_c, future_c;
  for (Index i = 0; i < rel.rows(); ++i)
    if (!std::binary_search(a.begin(), a.end(), i)) a_c.push_back(i);
  for (Index j = 0; j < rel.cols(); ++j)
    if (!std::binary_search(future.begin(), future.end(), j)) future_c.push_back(j);

  return TightSplit{restrict_pair(rel, mu, nu, counts, std::move(a), future),
                    restrict_pair(rel, mu, nu, counts, std::move(a_c), std::move(future_c))};
}

}  // namespace lorentz_ot
