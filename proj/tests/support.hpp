#pragma once

#include <cmath>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lorentz_ot/feasibility.hpp"
#include "lorentz_ot/geometry.hpp"
#include "lorentz_ot/measures.hpp"

namespace lorentz_ot::testing {

inline Event ev(double t, std::initializer_list<double> x) {
  Eigen::VectorXd v(static_cast<Index>(x.size()));
  Index k = 0;
  for (const double c : x) v(k++) = c;
  return Event(t, std::move(v));
}

inline DiscreteMeasure uniform(std::vector<Event> points) {
  const std::size_t n = points.size();
  return make_measure(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

inline CausalRelation relation_of(std::initializer_list<std::initializer_list<int>> rows) {
  CausalRelation rel;
  rel.adjacency.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (const int v : r) rel.adjacency(i, j++) = v != 0;
    ++i;
  }
  return rel;
}

/// Independent closed form: −√(Δt² − |Δx|²) on the future cone, +∞ elsewhere.
inline double minkowski_cost_oracle(const Event& p, const Event& q) {
  const double dt = q.t - p.t;
  const double dx2 = (q.x - p.x).squaredNorm();
  if (p == q) return 0.0;
  if (dt <= 0.0) return std::numeric_limits<double>::infinity();
  const double disc = dt * dt - dx2;
  if (disc < -1e-9 * std::max(dt * dt, dx2)) return std::numeric_limits<double>::infinity();
  return -std::sqrt(std::max(0.0, disc));
}

/// Random weights that are multiples of 1/denominator, each at least 1/denominator.
inline std::vector<double> random_counts(std::mt19937_64& rng, std::size_t atoms, int denominator) {
  std::vector<int> c(atoms, 1);
  std::uniform_int_distribution<std::size_t> pick(0, atoms - 1);
  for (int k = static_cast<int>(atoms); k < denominator; ++k) ++c[pick(rng)];
  std::vector<double> w;
  for (const int v : c) w.push_back(static_cast<double>(v) / denominator);
  return w;
}

inline std::vector<Event> random_events(std::mt19937_64& rng, std::size_t n, double t0, double t1, Index d,
                                        double spread) {
  std::uniform_real_distribution<double> time(t0, t1), space(-spread, spread);
  std::vector<Event> out;
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::VectorXd x(d);
    for (Index i = 0; i < d; ++i) x(i) = space(rng);
    out.emplace_back(time(rng), std::move(x));
  }
  return out;
}

/// Test-side Hall check over all subsets using rational counts.
inline bool hall_holds_oracle(const BoolMatrix& adj, const std::vector<long>& alpha, const std::vector<long>& beta) {
  const auto m = static_cast<std::size_t>(adj.rows()), n = static_cast<std::size_t>(adj.cols());
  for (unsigned a = 1; a < (1u << m); ++a) {
    long lhs = 0, rhs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      bool hit = false;
      for (std::size_t i = 0; i < m; ++i)
        if ((a >> i & 1u) && adj(static_cast<Index>(i), static_cast<Index>(j))) hit = true;
      if (hit) rhs += beta[j];
    }
    for (std::size_t i = 0; i < m; ++i)
      if (a >> i & 1u) lhs += alpha[i];
    if (rhs < lhs) return false;
  }
  for (unsigned b = 1; b < (1u << n); ++b) {
    long lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < m; ++i) {
      bool hit = false;
      for (std::size_t j = 0; j < n; ++j)
        if ((b >> j & 1u) && adj(static_cast<Index>(i), static_cast<Index>(j))) hit = true;
      if (hit) rhs += alpha[i];
    }
    for (std::size_t j = 0; j < n; ++j)
      if (b >> j & 1u) lhs += beta[j];
    if (rhs < lhs) return false;
  }
  return true;
}

}  // namespace lorentz_ot::testing
