#include <random>

#include <gtest/gtest.h>

#include "lorentz_ot/errors.hpp"
#include "lorentz_ot/feasibility.hpp"
#include "support.hpp"

namespace lorentz_ot {
namespace {

using testing::ev;
using testing::relation_of;
using testing::uniform;

DiscreteMeasure uniform_line(int n, double t) {
  std::vector<Event> pts;
  for (int k = 0; k < n; ++k) pts.push_back(ev(t, {static_cast<double>(k)}));
  return uniform(pts);
}

struct Instance {
  CausalRelation rel;
  DiscreteMeasure mu, nu;
  std::vector<long> alpha, beta;
};

Instance random_instance(std::mt19937_64& rng, int max_atoms, double density) {
  Instance in;
  const int m = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_atoms));
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_atoms));
  const int denominator = std::max(m, n) + static_cast<int>(rng() % 12);
  std::bernoulli_distribution edge(density);
  in.rel.adjacency.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) in.rel.adjacency(i, j) = edge(rng);
  const auto wa = testing::random_counts(rng, static_cast<std::size_t>(m), denominator);
  const auto wb = testing::random_counts(rng, static_cast<std::size_t>(n), denominator);
  for (const double w : wa) in.alpha.push_back(std::lround(w * denominator));
  for (const double w : wb) in.beta.push_back(std::lround(w * denominator));
  in.mu = make_measure(testing::random_events(rng, static_cast<std::size_t>(m), 0, 1, 1, 1), wa);
  in.nu = make_measure(testing::random_events(rng, static_cast<std::size_t>(n), 2, 3, 1, 1), wb);
  return in;
}

TEST(BuildRelation, Examples) {
  const auto m1 = make_minkowski(1);
  const DiscreteMeasure x = uniform({ev(0, {0})});
  EXPECT_TRUE(build_relation(*m1, x, uniform({ev(1, {0})})).adjacency(0, 0));
  const DiscreteMeasure miss = uniform({ev(1, {1.05})});
  EXPECT_FALSE(build_relation(*m1, x, miss, 0.0).adjacency(0, 0));
  EXPECT_TRUE(build_relation(*m1, x, miss, 0.1).adjacency(0, 0));
  EXPECT_THROW(build_relation(*m1, x, miss, -1.0), InvalidInput);
}

TEST(BuildRelation, UnitDiscsAroundSegment) {
  const auto m2 = make_minkowski(2);
  std::vector<Event> src, tgt;
  for (int k = 0; k <= 4; ++k) src.push_back(ev(0, {0.25 * k, 0}));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.5, 2.5);
  for (int k = 0; k < 40; ++k) tgt.push_back(ev(1, {u(rng), u(rng) - 0.5}));
  const CausalRelation rel = build_relation(*m2, uniform(src), uniform(tgt));
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < tgt.size(); ++j)
      EXPECT_EQ(rel.adjacency(static_cast<Index>(i), static_cast<Index>(j)), (tgt[j].x - src[i].x).norm() <= 1.0);
}

TEST(BuildRelation, EpsilonMonotone) {
  const auto m = make_minkowski(1);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = uniform(testing::random_events(rng, 4, 0, 1, 1, 1));
    const auto nu = uniform(testing::random_events(rng, 4, 0.5, 1.5, 1, 1));
    const bool base = j_related(build_relation(*m, mu, nu), mu, nu).related;
    for (const double eps : {0.01, 0.1, 1.0}) {
      const CausalRelation fat = build_relation(*m, mu, nu, eps);
      EXPECT_TRUE(((build_relation(*m, mu, nu).adjacency && !fat.adjacency) == false).all());
      if (base) EXPECT_TRUE(j_related(fat, mu, nu).related);
    }
  }
}

TEST(HallBruteforce, Examples) {
  const DiscreteMeasure mu2 = uniform_line(2, 0), nu2 = uniform_line(2, 5);
  EXPECT_FALSE(hall_bruteforce(relation_of({{1, 0}, {0, 1}}), mu2, nu2));
  const auto v = hall_bruteforce(relation_of({{1, 0}, {1, 0}}), mu2, nu2);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->side, Side::source);
  EXPECT_EQ(v->indices, (std::vector<Index>{0, 1}));
  EXPECT_FALSE(hall_bruteforce(relation_of({{1, 0}, {1, 1}}), mu2, nu2));

  CausalRelation big;
  big.adjacency.setConstant(21, 1, true);
  EXPECT_THROW(hall_bruteforce(big, uniform_line(21, 0), uniform_line(1, 5)), SizeError);
}

TEST(JRelated, Examples) {
  const DiscreteMeasure mu2 = uniform_line(2, 0), nu2 = uniform_line(2, 5);
  const FeasibilityVerdict ok = j_related(relation_of({{1, 0}, {1, 1}}), mu2, nu2);
  ASSERT_TRUE(ok.related);
  EXPECT_FALSE(ok.violating_set);
  EXPECT_EQ(*ok.witness_coupling, (Eigen::Matrix2d() << 0.5, 0, 0, 0.5).finished());

  const FeasibilityVerdict bad = j_related(relation_of({{1, 0}, {1, 0}}), mu2, nu2);
  ASSERT_FALSE(bad.related);
  EXPECT_FALSE(bad.witness_coupling);
  EXPECT_EQ(bad.violating_set->indices, (std::vector<Index>{0, 1}));

  const auto m = make_minkowski(1);
  const DiscreteMeasure x = uniform({ev(0, {0})}), y = uniform({ev(1, {0.5})});
  const FeasibilityVerdict dirac = j_related(build_relation(*m, x, y), x, y);
  ASSERT_TRUE(dirac.related);
  EXPECT_EQ((*dirac.witness_coupling)(0, 0), 1.0);
  const DiscreteMeasure far = uniform({ev(1, {2})});
  EXPECT_FALSE(j_related(build_relation(*m, x, far), x, far).related);
}

TEST(JRelated, AgreesWithOraclesAndIsSound) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const Instance in = random_instance(rng, 6, 0.45);
    const FeasibilityVerdict v = j_related(in.rel, in.mu, in.nu);
    const bool oracle = testing::hall_holds_oracle(in.rel.adjacency, in.alpha, in.beta);
    EXPECT_EQ(v.related, oracle);
    EXPECT_EQ(v.related, !hall_bruteforce(in.rel, in.mu, in.nu));
    if (v.related) {
      const Eigen::MatrixXd& c = *v.witness_coupling;
      EXPECT_LE((c.rowwise().sum() - in.mu.weights()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE((c.colwise().sum().transpose() - in.nu.weights()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_TRUE(((c.array() > 0.0) && !in.rel.adjacency).count() == 0);
    } else {
      const auto& a = v.violating_set->indices;
      long lhs = 0, rhs = 0;
      for (const Index i : a) lhs += in.alpha[static_cast<std::size_t>(i)];
      for (const Index j : in.rel.future_of(a)) rhs += in.beta[static_cast<std::size_t>(j)];
      EXPECT_LT(rhs, lhs);
    }
  }
}

TEST(ExtractPermutation, Examples) {
  CausalRelation id;
  id.adjacency = BoolMatrix::Zero(5, 5);
  for (int k = 0; k < 5; ++k) id.adjacency(k, k) = true;
  EXPECT_EQ(*extract_permutation(id).permutation, (std::vector<Index>{0, 1, 2, 3, 4}));

  CausalRelation full;
  full.adjacency.setConstant(4, 4, true);
  const auto a = extract_permutation(full), b = extract_permutation(full);
  ASSERT_TRUE(a.permutation);
  EXPECT_EQ(*a.permutation, *b.permutation);

  const PermutationResult r = extract_permutation(relation_of({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
  EXPECT_FALSE(r.permutation);
  EXPECT_EQ(r.deficient_rows, (std::vector<Index>{0, 2}));
  EXPECT_EQ(r.deficient_neighbours, (std::vector<Index>{1}));
}

TEST(ExtractPermutation, KonigDualityExhaustive) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    CausalRelation rel;
    rel.adjacency.resize(n, n);
    std::bernoulli_distribution edge(0.35);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rel.adjacency(i, j) = edge(rng);
    const std::vector<long> ones(static_cast<std::size_t>(n), 1);
    const bool hall = testing::hall_holds_oracle(rel.adjacency, ones, ones);
    const PermutationResult r = extract_permutation(rel);
    EXPECT_EQ(r.permutation.has_value(), hall);
    if (r.permutation) {
      for (int i = 0; i < n; ++i) EXPECT_TRUE(rel.adjacency(i, (*r.permutation)[static_cast<std::size_t>(i)]));
    } else {
      EXPECT_LT(r.deficient_neighbours.size(), r.deficient_rows.size());
      EXPECT_EQ(rel.future_of(r.deficient_rows), r.deficient_neighbours);
    }
  }
}

TEST(UniqueMatching, DetectsAlternatingCycles) {
  const std::vector<Index> id{0, 1, 2};
  EXPECT_TRUE(is_unique_perfect_matching(relation_of({{1, 1, 1}, {0, 1, 1}, {0, 0, 1}}), id));
  EXPECT_FALSE(is_unique_perfect_matching(relation_of({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}), id));
  EXPECT_THROW(is_unique_perfect_matching(relation_of({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}), id), InvalidInput);
}

TEST(TightSplit, BlockDiagonal) {
  const DiscreteMeasure mu = uniform_line(4, 0), nu = uniform_line(4, 9);
  const CausalRelation rel = relation_of({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}});
  const std::vector<Index> a{0, 1};
  const TightSplit s = tight_split(rel, mu, nu, a);
  EXPECT_EQ(s.inside.source_indices, (std::vector<Index>{0, 1}));
  EXPECT_EQ(s.inside.target_indices, (std::vector<Index>{0, 1}));
  EXPECT_EQ(s.outside.source_indices, (std::vector<Index>{2, 3}));
  EXPECT_EQ(s.inside.mu.weights()(0), 0.5);
  EXPECT_TRUE(s.inside.relation.adjacency.all());
  EXPECT_TRUE(s.outside.relation.adjacency.all());

  const std::vector<Index> all{0, 1, 2, 3};
  EXPECT_THROW(tight_split(rel, mu, nu, all), PreconditionError);
  const std::vector<Index> loose{0};
  EXPECT_THROW(tight_split(rel, mu, nu, loose), PreconditionError);
}

TEST(TightSplit, ChildrenInheritHall) {
  std::mt19937_64 rng(31);
  int tested = 0;
  while (tested < 200) {
    const Instance in = random_instance(rng, 8, 0.5);
    if (hall_bruteforce(in.rel, in.mu, in.nu)) continue;
    const Index m = in.rel.rows();
    // Find a tight source set among all subsets.
    for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
      std::vector<Index> a;
      long ma = 0, mf = 0;
      for (Index i = 0; i < m; ++i)
        if (mask >> i & 1u) {
          a.push_back(i);
          ma += in.alpha[static_cast<std::size_t>(i)];
        }
      for (const Index j : in.rel.future_of(a)) mf += in.beta[static_cast<std::size_t>(j)];
      if (ma != mf) continue;
      const TightSplit s = tight_split(in.rel, in.mu, in.nu, a);
      EXPECT_FALSE(hall_bruteforce(s.inside.relation, s.inside.mu, s.inside.nu));
      EXPECT_FALSE(hall_bruteforce(s.outside.relation, s.outside.mu, s.outside.nu));
      ++tested;
      break;
    }
  }
}

}  // namespace
}  // namespace lorentz_ot
