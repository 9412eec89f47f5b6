#include <random>

#include <gtest/gtest.h>

#include "lorentz_ot/errors.hpp"
#include "lorentz_ot/measures.hpp"
#include "support.hpp"

namespace lorentz_ot {
namespace {

using testing::ev;

TEST(Measure, Normalizes) {
  const DiscreteMeasure a = make_measure({ev(0, {0})}, {2.0});
  EXPECT_EQ(a.weights()(0), 1.0);
  const DiscreteMeasure b = make_measure({ev(0, {0}), ev(0, {1})}, {1.0, 1.0});
  EXPECT_EQ(b.weights()(0), 0.5);
  EXPECT_EQ(b.weights()(1), 0.5);
}

TEST(Measure, RejectsBadInput) {
  EXPECT_THROW(make_measure({}, {}), InvalidInput);
  EXPECT_THROW(make_measure({ev(0, {0}), ev(0, {0})}, {0.5, 0.5}), InvalidInput);
  EXPECT_THROW(make_measure({ev(0, {0})}, {0.0}), InvalidInput);
  EXPECT_THROW(make_measure({ev(0, {0})}, {-1.0}), InvalidInput);
  EXPECT_THROW(make_measure({ev(0, {0}), ev(0, {1, 2})}, {0.5, 0.5}), InvalidInput);
  EXPECT_THROW(make_measure({ev(0, {0})}, {0.5, 0.5}), InvalidInput);
  EXPECT_THROW(make_measure({ev(0, {NAN})}, {1.0}), InvalidInput);
}

TEST(Measure, ExpandUniform) {
  const Event x1 = ev(0, {0}), x2 = ev(0, {1});
  const DiscreteMeasure half = make_measure({x1, x2}, {0.5, 0.5});
  EXPECT_EQ(expand_uniform(half, 2), (std::vector<Event>{x1, x2}));
  const DiscreteMeasure thirds = make_measure({x1, x2}, {2.0 / 3.0, 1.0 / 3.0});
  EXPECT_EQ(expand_uniform(thirds, 3), (std::vector<Event>{x1, x1, x2}));
  try {
    expand_uniform(half, 3);
    FAIL() << "expected a rationalization error";
  } catch (const RationalizationError& e) {
    EXPECT_EQ(e.suggested_denominator(), 2);
  }
}

TEST(Measure, ExpandAggregateRoundTrip) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t atoms = 1 + rng() % 6;
    const int denominator = static_cast<int>(atoms + rng() % 20);
    const auto pts = testing::random_events(rng, atoms, 0, 1, 2, 1.0);
    const DiscreteMeasure m = make_measure(pts, testing::random_counts(rng, atoms, denominator));
    EXPECT_NEAR(m.total_mass(), 1.0, 1e-12);
    const auto list = expand_uniform(m, denominator);
    EXPECT_EQ(static_cast<int>(list.size()), denominator);
    EXPECT_EQ(aggregate(list), m);
  }
}

TEST(Measure, SharedCounts) {
  const DiscreteMeasure mu = make_measure({ev(0, {0}), ev(0, {1})}, {0.5, 0.5});
  const DiscreteMeasure nu = make_measure({ev(1, {0}), ev(1, {1}), ev(1, {2})}, {1.0, 1.0, 1.0});
  const SharedCounts c = shared_counts(mu, nu);
  EXPECT_TRUE(c.exact);
  EXPECT_EQ(c.source.denominator, 6);
  EXPECT_EQ(c.source.counts, (std::vector<std::int64_t>{3, 3}));
  EXPECT_EQ(c.target.counts, (std::vector<std::int64_t>{2, 2, 2}));

  const DiscreteMeasure odd = make_measure({ev(0, {0}), ev(0, {1})}, {M_PI, 1.0});
  const SharedCounts r = shared_counts(odd, mu);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.source.counts[0] + r.source.counts[1], 1'000'000);
  EXPECT_EQ(r.target.counts[0] + r.target.counts[1], 1'000'000);
}

}  // namespace
}  // namespace lorentz_ot
