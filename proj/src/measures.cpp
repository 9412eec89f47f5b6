#include "lorentz_ot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lorentz_ot/errors.hpp"

namespace lorentz_ot {

namespace {

constexpr double kCountTolerance = 1e-9;

bool representable(std::span<const double> weights, std::int64_t denominator) {
  std::int64_t sum = 0;
  for (const double w : weights) {
    const double scaled = w * static_cast<double>(denominator);
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > kCountTolerance || nearest < 1.0) return false;
    sum += static_cast<std::int64_t>(nearest);
  }
  return sum == denominator;
}

// Denominator of the first continued-fraction convergent p/q of w with
// |w·q − p| ≤ tolerance, or 0 when q would exceed the bound.
std::int64_t convergent_denominator(double w, std::int64_t bound) {
  double x = w;
  std::int64_t q_prev = 0, q = 1;
  std::int64_t p_prev = 1, p = static_cast<std::int64_t>(std::floor(x));
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(w * static_cast<double>(q) - static_cast<double>(p)) <= kCountTolerance) return q;
    if (frac <= 0.0) return q;
    x = 1.0 / frac;
    const auto term = static_cast<std::int64_t>(std::floor(x));
    frac = x - std::floor(x);
    const std::int64_t q_next = term * q + q_prev;
    const std::int64_t p_next = term * p + p_prev;
    if (q_next > bound || q_next <= 0) return 0;
    q_prev = q;
    q = q_next;
    p_prev = p;
    p = p_next;
  }
  return 0;
}

}  // namespace

DiscreteMeasure make_measure(std::vector<Event> points, std::vector<double> weights) {
  if (points.empty()) throw InvalidInput("measure support is empty");
  if (points.size() != weights.size()) throw InvalidInput("points and weights differ in length");
  const Index d = points.front().spatial_dim();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].spatial_dim() != d) throw InvalidInput("points have mixed spatial dimensions");
    if (!points[i].is_finite()) throw InvalidInput("point coordinates must be finite");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      std::ostringstream msg;
      msg << "weight " << i << " is not positive";
      throw InvalidInput(msg.str());
    }
  }
  // Lexicographic sort on coordinates to find duplicates in O(n log n).
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const Eigen::VectorXd ca = points[a].coords();
    const Eigen::VectorXd cb = points[b].coords();
    return std::lexicographical_compare(ca.data(), ca.data() + ca.size(), cb.data(), cb.data() + cb.size());
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (points[order[k]] == points[order[k - 1]]) {
      std::ostringstream msg;
      msg << "duplicate point at indices " << std::min(order[k], order[k - 1]) << " and "
          << std::max(order[k], order[k - 1]);
      throw InvalidInput(msg.str());
    }
  }

  DiscreteMeasure m;
  m.points_ = std::move(points);
  m.weights_ = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Index>(weights.size()));
  const double total = m.weights_.sum();
  if (std::abs(total - 1.0) > 1e-12) m.weights_ /= total;
  return m;
}

bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return a.points_ == b.points_ && a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
}

std::int64_t suggest_denominator(std::span<const double> weights, std::int64_t max_denominator) {
  std::int64_t common = 1;
  for (const double w : weights) {
    const std::int64_t q = convergent_denominator(w, max_denominator);
    if (q == 0) return 0;
    common = std::lcm(common, q);
    if (common > max_denominator) return 0;
  }
  return representable(weights, common) ? common : 0;
}

IntegerWeights to_counts(const DiscreteMeasure& m, std::int64_t denominator) {
  if (denominator < 1) throw InvalidInput("denominator must be positive");
  std::span<const double> w(m.weights().data(), static_cast<std::size_t>(m.size()));
  if (!representable(w, denominator)) {
    const std::int64_t hint = suggest_denominator(w);
    std::ostringstream msg;
    msg << "weights are not multiples of 1/" << denominator;
    if (hint > 0) msg << "; try denominator " << hint;
    throw RationalizationError(msg.str(), hint);
  }
  IntegerWeights out;
  out.denominator = denominator;
  out.counts.reserve(w.size());
  for (const double x : w) out.counts.push_back(std::llround(x * static_cast<double>(denominator)));
  return out;
}

std::vector<Event> expand_uniform(const DiscreteMeasure& m, std::int64_t denominator) {
  const IntegerWeights iw = to_counts(m, denominator);
  std::vector<Event> out;
  out.reserve(static_cast<std::size_t>(denominator));
  for (std::size_t i = 0; i < iw.counts.size(); ++i)
    for (std::int64_t k = 0; k < iw.counts[i]; ++k) out.push_back(m.points()[i]);
  return out;
}

DiscreteMeasure aggregate(std::span<const Event> counted) {
  if (counted.empty()) throw InvalidInput("cannot aggregate an empty list");
  std::vector<Event> points;
  std::vector<std::int64_t> multiplicity;
  for (const Event& e : counted) {
    const auto it = std::find(points.begin(), points.end(), e);
    if (it == points.end()) {
      points.push_back(e);
      multiplicity.push_back(1);
    } else {
      ++multiplicity[static_cast<std::size_t>(it - points.begin())];
    }
  }
  std::vector<double> weights;
  weights.reserve(multiplicity.size());
  const auto n = static_cast<double>(counted.size());
  for (const std::int64_t k : multiplicity) weights.push_back(static_cast<double>(k) / n);
  return make_measure(std::move(points), std::move(weights));
}

namespace {

IntegerWeights round_onto(const DiscreteMeasure& m, std::int64_t denominator) {
  IntegerWeights out;
  out.denominator = denominator;
  const auto n = static_cast<std::size_t>(m.size());
  out.counts.resize(n);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = m.weights()(static_cast<Index>(i)) * static_cast<double>(denominator);
    out.counts[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(scaled)));
    assigned += out.counts[i];
    remainders.emplace_back(scaled - std::floor(scaled), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < denominator; k = (k + 1) % n, ++assigned)
    ++out.counts[remainders[k].second];
  // Over-assignment only happens through the floor-to-1 clamp.
  while (assigned > denominator) {
    bool changed = false;
    for (auto it = remainders.rbegin(); it != remainders.rend() && assigned > denominator; ++it) {
      auto& c = out.counts[it->second];
      if (c > 1) {
        --c;
        --assigned;
        changed = true;
      }
    }
    if (!changed) throw RationalizationError("support larger than the denominator bound", 0);
  }
  return out;
}

}  // namespace

SharedCounts shared_counts(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           std::int64_t max_denominator) {
  std::span<const double> wm(mu.weights().data(), static_cast<std::size_t>(mu.size()));
  std::span<const double> wn(nu.weights().data(), static_cast<std::size_t>(nu.size()));
  const std::int64_t dm = suggest_denominator(wm, max_denominator);
  const std::int64_t dn = suggest_denominator(wn, max_denominator);
  if (dm > 0 && dn > 0) {
    const std::int64_t common = std::lcm(dm, dn);
    if (common <= max_denominator)
      return SharedCounts{to_counts(mu, common), to_counts(nu, common), true};
  }
  return SharedCounts{round_onto(mu, max_denominator), round_onto(nu, max_denominator), false};
}

}  // namespace lorentz_ot
