#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "fairlr/dataset.hpp"

namespace fairlr::testing {

// The 8-row reference set: s, y and yhat as listed below, with one feature
// equal to the row index so that the dataset is well formed.
inline Dataset r8_dataset() {
  Matrix raw(8, 1);
  for (int i = 0; i < 8; ++i) raw(i, 0) = i;
  return Dataset::with_intercept(raw, {1, 1, 1, 1, 0, 0, 0, 0},
                                 {1, 1, 0, 0, 1, 1, 0, 0}, {"x1"});
}

inline std::vector<int> r8_predictions() { return {1, 0, 1, 0, 1, 1, 0, 0}; }

// Random dataset with both groups and both labels present. Labels follow a
// logistic model in the features so that fits are not degenerate.
inline Dataset random_dataset(std::mt19937_64& rng, int n, int d,
                              double feature_scale = 1.0) {
  std::normal_distribution<double> normal(0.0, feature_scale);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix raw(n, d);
  std::vector<int> s(static_cast<std::size_t>(n));
  std::vector<int> y(static_cast<std::size_t>(n));
  Vector w = Vector::NullaryExpr(d, [&] { return normal(rng); });
  for (int i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(i)] = unit(rng) < 0.4 ? 1 : 0;
    for (int j = 0; j < d; ++j)
      raw(i, j) = normal(rng) + 0.7 * s[static_cast<std::size_t>(i)] * (j == 0);
    const double p = sigmoid(raw.row(i).dot(w) + 0.5 * s[static_cast<std::size_t>(i)]);
    y[static_cast<std::size_t>(i)] = unit(rng) < p ? 1 : 0;
  }
  // Force both values of s and y to occur.
  s[0] = 0, s[1] = 1, y[0] = 0, y[1] = 1;
  s[2] = 0, s[3] = 1, y[2] = 1, y[3] = 0;
  std::vector<std::string> names;
  for (int j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  return Dataset::with_intercept(raw, std::move(s), std::move(y), names);
}

// Exact rational number with a positive denominator, kept in lowest terms.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction of(std::int64_t n, std::int64_t d) {
    const auto g = std::gcd(n, d);
    return {n / g, d / g};
  }
  [[nodiscard]] double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  bool operator==(const Fraction&) const = default;
};

inline bool operator<(const Fraction& a, const Fraction& b) {
  return a.num * b.den < b.num * a.den;
}

// P(event | condition, group) by direct enumeration over rows; empty when
// the conditioning event never happens in the group.
template <typename Event, typename Condition>
std::optional<Fraction> enumerate_rate(std::size_t n, int group,
                                       const std::vector<int>& s, Event event,
                                       Condition condition) {
  std::int64_t hits = 0;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] != group || !condition(i)) continue;
    ++total;
    if (event(i)) ++hits;
  }
  if (total == 0) return std::nullopt;
  return Fraction::of(hits, total);
}

// Oracle for the min-ratio comparison of two rationals, following the
// conventions 0/0 -> 1 and x/0 -> 0.
inline Fraction min_ratio(const Fraction& p0, const Fraction& p1) {
  if (p0.num == 0 && p1.num == 0) return {1, 1};
  if (p0.num == 0 || p1.num == 0) return {0, 1};
  const auto a = Fraction::of(p1.num * p0.den, p1.den * p0.num);
  const auto b = Fraction::of(p0.num * p1.den, p0.den * p1.num);
  return a < b ? a : b;
}

inline Fraction difference(const Fraction& p0, const Fraction& p1) {
  return Fraction::of(p1.num * p0.den - p0.num * p1.den, p0.den * p1.den);
}

// AUC by enumerating every (positive, negative) pair, ties counted 1/2;
// returned as the exact fraction (2 * concordant + ties) / (2 * pairs).
inline std::optional<Fraction> pairwise_auc(const std::vector<double>& scores,
                                            const std::vector<int>& labels) {
  std::int64_t twice_wins = 0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) twice_wins += 2;
      else if (scores[i] == scores[j]) twice_wins += 1;
    }
  }
  if (pairs == 0) return std::nullopt;
  return Fraction::of(twice_wins, 2 * pairs);
}

}  // namespace fairlr::testing
