#pragma once

// Descriptive statistics over Eigen dense expressions. Any vector-shaped
// expression works (columns, row gathers, arrays, Map over std::vector).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "regsamp/errors.hpp"

namespace regsamp {

template <typename Derived>
typename Derived::Scalar mean(const Eigen::DenseBase<Derived>& x) {
  if (x.size() == 0) throw ValidationError("mean of an empty vector");
  return x.derived().mean();
}

/// Sample standard deviation with divisor n-1; nullopt when n < 2.
template <typename Derived>
std::optional<typename Derived::Scalar> sample_std(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto n = x.size();
  if (n < 2) return std::nullopt;
  const Scalar m = x.derived().mean();
  const Scalar ss = (x.derived().array() - m).square().sum();
  return std::sqrt(ss / static_cast<Scalar>(n - 1));
}

/// Percentile of already-sorted data by linear interpolation between order
/// statistics: h = (n-1)*p, result = x[floor h] + (h - floor h)*(x[floor h + 1] - x[floor h]).
template <typename Scalar>
Scalar percentile_sorted(const std::vector<Scalar>& sorted, double p) {
  if (sorted.empty()) throw ValidationError("percentile of an empty vector");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("percentile level must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + static_cast<Scalar>(h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

template <typename Scalar>
Scalar percentile(std::vector<Scalar> data, double p) {
  std::sort(data.begin(), data.end());
  return percentile_sorted(data, p);
}

/// Pearson correlation; nullopt if either side has zero variance.
template <typename DerivedA, typename DerivedB>
std::optional<double> pearson(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b) {
  if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const Eigen::ArrayXd da = a.derived().array().template cast<double>() - static_cast<double>(a.derived().mean());
  const Eigen::ArrayXd db = b.derived().array().template cast<double>() - static_cast<double>(b.derived().mean());
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return (da * db).sum() / std::sqrt(saa * sbb);
}

/// Average ranks (0-based, ties share the mean rank).
template <typename Derived>
Eigen::ArrayXd average_ranks(const Eigen::DenseBase<Derived>& x) {
  const auto n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return x.derived()(i) < x.derived()(j); });
  Eigen::ArrayXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && x.derived()(order[j + 1]) == x.derived()(order[i])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[k]) = avg;
    i = j + 1;
  }
  return ranks;
}

template <typename DerivedA, typename DerivedB>
std::optional<double> spearman(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b) {
  return pearson(average_ranks(a), average_ranks(b));
}

}  // namespace regsamp
