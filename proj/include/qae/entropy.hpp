#pragma once

#include <cmath>

#include <Eigen/Core>

namespace qae {

/// Shannon entropy in bits of the distribution proportional to `weights`.
/// Zero-weight entries contribute nothing (0 log 0 = 0); an all-zero input
/// yields 0.
template <typename Derived>
typename Derived::Scalar shannon_entropy(const Eigen::ArrayBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = weights.sum();
  if (!(total > Scalar(0))) return Scalar(0);
  const auto p = weights / total;
  const Scalar h = -(p > Scalar(0)).select(p * p.log() / std::log(Scalar(2)), Scalar(0)).sum();
  // A single non-zero weight must give exactly zero, not -0 or rounding noise.
  return (weights > Scalar(0)).count() <= 1 ? Scalar(0) : h;
}

template <typename Derived>
typename Derived::Scalar shannon_entropy(const Eigen::MatrixBase<Derived>& weights) {
  return shannon_entropy(weights.array());
}

/// Entropy of a two-outcome distribution given raw counts.
template <typename Scalar>
Scalar binary_entropy(Scalar a, Scalar b) {
  Eigen::Array<Scalar, 2, 1> w(a, b);
  return shannon_entropy(w);
}

/// Row-weighted conditional entropy H(D|A) from a contingency table with one
/// row per value of A and one column per outcome of D.
template <typename Derived>
typename Derived::Scalar conditional_entropy(const Eigen::ArrayBase<Derived>& table) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = table.sum();
  if (!(total > Scalar(0))) return Scalar(0);
  Scalar h(0);
  for (Eigen::Index v = 0; v < table.rows(); ++v) {
    const Scalar row_total = table.row(v).sum();
    if (row_total > Scalar(0)) {
      h += row_total / total * shannon_entropy(table.row(v).transpose());
    }
  }
  return h;
}

}  // namespace qae
