#pragma once

#include <span>
#include <vector>

#include "selint/dataset.hpp"

namespace selint {

/// Empirical-CDF ranks of the estimated selection index: entry i is the share
/// of indices that do not exceed index i. Ties share the highest rank.
struct IndexRanks {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const noexcept { return values[i]; }
};

// Z gamma, after checking gamma is finite and not identically zero.
Vector selection_index(const Matrix& Z, const Vector& gamma);

IndexRanks eta_hat(const Matrix& Z, const Vector& gamma);

// Same transform applied to a precomputed index.
IndexRanks eta_hat_from_index(std::span<const double> index);

/// Share of sample indices at or below the index of the query point z.
double eta_hat_at(const Matrix& Z, const Vector& gamma, const Vector& z);

}  // namespace selint
