#include "selint/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selint/error.hpp"

namespace selint {

Vector selection_index(const Matrix& Z, const Vector& gamma) {
  if (Z.cols() != gamma.size())
    fail(ErrorKind::InvalidArgument, "gamma has " + std::to_string(gamma.size()) + " entries, Z has " +
                                         std::to_string(Z.cols()) + " columns");
  if (!gamma.allFinite()) fail(ErrorKind::InvalidArgument, "gamma is not finite");
  if ((gamma.array() == 0.0).all()) fail(ErrorKind::DegenerateIndex, "gamma is identically zero");
  return Z * gamma;
}

IndexRanks eta_hat(const Matrix& Z, const Vector& gamma) {
  if (Z.rows() < 2) fail(ErrorKind::InsufficientSample, "need at least 2 observations");
  const Vector index = selection_index(Z, gamma);
  return eta_hat_from_index(std::span<const double>(index.data(), static_cast<std::size_t>(index.size())));
}

IndexRanks eta_hat_from_index(std::span<const double> index) {
  const std::size_t n = index.size();
  if (n < 2) fail(ErrorKind::InsufficientSample, "need at least 2 observations");
  std::vector<double> sorted(index.begin(), index.end());
  std::sort(sorted.begin(), sorted.end());
  IndexRanks ranks;
  ranks.values.resize(n);
  const auto total = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), index[i]) - sorted.begin();
    ranks.values[i] = static_cast<double>(count) / total;
  }
  return ranks;
}

double eta_hat_at(const Matrix& Z, const Vector& gamma, const Vector& z) {
  if (Z.rows() < 2) fail(ErrorKind::InsufficientSample, "need at least 2 observations");
  if (z.size() != Z.cols()) fail(ErrorKind::InvalidArgument, "query point has the wrong dimension");
  const Vector index = selection_index(Z, gamma);
  const double target = z.dot(gamma);
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < index.size(); ++j) count += index[j] <= target;
  return static_cast<double>(count) / static_cast<double>(index.size());
}

}  // namespace selint
