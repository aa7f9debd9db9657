#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace selint {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One observation block: selection indicator d, outcome y, outcome
/// covariates X (n x k) and selection covariates Z (n x l).
///
/// y is kept as observed; estimators mask unselected rows through d.
struct Dataset {
  Vector d;
  Vector y;
  Matrix X;
  Matrix Z;

  std::size_t n() const noexcept { return static_cast<std::size_t>(d.size()); }
  std::size_t k() const noexcept { return static_cast<std::size_t>(X.cols()); }
  std::size_t l() const noexcept { return static_cast<std::size_t>(Z.cols()); }
  std::size_t selected_count() const noexcept;

  // Throws InvalidArgument on inconsistent shapes, d outside {0, 1} or n < 2.
  void validate() const;

  // Rows listed in `rows` (duplicates allowed), in that order.
  Dataset take(std::span<const Eigen::Index> rows) const;
};

// Means over the selected (d = 1) rows.
double selected_mean_y(const Dataset& data);
Vector selected_mean_x(const Dataset& data);

}  // namespace selint
