#include "selint/dataset.hpp"

#include <string>

#include "selint/error.hpp"

namespace selint {

std::size_t Dataset::selected_count() const noexcept {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) count += d[i] == 1.0;
  return count;
}

void Dataset::validate() const {
  const auto rows = d.size();
  if (y.size() != rows || X.rows() != rows || Z.rows() != rows)
    fail(ErrorKind::InvalidArgument, "dataset blocks have inconsistent row counts");
  if (rows < 2) fail(ErrorKind::InsufficientSample, "need at least 2 observations, got " + std::to_string(rows));
  for (Eigen::Index i = 0; i < rows; ++i)
    if (d[i] != 0.0 && d[i] != 1.0)
      fail(ErrorKind::InvalidArgument, "selection indicator not in {0, 1} at row " + std::to_string(i + 1));
}

Dataset Dataset::take(std::span<const Eigen::Index> rows) const {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.d.resize(m);
  out.y.resize(m);
  out.X.resize(m, X.cols());
  out.Z.resize(m, Z.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index src = rows[static_cast<std::size_t>(r)];
    out.d[r] = d[src];
    out.y[r] = y[src];
    out.X.row(r) = X.row(src);
    out.Z.row(r) = Z.row(src);
  }
  return out;
}

double selected_mean_y(const Dataset& data) {
  double acc = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < data.d.size(); ++i) {
    if (data.d[i] == 1.0) {
      acc += data.y[i];
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::InsufficientSelected, "no selected observations");
  return acc / static_cast<double>(count);
}

Vector selected_mean_x(const Dataset& data) {
  Vector acc = Vector::Zero(data.X.cols());
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < data.d.size(); ++i) {
    if (data.d[i] == 1.0) {
      acc += data.X.row(i).transpose();
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::InsufficientSelected, "no selected observations");
  return acc / static_cast<double>(count);
}

}  // namespace selint
