#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace sla {

/// Row-major so that a sample is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Binary class labels, 0 or 1.
using Labels = std::vector<std::uint8_t>;

using Index = std::size_t;

} // namespace sla
