#pragma once

#include "sla/types.hpp"

#include <filesystem>

namespace sla {

/// Principal-component projection fitted once on the whole corpus.
struct PcaModel {
    Vector mean;                ///< per-feature centering offsets, length D
    Eigen::MatrixXd projection; ///< D x d, orthonormal columns
    Vector explained_variance;  ///< length d, non-increasing

    Index input_dims() const noexcept { return static_cast<Index>(projection.rows()); }
    Index output_dims() const noexcept { return static_cast<Index>(projection.cols()); }
};

/// Top-`dims` eigenvectors of the unbiased sample covariance. Each column
/// is oriented so that its largest-magnitude entry is non-negative.
PcaModel fit_pca(const Matrix& features, Index dims);

/// (features - mean) * projection.
Matrix transform(const PcaModel& model, const Matrix& features);

/// Text dump: `mean`, `projection` (row-major) and `explained_variance`
/// lines, values at round-trip precision.
void write_pca_model(const std::filesystem::path& path, const PcaModel& model);

} // namespace sla
