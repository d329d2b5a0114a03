#pragma once

#include "sla/types.hpp"

#include <span>

namespace sla {

/// Binary linear discriminant with a shared (pooled, shrunk) covariance.
struct LdaModel {
    Vector mean_pos;
    Vector mean_neg;
    Eigen::MatrixXd pooled_precision; ///< inverse of the shrunk pooled covariance
    double log_prior_ratio = 0.0;     ///< log(pi_pos / pi_neg)

    /// Discriminant direction precision * (mean_pos - mean_neg).
    Vector weights() const;
    /// Offset so that posterior = sigmoid(weights . x + bias).
    double bias() const;

    Index dims() const noexcept { return static_cast<Index>(mean_pos.size()); }
};

constexpr double kDefaultShrinkage = 1e-4;

/// Pooled within-class covariance over (M - 2), shrunk towards
/// trace/d * I by `shrinkage`, inverted through a Cholesky factorization.
/// Throws ValidationError on a single-class fold and NumericalError when
/// the shrunk covariance has condition number above 1e12.
LdaModel fit_lda(const Matrix& x, std::span<const std::uint8_t> y, double shrinkage = kDefaultShrinkage);

/// Posterior P(y = 1 | x) for every row, strictly inside (0, 1).
std::vector<double> predict_proba(const LdaModel& model, const Matrix& x);

} // namespace sla
