#include "sla/lda.hpp"

#include "sla/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace sla {

namespace {

constexpr const char* kModule = "lda";
constexpr double kMaxCondition = 1e12;

double stable_sigmoid(double z) {
    double p = 0.0;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    // Keep the posterior strictly inside the open interval.
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return std::clamp(p, lo, hi);
}

} // namespace

Vector LdaModel::weights() const {
    return pooled_precision * (mean_pos - mean_neg);
}

double LdaModel::bias() const {
    return -0.5 * (mean_pos + mean_neg).dot(weights()) + log_prior_ratio;
}

LdaModel fit_lda(const Matrix& x, std::span<const std::uint8_t> y, double shrinkage) {
    const auto m = static_cast<Index>(x.rows());
    const auto d = static_cast<Eigen::Index>(x.cols());
    if (y.size() != m) {
        throw ValidationError(kModule, fmt::format("dimension mismatch: {} rows, {} labels", m, y.size()));
    }
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
        throw ValidationError(kModule, fmt::format("shrinkage {} outside [0,1]", shrinkage));
    }
    if (m <= 2) {
        throw ValidationError(kModule, fmt::format("need more than 2 training samples, got {}", m));
    }

    Vector sum_pos = Vector::Zero(d);
    Vector sum_neg = Vector::Zero(d);
    Index n_pos = 0;
    for (Index i = 0; i < m; ++i) {
        if (y[i]) {
            sum_pos += x.row(static_cast<Eigen::Index>(i)).transpose();
            ++n_pos;
        } else {
            sum_neg += x.row(static_cast<Eigen::Index>(i)).transpose();
        }
    }
    const Index n_neg = m - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError(kModule, "single-class fold: training split lacks one of the labels");
    }

    LdaModel model;
    model.mean_pos = sum_pos / static_cast<double>(n_pos);
    model.mean_neg = sum_neg / static_cast<double>(n_neg);

    Matrix centered(static_cast<Eigen::Index>(m), d);
    for (Index i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        centered.row(r) = x.row(r) - (y[i] ? model.mean_pos : model.mean_neg).transpose();
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(m - 2);

    const double spherical = cov.trace() / static_cast<double>(d);
    cov *= (1.0 - shrinkage);
    cov.diagonal().array() += shrinkage * spherical;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
        throw NumericalError(kModule, fmt::format("singular covariance (condition estimate {:.3g})", lo > 0.0 ? hi / lo : INFINITY));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(kModule, "covariance is not positive definite");
    }
    model.pooled_precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
    // Symmetrize away round-off from the triangular solves.
    model.pooled_precision = 0.5 * (model.pooled_precision + model.pooled_precision.transpose()).eval();
    model.log_prior_ratio = std::log(static_cast<double>(n_pos) / static_cast<double>(n_neg));
    return model;
}

std::vector<double> predict_proba(const LdaModel& model, const Matrix& x) {
    if (static_cast<Index>(x.cols()) != model.dims()) {
        throw ValidationError(kModule,
                              fmt::format("dimension mismatch: model has {} dims, input {}", model.dims(), x.cols()));
    }
    const Vector w = model.weights();
    const double b = model.bias();
    const Vector z = x * w;
    std::vector<double> out(static_cast<Index>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        out[static_cast<Index>(i)] = stable_sigmoid(z(i) + b);
    }
    return out;
}

} // namespace sla
