#include "sla/pca.hpp"

#include "sla/error.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <fstream>

namespace sla {

namespace {
constexpr const char* kModule = "pca";
}

PcaModel fit_pca(const Matrix& features, Index dims) {
    const auto n = static_cast<Index>(features.rows());
    const auto d_in = static_cast<Index>(features.cols());
    if (dims == 0 || dims > std::min(n, d_in)) {
        throw ValidationError(kModule, fmt::format("pca dims {} exceeds min(N={}, D={})", dims, n, d_in));
    }
    if (n < 2) {
        throw ValidationError(kModule, "pca needs at least 2 samples");
    }

    PcaModel model;
    model.mean = features.colwise().mean().transpose();
    const Matrix centered = features.rowwise() - model.mean.transpose();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d_in), static_cast<Eigen::Index>(d_in));
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(n - 1);

    if (cov.trace() <= 0.0) {
        throw NumericalError(kModule, "degenerate feature matrix: zero total variance");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw NumericalError(kModule, "covariance eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues.
    const auto k = static_cast<Eigen::Index>(dims);
    model.projection.resize(static_cast<Eigen::Index>(d_in), k);
    model.explained_variance.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index src = static_cast<Eigen::Index>(d_in) - 1 - j;
        Eigen::VectorXd v = eig.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        model.projection.col(j) = v;
        model.explained_variance(j) = std::max(eig.eigenvalues()(src), 0.0);
    }
    return model;
}

Matrix transform(const PcaModel& model, const Matrix& features) {
    if (static_cast<Index>(features.cols()) != model.input_dims()) {
        throw ValidationError(kModule, fmt::format("dimension mismatch: model expects {} columns, got {}",
                                                   model.input_dims(), features.cols()));
    }
    Matrix out = (features.rowwise() - model.mean.transpose()) * model.projection;
    return out;
}

void write_pca_model(const std::filesystem::path& path, const PcaModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(kModule, fmt::format("cannot write '{}'", path.string()));
    }
    out << fmt::format("input_dims={}\noutput_dims={}\n", model.input_dims(), model.output_dims());
    out << "mean=" << fmt::format("{}", fmt::join(model.mean.begin(), model.mean.end(), ",")) << '\n';
    out << "projection=";
    for (Eigen::Index r = 0; r < model.projection.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.projection.cols(); ++c) {
            out << ((r | c) ? "," : "") << fmt::format("{}", model.projection(r, c));
        }
    }
    out << "\nexplained_variance="
        << fmt::format("{}", fmt::join(model.explained_variance.begin(), model.explained_variance.end(), ","))
        << '\n';
    if (!out) {
        throw IoError(kModule, fmt::format("write failure on '{}'", path.string()));
    }
}

} // namespace sla
