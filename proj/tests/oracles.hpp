#pragma once

// Independent reference implementations shared by unit and acceptance tests.

#include "sla/types.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace sla::testing {

/// Pair-enumeration AUROC, ties count half.
inline double brute_auroc(const std::vector<double>& s, const std::vector<bool>& pos) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (pos[i] && !pos[j]) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
        }
    }
    return wins / pairs;
}

/// Independent Gaussian-discriminant posterior: explicit loops for the
/// moments, LU inverse, log densities and a log-sum-exp.
inline std::vector<double> oracle_posterior(const Matrix& x, const Labels& y, double shrinkage, const Matrix& query) {
    const auto m = x.rows();
    const auto d = x.cols();
    std::vector<double> mu0(d, 0.0), mu1(d, 0.0);
    double n0 = 0, n1 = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& mu = y[i] ? mu1 : mu0;
        (y[i] ? n1 : n0) += 1;
        for (Eigen::Index c = 0; c < d; ++c) {
            mu[c] += x(i, c);
        }
    }
    for (Eigen::Index c = 0; c < d; ++c) {
        mu0[c] /= n0;
        mu1[c] /= n1;
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& mu = y[i] ? mu1 : mu0;
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index b = 0; b < d; ++b) {
                cov(a, b) += (x(i, a) - mu[a]) * (x(i, b) - mu[b]);
            }
        }
    }
    cov /= static_cast<double>(m - 2);
    const double avg = cov.trace() / static_cast<double>(d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            cov(a, b) = (1 - shrinkage) * cov(a, b) + (a == b ? shrinkage * avg : 0.0);
        }
    }
    const Eigen::MatrixXd inv = cov.fullPivLu().inverse();
    std::vector<double> out;
    for (Eigen::Index q = 0; q < query.rows(); ++q) {
        auto log_density = [&](const std::vector<double>& mu, double prior) {
            double quad = 0.0;
            for (Eigen::Index a = 0; a < d; ++a) {
                for (Eigen::Index b = 0; b < d; ++b) {
                    quad += (query(q, a) - mu[a]) * inv(a, b) * (query(q, b) - mu[b]);
                }
            }
            return std::log(prior) - 0.5 * quad;
        };
        const double l1 = log_density(mu1, n1 / m);
        const double l0 = log_density(mu0, n0 / m);
        const double top = std::max(l0, l1);
        out.push_back(std::exp(l1 - top) / (std::exp(l0 - top) + std::exp(l1 - top)));
    }
    return out;
}

/// Sine of the largest principal angle between two column spaces.
inline double max_principal_sine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd residual = a - b * (b.transpose() * a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    return svd.singularValues()(0);
}

} // namespace sla::testing
