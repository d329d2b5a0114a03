#pragma once

#include "sla/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sla {

/// The audited corpus: one feature row, one binary label and one opaque id
/// per sample. Row order defines the sample index used everywhere else.
class Dataset {
public:
    /// Validates every invariant (unique ids, consistent sizes, finite
    /// features, binary labels, both classes present) or throws
    /// ValidationError.
    Dataset(std::vector<std::string> ids, Matrix features, Labels labels);

    Index size() const noexcept { return labels_.size(); }
    Index dims() const noexcept { return static_cast<Index>(features_.cols()); }

    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const Matrix& features() const noexcept { return features_; }
    const Labels& labels() const noexcept { return labels_; }

    Index count_positive() const noexcept;
    Index count_negative() const noexcept { return size() - count_positive(); }

    /// Same ids and features, different labels (re-validated).
    Dataset with_labels(Labels labels) const;

private:
    std::vector<std::string> ids_;
    Matrix features_;
    Labels labels_;
};

/// Ground truth for a synthetic label-flip experiment.
struct NoiseMask {
    std::vector<bool> flipped;
    Labels original_labels;
    double ratio = 0.0;
    std::uint64_t seed = 0;

    Index flip_count() const noexcept;
};

/// Loads features (CSV table `id,f0,...` or raw float32 with a
/// `<path>.json` sidecar) and joins the `id,label` table onto them.
Dataset load_dataset(const std::filesystem::path& features_path,
                     const std::filesystem::path& labels_path);

/// Number of labels flipped for a given ratio: round-half-up of ratio * n.
Index flip_count_for(double ratio, Index n);

/// Flips exactly flip_count_for(ratio, N) labels, chosen uniformly without
/// replacement from a stream seeded by `seed`. The input is left untouched.
std::pair<Dataset, NoiseMask> inject_noise(const Dataset& dataset, double ratio,
                                           std::uint64_t seed);

/// Writes `id,original_label,observed_label,flipped`.
void write_noise_mask(const std::filesystem::path& path, const Dataset& observed,
                      const NoiseMask& mask);

/// Reads a table written by write_noise_mask; returns flipped flags keyed
/// by the row order of `ids`.
std::vector<bool> read_noise_mask(const std::filesystem::path& path,
                                  const std::vector<std::string>& ids);

/// Parameters of the two-class Gaussian mixture used for desk-scale
/// benchmarks. Both classes share the identity covariance; their means are
/// `separation` apart along the all-ones diagonal, so the Bayes-optimal
/// clean AUROC is Phi(separation / sqrt(2)).
struct MixtureSpec {
    Index n = 5000;
    Index dims = 10;
    double positive_fraction = 0.1;
    double separation = 1.8124;
};

/// Deterministic synthetic corpus. Exactly round(n * positive_fraction)
/// positives; ids are `s00000`, `s00001`, ...
Dataset make_gaussian_mixture(const MixtureSpec& spec, std::uint64_t seed);

/// Order-sensitive 64-bit fingerprint of labels and feature values.
std::uint64_t fingerprint(const Dataset& dataset);

} // namespace sla
