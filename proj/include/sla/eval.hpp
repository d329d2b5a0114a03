#pragma once

#include "sla/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sla {

/// Mann-Whitney AUROC: the probability that a random positive outscores a
/// random negative, ties counted one half. Uses midranks, O(N log N).
double compute_auroc(std::span<const double> scores, const std::vector<bool>& positives);

/// Midranks (1-based, ties share the average rank).
std::vector<double> midranks(std::span<const double> values);

/// Spearman rank correlation (Pearson correlation of midranks). Returns 1
/// when both inputs are constant and 0 when exactly one is.
double spearman(std::span<const double> a, std::span<const double> b);

struct AurocCheckpoint {
    std::uint64_t repetitions = 0;
    double auroc_sla = 0.0;
    double auroc_recov = 0.0;
};

/// AUROC history of a simulation run.
class AurocTrace {
public:
    /// Enforces strictly increasing repetition counts and values in [0, 1].
    void push(const AurocCheckpoint& checkpoint);

    const std::vector<AurocCheckpoint>& checkpoints() const noexcept { return checkpoints_; }
    std::vector<double> sla_series() const;
    bool empty() const noexcept { return checkpoints_.empty(); }

private:
    std::vector<AurocCheckpoint> checkpoints_;
};

struct ScoreDistributionSummary {
    double clean_mean = 0.0;
    double clean_std = 0.0;
    double noisy_mean = 0.0;
    double noisy_std = 0.0;
    double overlap_coefficient = 0.0;
    Index clean_count = 0;
    Index noisy_count = 0;
};

constexpr Index kOverlapBins = 64;

/// Group means and population standard deviations plus the histogram
/// intersection of the two normalized score histograms (64 equal-width bins
/// over the joint range).
ScoreDistributionSummary summarize_distributions(std::span<const double> scores, const std::vector<bool>& flipped);

struct StoppingPolicy {
    Index window = 3;
    double tau_auroc = 0.005;
    double tau_rank = 0.999;
};

enum class StopDecision { keep_going, stop };

/// Simulation mode: stop once the SLA AUROC gained less than tau_auroc over
/// the last `window` checkpoints (needs window + 1 values).
StopDecision convergence_check_auroc(std::span<const double> auroc_series, const StoppingPolicy& policy);

/// Audit mode: `correlations[j]` is the Spearman correlation between the
/// rankings at checkpoints j and j + 1. Stop once the last `window`
/// correlations all reach tau_rank.
StopDecision convergence_check_rank(std::span<const double> correlations, const StoppingPolicy& policy);

void write_auroc_trace(const std::filesystem::path& path, const AurocTrace& trace);

struct RankCheckpoint {
    std::uint64_t repetitions = 0;
    double rank_correlation = 0.0;
};

void write_rank_trace(const std::filesystem::path& path, const std::vector<RankCheckpoint>& trace);

} // namespace sla
