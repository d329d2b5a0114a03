#pragma once

#include "sla/folds.hpp"
#include "sla/lda.hpp"
#include "sla/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sla {

/// Denominator of the within-repetition standard deviation.
enum class StdForm { population, sample };

constexpr double kDefaultEpsilon = 1e-12;
constexpr double kDefaultClipDelta = 1e-7;

/// Everything that determines a repetition besides the data.
struct EngineOptions {
    Index folds = 5;
    double epsilon = kDefaultEpsilon;
    double clip_delta = kDefaultClipDelta;
    double shrinkage = kDefaultShrinkage;
    StdForm std_form = StdForm::population;
    std::uint64_t master_seed = 0;
};

/// Mean binary cross-entropy in nats with probabilities clipped to
/// [clip_delta, 1 - clip_delta].
double fold_loss(std::span<const std::uint8_t> labels, std::span<const double> probs,
                 double clip_delta = kDefaultClipDelta);

struct Standardized {
    double mu = 0.0;
    double sigma = 0.0;
    std::vector<double> scores;
};

/// z-scores of the fold losses: (loss - mu) / max(sigma, epsilon).
Standardized standardize(std::span<const double> fold_losses, double epsilon = kDefaultEpsilon,
                         StdForm form = StdForm::population);

/// Outcome of one K-fold pass.
struct RepetitionResult {
    std::uint64_t r = 0;
    std::vector<double> fold_losses;
    double mu = 0.0;
    double sigma = 0.0;
    std::vector<double> standardized;
    Index worst_fold = 0; ///< argmax of fold_losses, lowest index on ties

    bool operator==(const RepetitionResult&) const = default;
};

/// Lowest index among the maxima.
Index argmax_first(std::span<const double> values);

/// Runs one repetition on an existing plan. Errors from LDA are rethrown
/// with the repetition and fold prepended.
RepetitionResult run_repetition(const Matrix& x, std::span<const std::uint8_t> labels, const FoldPlan& plan,
                                const EngineOptions& options);

/// Builds the plan for repetition `r` and runs it.
RepetitionResult run_repetition(const Matrix& x, std::span<const std::uint8_t> labels,
                                const EngineOptions& options, std::uint64_t r);

/// Running per-sample accumulators.
struct ScoreBoard {
    std::vector<double> sum_scores;
    std::vector<std::uint64_t> recov_counts;
    std::uint64_t repetitions_done = 0;
    std::uint64_t config_digest = 0;

    ScoreBoard() = default;
    ScoreBoard(Index n, std::uint64_t digest) : sum_scores(n, 0.0), recov_counts(n, 0), config_digest(digest) {}

    Index size() const noexcept { return sum_scores.size(); }
    bool operator==(const ScoreBoard&) const = default;
};

/// Adds every sample's fold score and counts worst-fold membership.
/// Repetitions must arrive in index order.
void apply_repetition(ScoreBoard& board, const FoldPlan& plan, const RepetitionResult& result);

/// Current SLA scores sum / repetitions_done.
std::vector<double> sla_scores(const ScoreBoard& board);

/// ReCoV fraction count / repetitions_done.
std::vector<double> recov_fractions(const ScoreBoard& board);

struct SampleScore {
    std::string id;
    double sla_score = 0.0;
    std::uint64_t recov_count = 0;
    double recov_fraction = 0.0;
    Index rank = 0; ///< 1 = highest score, ties by id ascending
};

/// Per-sample records in sample order.
std::vector<SampleScore> finalize(const ScoreBoard& board, const std::vector<std::string>& ids);

/// Computes repetitions in parallel and reduces them in index order, so the
/// board is identical for any worker count.
class RepetitionRunner {
public:
    using Observer = std::function<void(const FoldPlan&, const RepetitionResult&)>;

    RepetitionRunner(const Matrix& x, std::span<const std::uint8_t> labels, EngineOptions options,
                     unsigned workers = 1);

    /// Advances `board` to `target` repetitions.
    void advance(ScoreBoard& board, std::uint64_t target, const Observer& observer = {}) const;

    const EngineOptions& options() const noexcept { return options_; }
    unsigned workers() const noexcept { return workers_; }

private:
    const Matrix& x_;
    std::span<const std::uint8_t> labels_;
    EngineOptions options_;
    unsigned workers_;
};

} // namespace sla
