#include "sla/engine.hpp"

#include "sla/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace sla {

namespace {

constexpr const char* kModule = "engine";

Matrix gather_rows(const Matrix& x, const std::vector<Index>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (Index i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

Labels gather_labels(std::span<const std::uint8_t> labels, const std::vector<Index>& rows) {
    Labels out(rows.size());
    for (Index i = 0; i < rows.size(); ++i) {
        out[i] = labels[rows[i]];
    }
    return out;
}

template <typename E>
[[noreturn]] void rethrow_annotated(const E& e, std::uint64_t r, Index k) {
    throw E(e.module(), fmt::format("repetition {}, fold {}: {}", r, k, e.what()));
}

} // namespace

double fold_loss(std::span<const std::uint8_t> labels, std::span<const double> probs, double clip_delta) {
    if (labels.empty()) {
        throw ValidationError(kModule, "empty fold");
    }
    if (labels.size() != probs.size()) {
        throw ValidationError(kModule,
                              fmt::format("length mismatch: {} labels, {} probabilities", labels.size(), probs.size()));
    }
    double total = 0.0;
    for (Index i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(probs[i], clip_delta, 1.0 - clip_delta);
        total -= labels[i] ? std::log(p) : std::log1p(-p);
    }
    return total / static_cast<double>(labels.size());
}

Standardized standardize(std::span<const double> fold_losses, double epsilon, StdForm form) {
    const Index k = fold_losses.size();
    if (k < 2) {
        throw ValidationError(kModule, fmt::format("standardization needs K >= 2, got {}", k));
    }
    for (double v : fold_losses) {
        if (!std::isfinite(v)) {
            throw NumericalError(kModule, "non-finite fold loss");
        }
    }
    Standardized out;
    // shifted mean: exact for constant input, so zero-variance folds give exact zeros
    const double pivot = fold_losses.front();
    double shift = 0.0;
    for (double v : fold_losses) {
        shift += v - pivot;
    }
    out.mu = pivot + shift / static_cast<double>(k);
    double ss = 0.0;
    for (double v : fold_losses) {
        ss += (v - out.mu) * (v - out.mu);
    }
    const double denom = form == StdForm::population ? static_cast<double>(k) : static_cast<double>(k - 1);
    out.sigma = std::sqrt(ss / denom);
    const double scale = std::max(out.sigma, epsilon);
    out.scores.reserve(k);
    for (double v : fold_losses) {
        out.scores.push_back((v - out.mu) / scale);
    }
    return out;
}

Index argmax_first(std::span<const double> values) {
    Index best = 0;
    for (Index i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

RepetitionResult run_repetition(const Matrix& x, std::span<const std::uint8_t> labels, const FoldPlan& plan,
                                const EngineOptions& options) {
    if (plan.size() != labels.size() || static_cast<Index>(x.rows()) != labels.size()) {
        throw ValidationError(kModule, fmt::format("dimension mismatch: {} rows, {} labels, plan over {}", x.rows(),
                                                   labels.size(), plan.size()));
    }
    RepetitionResult result;
    result.r = plan.repetition;
    result.fold_losses.reserve(plan.folds);
    for (Index k = 0; k < plan.folds; ++k) {
        try {
            const auto split = fold_members(plan, k);
            const Labels train_y = gather_labels(labels, split.train);
            const Labels valid_y = gather_labels(labels, split.validation);
            const auto model = fit_lda(gather_rows(x, split.train), train_y, options.shrinkage);
            const auto probs = predict_proba(model, gather_rows(x, split.validation));
            result.fold_losses.push_back(fold_loss(valid_y, probs, options.clip_delta));
        } catch (const NumericalError& e) {
            rethrow_annotated(e, plan.repetition, k);
        } catch (const ValidationError& e) {
            rethrow_annotated(e, plan.repetition, k);
        }
    }
    auto z = standardize(result.fold_losses, options.epsilon, options.std_form);
    result.mu = z.mu;
    result.sigma = z.sigma;
    result.standardized = std::move(z.scores);
    result.worst_fold = argmax_first(result.fold_losses);
    return result;
}

RepetitionResult run_repetition(const Matrix& x, std::span<const std::uint8_t> labels,
                                const EngineOptions& options, std::uint64_t r) {
    const auto plan = make_fold_plan(labels, options.folds, options.master_seed, r);
    return run_repetition(x, labels, plan, options);
}

void apply_repetition(ScoreBoard& board, const FoldPlan& plan, const RepetitionResult& result) {
    if (result.r != board.repetitions_done || plan.repetition != result.r) {
        throw ValidationError(kModule, fmt::format("out-of-order repetition: board at {}, got {}",
                                                   board.repetitions_done, result.r));
    }
    if (plan.size() != board.size()) {
        throw ValidationError(kModule, fmt::format("N mismatch: board has {}, plan has {}", board.size(), plan.size()));
    }
    if (result.standardized.size() != plan.folds) {
        throw ValidationError(kModule, "fold count mismatch between plan and result");
    }
    for (Index i = 0; i < plan.size(); ++i) {
        const auto k = plan.assignments[i];
        board.sum_scores[i] += result.standardized[k];
        if (k == result.worst_fold) {
            ++board.recov_counts[i];
        }
    }
    ++board.repetitions_done;
}

std::vector<double> sla_scores(const ScoreBoard& board) {
    if (board.repetitions_done == 0) {
        throw ValidationError(kModule, "zero repetitions");
    }
    std::vector<double> out(board.size());
    const double r = static_cast<double>(board.repetitions_done);
    for (Index i = 0; i < out.size(); ++i) {
        out[i] = board.sum_scores[i] / r;
    }
    return out;
}

std::vector<double> recov_fractions(const ScoreBoard& board) {
    if (board.repetitions_done == 0) {
        throw ValidationError(kModule, "zero repetitions");
    }
    std::vector<double> out(board.size());
    const double r = static_cast<double>(board.repetitions_done);
    for (Index i = 0; i < out.size(); ++i) {
        out[i] = static_cast<double>(board.recov_counts[i]) / r;
    }
    return out;
}

std::vector<SampleScore> finalize(const ScoreBoard& board, const std::vector<std::string>& ids) {
    if (ids.size() != board.size()) {
        throw ValidationError(kModule, fmt::format("N mismatch: board has {}, {} ids", board.size(), ids.size()));
    }
    const auto scores = sla_scores(board);
    const auto fractions = recov_fractions(board);
    std::vector<SampleScore> out(board.size());
    for (Index i = 0; i < out.size(); ++i) {
        out[i] = SampleScore{ids[i], scores[i], board.recov_counts[i], fractions[i], 0};
    }
    std::vector<Index> order(out.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return ids[a] < ids[b];
    });
    for (Index pos = 0; pos < order.size(); ++pos) {
        out[order[pos]].rank = pos + 1;
    }
    return out;
}

RepetitionRunner::RepetitionRunner(const Matrix& x, std::span<const std::uint8_t> labels, EngineOptions options,
                                   unsigned workers)
    : x_(x), labels_(labels), options_(options), workers_(std::max(1U, workers)) {
    if (static_cast<Index>(x.rows()) != labels.size()) {
        throw ValidationError(kModule,
                              fmt::format("dimension mismatch: {} rows, {} labels", x.rows(), labels.size()));
    }
}

void RepetitionRunner::advance(ScoreBoard& board, std::uint64_t target, const Observer& observer) const {
    if (board.size() != labels_.size()) {
        throw ValidationError(kModule, fmt::format("N mismatch: board has {}, data has {}", board.size(), labels_.size()));
    }
    struct Slot {
        FoldPlan plan;
        RepetitionResult result;
    };
    const std::uint64_t chunk = std::max<std::uint64_t>(16, 4ULL * workers_);
    std::vector<Slot> slots;
    while (board.repetitions_done < target) {
        const std::uint64_t first = board.repetitions_done;
        const std::uint64_t count = std::min(chunk, target - first);
        slots.assign(count, Slot{});

        auto compute = [&](std::uint64_t j) {
            auto& slot = slots[j];
            slot.plan = make_fold_plan(labels_, options_.folds, options_.master_seed, first + j);
            slot.result = run_repetition(x_, labels_, slot.plan, options_);
        };

        if (workers_ == 1 || count == 1) {
            for (std::uint64_t j = 0; j < count; ++j) {
                compute(j);
            }
        } else {
            std::atomic<std::uint64_t> next{0};
            std::vector<std::exception_ptr> errors(count);
            {
                std::vector<std::jthread> pool;
                const auto n_threads = std::min<std::uint64_t>(workers_, count);
                for (std::uint64_t t = 0; t < n_threads; ++t) {
                    pool.emplace_back([&] {
                        for (auto j = next.fetch_add(1); j < count; j = next.fetch_add(1)) {
                            try {
                                compute(j);
                            } catch (...) {
                                errors[j] = std::current_exception();
                            }
                        }
                    });
                }
            }
            // Report the lowest failing repetition, as a sequential run would.
            for (auto& e : errors) {
                if (e) {
                    std::rethrow_exception(e);
                }
            }
        }

        for (const auto& slot : slots) {
            apply_repetition(board, slot.plan, slot.result);
            if (observer) {
                observer(slot.plan, slot.result);
            }
        }
    }
}

} // namespace sla
