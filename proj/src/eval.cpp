#include "sla/eval.hpp"

#include "sla/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace sla {

namespace {

constexpr const char* kModule = "eval";

struct Moments {
    double mean = 0.0;
    double std = 0.0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m.mean) * (x - m.mean);
    }
    m.std = std::sqrt(ss / static_cast<double>(v.size()));
    return m;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(kModule, fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

} // namespace

std::vector<double> midranks(std::span<const double> values) {
    const Index n = values.size();
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    Index i = 0;
    while (i < n) {
        Index j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) {
            ++j;
        }
        // Positions i..j-1 share ranks i+1..j.
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (Index t = i; t < j; ++t) {
            ranks[order[t]] = mid;
        }
        i = j;
    }
    return ranks;
}

double compute_auroc(std::span<const double> scores, const std::vector<bool>& positives) {
    if (scores.size() != positives.size()) {
        throw ValidationError(kModule,
                              fmt::format("length mismatch: {} scores, {} labels", scores.size(), positives.size()));
    }
    for (double s : scores) {
        if (std::isnan(s)) {
            throw ValidationError(kModule, "NaN score");
        }
    }
    const auto n_pos = static_cast<Index>(std::count(positives.begin(), positives.end(), true));
    const Index n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError(kModule, "single-class mask: AUROC needs positives and negatives");
    }
    const auto ranks = midranks(scores);
    double rank_sum = 0.0;
    for (Index i = 0; i < ranks.size(); ++i) {
        if (positives[i]) {
            rank_sum += ranks[i];
        }
    }
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ValidationError(kModule, "spearman needs two equal-length series of at least 2 values");
    }
    const auto ra = midranks(a);
    const auto rb = midranks(b);
    const double mean = 0.5 * static_cast<double>(a.size() + 1);
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (Index i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 && sbb == 0.0) {
        return 1.0;
    }
    if (saa == 0.0 || sbb == 0.0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

void AurocTrace::push(const AurocCheckpoint& checkpoint) {
    if (!checkpoints_.empty() && checkpoint.repetitions <= checkpoints_.back().repetitions) {
        throw ValidationError(kModule, "trace repetitions must be strictly increasing");
    }
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(checkpoint.auroc_sla) || !in_unit(checkpoint.auroc_recov)) {
        throw ValidationError(kModule, "AUROC outside [0,1]");
    }
    checkpoints_.push_back(checkpoint);
}

std::vector<double> AurocTrace::sla_series() const {
    std::vector<double> out;
    out.reserve(checkpoints_.size());
    for (const auto& c : checkpoints_) {
        out.push_back(c.auroc_sla);
    }
    return out;
}

ScoreDistributionSummary summarize_distributions(std::span<const double> scores, const std::vector<bool>& flipped) {
    if (scores.size() != flipped.size()) {
        throw ValidationError(kModule,
                              fmt::format("length mismatch: {} scores, {} mask entries", scores.size(), flipped.size()));
    }
    std::vector<double> clean;
    std::vector<double> noisy;
    for (Index i = 0; i < scores.size(); ++i) {
        (flipped[i] ? noisy : clean).push_back(scores[i]);
    }
    if (clean.empty() || noisy.empty()) {
        throw ValidationError(kModule, "empty group: need both clean and noisy samples");
    }
    ScoreDistributionSummary out;
    const auto c = moments(clean);
    const auto n = moments(noisy);
    out.clean_mean = c.mean;
    out.clean_std = c.std;
    out.noisy_mean = n.mean;
    out.noisy_std = n.std;
    out.clean_count = clean.size();
    out.noisy_count = noisy.size();

    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it;
    const double width = *hi_it - lo;
    auto histogram = [&](const std::vector<double>& group) {
        std::vector<double> h(kOverlapBins, 0.0);
        for (double v : group) {
            Index bin = 0;
            if (width > 0.0) {
                bin = std::min(kOverlapBins - 1,
                               static_cast<Index>(std::floor((v - lo) / width * static_cast<double>(kOverlapBins))));
            }
            h[bin] += 1.0 / static_cast<double>(group.size());
        }
        return h;
    };
    const auto hc = histogram(clean);
    const auto hn = histogram(noisy);
    double overlap = 0.0;
    for (Index b = 0; b < kOverlapBins; ++b) {
        overlap += std::min(hc[b], hn[b]);
    }
    out.overlap_coefficient = std::clamp(overlap, 0.0, 1.0);
    return out;
}

StopDecision convergence_check_auroc(std::span<const double> auroc_series, const StoppingPolicy& policy) {
    if (auroc_series.size() < 2) {
        throw ValidationError(kModule, "convergence check needs at least 2 checkpoints");
    }
    if (policy.window == 0 || auroc_series.size() < policy.window + 1) {
        return StopDecision::keep_going;
    }
    const double gain = auroc_series.back() - auroc_series[auroc_series.size() - 1 - policy.window];
    return gain < policy.tau_auroc ? StopDecision::stop : StopDecision::keep_going;
}

StopDecision convergence_check_rank(std::span<const double> correlations, const StoppingPolicy& policy) {
    if (correlations.empty()) {
        throw ValidationError(kModule, "convergence check needs at least 2 checkpoints");
    }
    if (policy.window == 0 || correlations.size() < policy.window) {
        return StopDecision::keep_going;
    }
    const bool stable = std::all_of(correlations.end() - static_cast<std::ptrdiff_t>(policy.window),
                                    correlations.end(), [&](double c) { return c >= policy.tau_rank; });
    return stable ? StopDecision::stop : StopDecision::keep_going;
}

void write_auroc_trace(const std::filesystem::path& path, const AurocTrace& trace) {
    auto out = open_for_write(path);
    out << "repetitions,auroc_sla,auroc_recov\n";
    for (const auto& c : trace.checkpoints()) {
        out << fmt::format("{},{:.10f},{:.10f}\n", c.repetitions, c.auroc_sla, c.auroc_recov);
    }
}

void write_rank_trace(const std::filesystem::path& path, const std::vector<RankCheckpoint>& trace) {
    auto out = open_for_write(path);
    out << "repetitions,rank_correlation\n";
    for (const auto& c : trace) {
        out << fmt::format("{},{:.10f}\n", c.repetitions, c.rank_correlation);
    }
}

} // namespace sla
