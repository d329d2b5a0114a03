#include "sla/folds.hpp"

#include "sla/error.hpp"
#include "sla/rng.hpp"

#include <fmt/format.h>

#include <array>
#include <fstream>

namespace sla {

namespace {
constexpr const char* kModule = "folds";
}

std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t r) {
    return derive_seed(stream_seed(master_seed, Stream::folds), r);
}

FoldPlan make_fold_plan(std::span<const std::uint8_t> labels, Index folds, std::uint64_t master_seed,
                        std::uint64_t r) {
    if (folds < 2) {
        throw ValidationError(kModule, fmt::format("K={} but at least 2 folds are required", folds));
    }
    std::array<std::vector<std::uint32_t>, 2> by_class;
    for (Index i = 0; i < labels.size(); ++i) {
        if (labels[i] > 1) {
            throw ValidationError(kModule, fmt::format("label outside {{0,1}} at index {}", i));
        }
        by_class[labels[i]].push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t c = 0; c < 2; ++c) {
        if (by_class[c].size() < folds) {
            throw ValidationError(kModule, fmt::format("class with fewer than K members (class {} has {}, K={})", c,
                                                       by_class[c].size(), folds));
        }
    }

    FoldPlan plan;
    plan.repetition = r;
    plan.folds = folds;
    plan.assignments.assign(labels.size(), 0);
    Xoshiro256 rng(repetition_seed(master_seed, r));
    const Index start = static_cast<Index>(r % folds);
    for (auto& members : by_class) {
        shuffle(members, rng);
        for (Index j = 0; j < members.size(); ++j) {
            plan.assignments[members[j]] = static_cast<std::uint32_t>((start + j) % folds);
        }
    }
    return plan;
}

FoldSplit fold_members(const FoldPlan& plan, Index k) {
    if (k >= plan.folds) {
        throw ValidationError(kModule, fmt::format("fold index {} out of range [0,{})", k, plan.folds));
    }
    FoldSplit split;
    for (Index i = 0; i < plan.assignments.size(); ++i) {
        (plan.assignments[i] == k ? split.validation : split.train).push_back(i);
    }
    return split;
}

void append_plan_dump(const std::filesystem::path& path, const FoldPlan& plan) {
    std::ofstream out(path, std::ios::app);
    if (!out) {
        throw IoError(kModule, fmt::format("cannot write '{}'", path.string()));
    }
    for (Index i = 0; i < plan.assignments.size(); ++i) {
        out << plan.repetition << ',' << i << ',' << plan.assignments[i] << '\n';
    }
}

} // namespace sla
