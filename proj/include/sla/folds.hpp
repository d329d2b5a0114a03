#pragma once

#include "sla/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sla {

/// Stratified partition of [0, N) into K validation folds for one repetition.
struct FoldPlan {
    std::uint64_t repetition = 0;
    Index folds = 0;
    std::vector<std::uint32_t> assignments; ///< fold index per sample

    Index size() const noexcept { return assignments.size(); }
};

struct FoldSplit {
    std::vector<Index> train;
    std::vector<Index> validation;
};

/// Seed of the fold stream for repetition `r`.
std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t r);

/// Per class (negatives first, then positives), sample indices in ascending
/// order are Fisher-Yates shuffled by one xoshiro256** stream seeded with
/// repetition_seed(master_seed, r) and dealt round-robin starting at fold
/// r mod K.
FoldPlan make_fold_plan(std::span<const std::uint8_t> labels, Index folds, std::uint64_t master_seed,
                        std::uint64_t r);

/// Training and validation indices of fold `k`, both ascending.
FoldSplit fold_members(const FoldPlan& plan, Index k);

/// Appends `r,sample_index,fold` lines.
void append_plan_dump(const std::filesystem::path& path, const FoldPlan& plan);

} // namespace sla
