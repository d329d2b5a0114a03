#pragma once

#include "sla/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sla {

/// One monitoring checkpoint: the repetition count plus up to two metric
/// values (SLA/ReCoV AUROC in simulation, rank correlation in audits).
struct ProgressRecord {
    std::uint64_t repetitions = 0;
    double primary = 0.0;
    double secondary = 0.0;

    bool operator==(const ProgressRecord&) const = default;
};

/// Monitoring history that must survive a restart so that a resumed run
/// reproduces the uninterrupted run's trace.
struct ResumeState {
    std::vector<ProgressRecord> records;
    std::vector<double> last_snapshot; ///< scores at the last record, may be empty

    bool operator==(const ResumeState&) const = default;
};

struct Checkpoint {
    ScoreBoard board;
    Index folds = 0;
    ResumeState resume;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout, all little-endian:
///   "SLA1" | u32 version | u64 N | u32 K | u64 repetitions_done | u64 config_digest
///   | N x f64 sum_scores | N x u64 recov_counts
///   | "TRC1" | u64 records | records x (u64 reps, f64 primary, f64 secondary)
///   | u64 snapshot_len | snapshot_len x f64
/// Written to a temporary file and renamed into place.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// Throws IoError on a missing or truncated file and ValidationError on a
/// bad magic or version.
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// read_checkpoint plus a digest/shape check against the current run;
/// refuses with "config mismatch" when the digest differs.
Checkpoint restore_checkpoint(const std::filesystem::path& path, std::uint64_t expected_digest, Index n, Index folds);

} // namespace sla
