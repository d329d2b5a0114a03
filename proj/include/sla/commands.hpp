#pragma once

#include "sla/checkpoint.hpp"
#include "sla/config.hpp"
#include "sla/dataset.hpp"
#include "sla/eval.hpp"
#include "sla/pca.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

namespace sla {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitIo = 2,
    kExitNumerical = 3,
};

/// Execution controls that never change an output byte.
struct RunControl {
    std::optional<std::filesystem::path> features;
    std::optional<std::filesystem::path> labels;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> checkpoint; ///< written at checkpoint_every, halt and end
    std::optional<std::filesystem::path> resume;
    std::optional<std::uint64_t> halt_after; ///< stop here leaving a checkpoint
    unsigned workers = 1;
    std::ostream* progress = nullptr; ///< checkpoint-cadence log, usually stderr
};

struct DriveResult {
    ScoreBoard board;
    ResumeState resume;
    bool halted = false;
    bool stopped_early = false;
};

struct SimulationOutcome {
    Dataset observed;
    NoiseMask mask;
    PcaModel pca;
    DriveResult run;
    AurocTrace trace;
    std::optional<ScoreDistributionSummary> summary; ///< absent when halted
};

struct AuditOutcome {
    Dataset dataset;
    PcaModel pca;
    DriveResult run;
    std::vector<RankCheckpoint> trace;
};

/// Loads or synthesizes the corpus, flips labels, projects with PCA and
/// accumulates SLA and ReCoV scores with an AUROC trace. Writes nothing.
SimulationOutcome run_simulation(const RunConfig& config, const RunControl& control);

/// Scores a real corpus with a rank-stability trace. Writes nothing.
AuditOutcome run_audit(const RunConfig& config, const RunControl& control);

/// Writes `id,sla_score,recov_count,recov_fraction,rank`, best rank first.
void write_scores(const std::filesystem::path& path, const std::vector<SampleScore>& scores);

struct ScoreRow {
    std::string id;
    double sla_score = 0.0;
    std::uint64_t recov_count = 0;
    double recov_fraction = 0.0;
    Index rank = 0;
};

std::vector<ScoreRow> read_scores(const std::filesystem::path& path);

struct ReportOptions {
    std::filesystem::path scores;
    std::filesystem::path out; ///< "-" for standard output
    Index top_n = 10;
    std::optional<std::filesystem::path> mask;
};

/// Writes the human-readable report text to `out`.
void render_report(const ReportOptions& options, std::ostream& out);

// Command entry points: run, write outputs, print one status line to
// `status`, map failures to an exit code with one diagnostic line on `diag`.
int cmd_simulate(const RunConfig& config, const RunControl& control, std::ostream& status, std::ostream& diag);
int cmd_audit(const RunConfig& config, const RunControl& control, std::ostream& status, std::ostream& diag);
int cmd_report(const ReportOptions& options, std::ostream& status, std::ostream& diag);

/// Runs `body`, translating library exceptions into exit codes.
int guarded(const std::function<void()>& body, std::ostream& diag);

} // namespace sla
