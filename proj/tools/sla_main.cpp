// Command-line front end: simulate, audit, report.

#include "sla/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <thread>

namespace {

struct RunFlags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::optional<sla::Index> k;
    std::optional<sla::Index> pca_dims;
    std::optional<double> noise_ratio;
    std::optional<std::uint64_t> checkpoint_every;
    bool early_stop = false;
    std::optional<std::string> features;
    std::optional<std::string> labels;
    std::optional<std::string> checkpoint;
    std::optional<std::string> resume;
    std::optional<std::uint64_t> halt_after;
    std::string out;
    unsigned workers = std::max(1U, std::thread::hardware_concurrency());
    bool quiet = false;
};

void add_run_flags(CLI::App& cmd, RunFlags& f, bool with_noise) {
    cmd.add_option("--config", f.config, "key=value run configuration file");
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--reps", f.reps, "number of repetitions R");
    cmd.add_option("--k", f.k, "folds per repetition K");
    cmd.add_option("--pca-dims", f.pca_dims, "PCA output dimension d");
    if (with_noise) {
        cmd.add_option("--noise-ratio", f.noise_ratio, "fraction of labels to flip");
    }
    cmd.add_option("--checkpoint-every", f.checkpoint_every, "repetitions between checkpoint saves");
    cmd.add_flag("--early-stop", f.early_stop, "stop once the monitored trace converges");
    cmd.add_option("--features", f.features, "feature table (CSV) or float32 file with .json sidecar");
    cmd.add_option("--labels", f.labels, "id,label table");
    cmd.add_option("--checkpoint", f.checkpoint, "checkpoint file to write");
    cmd.add_option("--resume", f.resume, "checkpoint file to resume from");
    cmd.add_option("--halt-after", f.halt_after, "stop after this many repetitions, leaving a checkpoint");
    cmd.add_option("--out", f.out, "output directory")->required();
    cmd.add_option("--workers", f.workers, "worker threads (output does not depend on it)");
    cmd.add_flag("--quiet", f.quiet, "no progress on standard error");
}

int run(const RunFlags& f, bool simulate) {
    sla::RunConfig config;
    sla::RunControl control;
    const int rc = sla::guarded(
        [&] {
            if (f.config) {
                config = sla::load_config(*f.config);
            }
            if (f.seed) config.master_seed = *f.seed;
            if (f.reps) config.repetitions = *f.reps;
            if (f.k) config.k_folds = *f.k;
            if (f.pca_dims) config.pca_dims = *f.pca_dims;
            if (f.noise_ratio) config.noise_ratio = *f.noise_ratio;
            if (f.checkpoint_every) config.checkpoint_every = *f.checkpoint_every;
            if (f.early_stop) config.early_stop = true;
        },
        std::cerr);
    if (rc != sla::kExitOk) {
        return rc;
    }
    if (f.features) control.features = *f.features;
    if (f.labels) control.labels = *f.labels;
    if (f.checkpoint) control.checkpoint = *f.checkpoint;
    if (f.resume) control.resume = *f.resume;
    control.halt_after = f.halt_after;
    control.out_dir = f.out;
    control.workers = f.workers;
    control.progress = f.quiet ? nullptr : &std::cerr;
    return simulate ? sla::cmd_simulate(config, control, std::cout, std::cerr)
                    : sla::cmd_audit(config, control, std::cout, std::cerr);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy-label detection by standardized loss aggregation over repeated cross-validation"};
    app.require_subcommand(1);

    RunFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "flip labels synthetically and benchmark SLA against ReCoV");
    add_run_flags(*simulate, sim_flags, true);

    RunFlags audit_flags;
    auto* audit = app.add_subcommand("audit", "score a labelled corpus for likely label noise");
    add_run_flags(*audit, audit_flags, false);

    sla::ReportOptions report_opts;
    std::string scores_path;
    std::string report_out = "-";
    std::optional<std::string> mask_path;
    auto* report = app.add_subcommand("report", "render a scores file as a text summary");
    report->add_option("--scores", scores_path, "scores.csv from simulate or audit")->required();
    report->add_option("--out", report_out, "output file, '-' for standard output");
    report->add_option("--top", report_opts.top_n, "rows in the top-n table");
    report->add_option("--mask", mask_path, "noise_mask.csv for the clean/noisy summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? sla::kExitOk : sla::kExitValidation;
    }

    if (simulate->parsed()) {
        return run(sim_flags, true);
    }
    if (audit->parsed()) {
        return run(audit_flags, false);
    }
    report_opts.scores = scores_path;
    report_opts.out = report_out;
    if (mask_path) {
        report_opts.mask = *mask_path;
    }
    return sla::cmd_report(report_opts, std::cout, std::cerr);
}
