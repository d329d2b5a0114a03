#include "sla/commands.hpp"

#include "sla/error.hpp"
#include "sla/pca.hpp"
#include "text_table.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

namespace sla {

namespace {

constexpr const char* kModule = "cli";

using TraceHook = std::function<bool(const ScoreBoard&, ResumeState&)>;

/// Shared repetition loop: advances in batches that end on trace points,
/// checkpoint points, the halt point and the final repetition.
DriveResult drive(const Matrix& x, const Labels& labels, const RunConfig& config, const RunControl& control,
                  std::uint64_t digest, const TraceHook& on_trace) {
    if (control.halt_after && !control.checkpoint) {
        throw ValidationError(kModule, "--halt-after requires --checkpoint");
    }
    DriveResult out;
    out.board = ScoreBoard(labels.size(), digest);
    if (control.resume) {
        auto cp = restore_checkpoint(*control.resume, digest, labels.size(), config.k_folds);
        if (cp.board.repetitions_done > config.repetitions) {
            throw ValidationError(kModule, fmt::format("checkpoint holds {} repetitions, more than the requested {}",
                                                       cp.board.repetitions_done, config.repetitions));
        }
        out.board = std::move(cp.board);
        out.resume = std::move(cp.resume);
    }

    const RepetitionRunner runner(x, labels, config.engine_options(), control.workers);
    const std::uint64_t total = config.repetitions;
    const std::uint64_t trace_every = config.effective_trace_every();
    const std::uint64_t save_every = control.checkpoint ? config.checkpoint_every : 0;
    auto next_multiple = [](std::uint64_t at, std::uint64_t step) { return (at / step + 1) * step; };

    auto save = [&] {
        if (control.checkpoint) {
            write_checkpoint(*control.checkpoint, Checkpoint{out.board, config.k_folds, out.resume});
        }
    };

    while (out.board.repetitions_done < total) {
        const std::uint64_t done = out.board.repetitions_done;
        std::uint64_t target = std::min(total, next_multiple(done, trace_every));
        if (save_every != 0) {
            target = std::min(target, next_multiple(done, save_every));
        }
        if (control.halt_after && *control.halt_after > done) {
            target = std::min(target, *control.halt_after);
        }
        runner.advance(out.board, target);

        bool stop = false;
        if (target % trace_every == 0 || target == total) {
            stop = on_trace(out.board, out.resume);
        }
        if (save_every != 0 && target % save_every == 0) {
            save();
        }
        if (control.halt_after && target >= *control.halt_after && target < total) {
            save();
            out.halted = true;
            return out;
        }
        if (stop) {
            out.stopped_early = true;
            break;
        }
    }
    save();
    return out;
}

Dataset load_or_synthesize(const RunConfig& config, const RunControl& control) {
    if (control.features) {
        if (!control.labels) {
            throw ValidationError(kModule, "--features requires --labels");
        }
        return load_dataset(*control.features, *control.labels);
    }
    if (control.labels) {
        throw ValidationError(kModule, "--labels requires --features");
    }
    MixtureSpec spec;
    spec.n = config.sim_n;
    spec.dims = config.sim_dims;
    spec.positive_fraction = config.sim_positive_fraction;
    spec.separation = config.sim_separation;
    return make_gaussian_mixture(spec, config.master_seed);
}

std::vector<double> as_doubles(const std::vector<std::uint64_t>& counts) {
    return {counts.begin(), counts.end()};
}

void log_line(std::ostream* progress, const std::string& line) {
    if (progress != nullptr) {
        *progress << line << '\n';
        progress->flush();
    }
}

void write_summary(const std::filesystem::path& path, std::uint64_t repetitions, const ScoreDistributionSummary& s,
                   const AurocCheckpoint& last) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(kModule, fmt::format("cannot write '{}'", path.string()));
    }
    out << fmt::format("repetitions={}\n", repetitions);
    out << fmt::format("clean_count={}\nnoisy_count={}\n", s.clean_count, s.noisy_count);
    out << fmt::format("clean_mean={:.10f}\nclean_std={:.10f}\n", s.clean_mean, s.clean_std);
    out << fmt::format("noisy_mean={:.10f}\nnoisy_std={:.10f}\n", s.noisy_mean, s.noisy_std);
    out << fmt::format("overlap_coefficient={:.10f}\n", s.overlap_coefficient);
    out << fmt::format("auroc_sla={:.10f}\nauroc_recov={:.10f}\n", last.auroc_sla, last.auroc_recov);
}

std::vector<SampleScore> ranked(std::vector<SampleScore> scores) {
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
    return scores;
}

void prepare_out_dir(const std::filesystem::path& dir) {
    if (dir.empty()) {
        throw ValidationError(kModule, "--out is required");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError(kModule, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
}

} // namespace

SimulationOutcome run_simulation(const RunConfig& raw_config, const RunControl& control) {
    const RunConfig config = raw_config.resolved();
    config.validate();
    Dataset clean = load_or_synthesize(config, control);
    if (flip_count_for(config.noise_ratio, clean.size()) == 0) {
        throw ValidationError(kModule, fmt::format("noise ratio {} flips no samples of N={}; nothing to detect",
                                                   config.noise_ratio, clean.size()));
    }
    auto [observed, mask] = inject_noise(clean, config.noise_ratio, config.master_seed);
    const auto pca = fit_pca(observed.features(), config.pca_dims);
    const Matrix x = transform(pca, observed.features());
    const auto digest = config_digest(config, "simulate", fingerprint(observed));
    const auto policy = config.stopping_policy();

    const auto& flipped = mask.flipped;
    auto on_trace = [&](const ScoreBoard& board, ResumeState& state) {
        const double a = compute_auroc(sla_scores(board), flipped);
        const double b = compute_auroc(as_doubles(board.recov_counts), flipped);
        state.records.push_back({board.repetitions_done, a, b});
        log_line(control.progress, fmt::format("[simulate] {}/{} auroc_sla={:.4f} auroc_recov={:.4f}",
                                               board.repetitions_done, config.repetitions, a, b));
        if (!config.early_stop || state.records.size() < 2) {
            return false;
        }
        std::vector<double> series;
        for (const auto& r : state.records) {
            series.push_back(r.primary);
        }
        return convergence_check_auroc(series, policy) == StopDecision::stop;
    };

    SimulationOutcome outcome{observed, mask, pca, drive(x, observed.labels(), config, control, digest, on_trace), {}, {}};
    for (const auto& r : outcome.run.resume.records) {
        outcome.trace.push({r.repetitions, r.primary, r.secondary});
    }
    if (!outcome.run.halted) {
        outcome.summary = summarize_distributions(sla_scores(outcome.run.board), flipped);
    }
    return outcome;
}

AuditOutcome run_audit(const RunConfig& raw_config, const RunControl& control) {
    const RunConfig config = raw_config.resolved();
    config.validate();
    if (!control.features || !control.labels) {
        throw ValidationError(kModule, "audit needs --features and --labels");
    }
    Dataset dataset = load_dataset(*control.features, *control.labels);
    const auto pca = fit_pca(dataset.features(), config.pca_dims);
    const Matrix x = transform(pca, dataset.features());
    const auto digest = config_digest(config, "audit", fingerprint(dataset));
    const auto policy = config.stopping_policy();

    auto on_trace = [&](const ScoreBoard& board, ResumeState& state) {
        auto scores = sla_scores(board);
        if (state.last_snapshot.empty()) {
            log_line(control.progress, fmt::format("[audit] {}/{}", board.repetitions_done, config.repetitions));
            state.last_snapshot = std::move(scores);
            return false;
        }
        const double rho = spearman(state.last_snapshot, scores);
        state.records.push_back({board.repetitions_done, rho, 0.0});
        state.last_snapshot = std::move(scores);
        log_line(control.progress, fmt::format("[audit] {}/{} rank_correlation={:.6f}", board.repetitions_done,
                                               config.repetitions, rho));
        if (!config.early_stop) {
            return false;
        }
        std::vector<double> series;
        for (const auto& r : state.records) {
            series.push_back(r.primary);
        }
        return convergence_check_rank(series, policy) == StopDecision::stop;
    };

    AuditOutcome outcome{dataset, pca, drive(x, dataset.labels(), config, control, digest, on_trace), {}};
    for (const auto& r : outcome.run.resume.records) {
        outcome.trace.push_back({r.repetitions, r.primary});
    }
    return outcome;
}

void write_scores(const std::filesystem::path& path, const std::vector<SampleScore>& scores) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(kModule, fmt::format("cannot write '{}'", path.string()));
    }
    out << "id,sla_score,recov_count,recov_fraction,rank\n";
    for (const auto& s : ranked(scores)) {
        out << fmt::format("{},{},{},{},{}\n", s.id, s.sla_score, s.recov_count, s.recov_fraction, s.rank);
    }
    if (!out) {
        throw IoError(kModule, fmt::format("write failure on '{}'", path.string()));
    }
}

std::vector<ScoreRow> read_scores(const std::filesystem::path& path) {
    const auto table = detail::read_table(path, kModule);
    if (table.header != std::vector<std::string>{"id", "sla_score", "recov_count", "recov_fraction", "rank"}) {
        throw ValidationError(kModule, fmt::format("malformed scores file '{}': bad header", path.string()));
    }
    std::vector<ScoreRow> rows;
    rows.reserve(table.rows.size());
    for (Index r = 0; r < table.rows.size(); ++r) {
        const auto& f = table.rows[r];
        ScoreRow row;
        if (f.size() != 5 || !detail::parse_double(f[1], row.sla_score) || !detail::parse_int(f[2], row.recov_count) ||
            !detail::parse_double(f[3], row.recov_fraction) || !detail::parse_int(f[4], row.rank)) {
            throw ValidationError(kModule, fmt::format("malformed scores file '{}' at line {}", path.string(),
                                                       table.line_numbers[r]));
        }
        row.id = f[0];
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ValidationError(kModule, fmt::format("malformed scores file '{}': no rows", path.string()));
    }
    return rows;
}

void render_report(const ReportOptions& options, std::ostream& out) {
    auto rows = read_scores(options.scores);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
    const Index shown = std::min(options.top_n, rows.size());

    out << fmt::format("samples: {}\n\n", rows.size());
    out << fmt::format("top {} by sla_score\n", shown);
    out << fmt::format("{:>6}  {:<24} {:>12} {:>11} {:>14}\n", "rank", "id", "sla_score", "recov_count",
                       "recov_fraction");
    for (Index i = 0; i < shown; ++i) {
        const auto& r = rows[i];
        out << fmt::format("{:>6}  {:<24} {:>12.6f} {:>11} {:>14.6f}\n", r.rank, r.id, r.sla_score, r.recov_count,
                           r.recov_fraction);
    }

    constexpr Index bins = 20;
    constexpr Index bar = 40;
    const auto [lo_it, hi_it] = std::minmax_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.sla_score < b.sla_score;
    });
    const double lo = lo_it->sla_score;
    const double width = hi_it->sla_score - lo;
    std::vector<Index> counts(bins, 0);
    for (const auto& r : rows) {
        Index b = 0;
        if (width > 0.0) {
            b = std::min(bins - 1, static_cast<Index>(std::floor((r.sla_score - lo) / width * bins)));
        }
        ++counts[b];
    }
    const Index peak = *std::max_element(counts.begin(), counts.end());
    out << "\nsla_score histogram\n";
    for (Index b = 0; b < bins; ++b) {
        const double from = lo + width * static_cast<double>(b) / bins;
        const double to = lo + width * static_cast<double>(b + 1) / bins;
        const auto len = counts[b] == 0 ? 0 : std::max<Index>(1, counts[b] * bar / peak);
        out << fmt::format("[{:>9.4f}, {:>9.4f}) {:>7} {}\n", from, to, counts[b], std::string(len, '#'));
    }

    if (options.mask) {
        std::vector<std::string> ids;
        std::vector<double> scores;
        for (const auto& r : rows) {
            ids.push_back(r.id);
            scores.push_back(r.sla_score);
        }
        const auto flipped = read_noise_mask(*options.mask, ids);
        const auto s = summarize_distributions(scores, flipped);
        out << "\nclean/noisy groups\n";
        out << fmt::format("clean: n={} mean={:.6f} std={:.6f}\n", s.clean_count, s.clean_mean, s.clean_std);
        out << fmt::format("noisy: n={} mean={:.6f} std={:.6f}\n", s.noisy_count, s.noisy_mean, s.noisy_std);
        out << fmt::format("overlap_coefficient={:.6f}\n", s.overlap_coefficient);
        out << fmt::format("auroc_sla={:.6f}\n", compute_auroc(scores, flipped));
        out << (s.noisy_mean > s.clean_mean ? "noisy_mean > clean_mean\n" : "noisy_mean <= clean_mean\n");
    }
}

int guarded(const std::function<void()>& body, std::ostream& diag) {
    try {
        body();
        return kExitOk;
    } catch (const ValidationError& e) {
        diag << fmt::format("sla: error [{}]: {}\n", e.module(), e.what());
        return kExitValidation;
    } catch (const IoError& e) {
        diag << fmt::format("sla: error [{}]: {}\n", e.module(), e.what());
        return kExitIo;
    } catch (const NumericalError& e) {
        diag << fmt::format("sla: error [{}]: {}\n", e.module(), e.what());
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        diag << fmt::format("sla: error [io]: {}\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        diag << fmt::format("sla: error [internal]: {}\n", e.what());
        return kExitValidation;
    }
}

int cmd_simulate(const RunConfig& config, const RunControl& control, std::ostream& status, std::ostream& diag) {
    return guarded(
        [&] {
            prepare_out_dir(control.out_dir);
            const auto outcome = run_simulation(config, control);
            const auto& dir = control.out_dir;
            write_config(dir / "config.txt", config.resolved());
            write_noise_mask(dir / "noise_mask.csv", outcome.observed, outcome.mask);
            write_pca_model(dir / "pca.txt", outcome.pca);
            const auto& board = outcome.run.board;
            if (outcome.run.halted) {
                status << fmt::format("simulate status=halted repetitions={}\n", board.repetitions_done);
                return;
            }
            write_scores(dir / "scores.csv", finalize(board, outcome.observed.ids()));
            write_auroc_trace(dir / "trace.csv", outcome.trace);
            const auto& last = outcome.trace.checkpoints().back();
            write_summary(dir / "distribution.txt", board.repetitions_done, *outcome.summary, last);
            status << fmt::format("simulate status=ok repetitions={} auroc_sla={:.6f} auroc_recov={:.6f}{}\n",
                                  board.repetitions_done, last.auroc_sla, last.auroc_recov,
                                  outcome.run.stopped_early ? " early_stop=1" : "");
        },
        diag);
}

int cmd_audit(const RunConfig& config, const RunControl& control, std::ostream& status, std::ostream& diag) {
    return guarded(
        [&] {
            prepare_out_dir(control.out_dir);
            const auto outcome = run_audit(config, control);
            const auto& dir = control.out_dir;
            write_config(dir / "config.txt", config.resolved());
            write_pca_model(dir / "pca.txt", outcome.pca);
            const auto& board = outcome.run.board;
            if (outcome.run.halted) {
                status << fmt::format("audit status=halted repetitions={}\n", board.repetitions_done);
                return;
            }
            write_scores(dir / "scores.csv", finalize(board, outcome.dataset.ids()));
            write_rank_trace(dir / "rank_trace.csv", outcome.trace);
            status << fmt::format("audit status=ok repetitions={}{}\n", board.repetitions_done,
                                  outcome.run.stopped_early ? " early_stop=1" : "");
        },
        diag);
}

int cmd_report(const ReportOptions& options, std::ostream& status, std::ostream& diag) {
    return guarded(
        [&] {
            if (options.out.empty() || options.out == "-") {
                render_report(options, status);
                return;
            }
            std::ofstream out(options.out);
            if (!out) {
                throw IoError(kModule, fmt::format("cannot write '{}'", options.out.string()));
            }
            render_report(options, out);
            status << fmt::format("report status=ok out={}\n", options.out.string());
        },
        diag);
}

} // namespace sla
