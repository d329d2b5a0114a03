#pragma once

#include "sla/engine.hpp"
#include "sla/eval.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sla {

/// Every knob that influences a run's outputs. Serialized as a flat
/// `key=value` document in a fixed key order.
struct RunConfig {
    Index k_folds = 5;
    std::uint64_t repetitions = 1000;
    Index pca_dims = 10;
    double epsilon = kDefaultEpsilon;
    double clip_delta = kDefaultClipDelta;
    double shrinkage = kDefaultShrinkage;
    std::uint64_t master_seed = 0;
    std::uint64_t checkpoint_every = 0; ///< 0: checkpoint only at halt/end
    std::uint64_t trace_every = 0;      ///< 0: max(50, repetitions / 200)
    double noise_ratio = 0.01;
    StdForm std_form = StdForm::population;
    bool early_stop = false;
    Index stop_window = 3;
    double stop_tau_auroc = 0.005;
    double stop_tau_rank = 0.999;
    // Synthetic corpus used by `simulate` when no features are given.
    Index sim_n = 5000;
    Index sim_dims = 10;
    double sim_positive_fraction = 0.1;
    double sim_separation = 1.8124;

    /// trace_every with the default resolved.
    std::uint64_t effective_trace_every() const;
    /// Copy with every derived default filled in.
    RunConfig resolved() const;

    EngineOptions engine_options() const;
    StoppingPolicy stopping_policy() const;

    /// Throws ValidationError on any out-of-range field.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Canonical `key=value` text, one line per field, fixed order.
std::string serialize(const RunConfig& config);

/// Applies `key=value` lines on top of `base`. Blank lines and `#` comments
/// are ignored; unknown keys and unparsable values are errors.
RunConfig parse_config(std::string_view text, RunConfig base = {});

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

void write_config(const std::filesystem::path& path, const RunConfig& config);

/// Digest of the fields that fix per-repetition results, the command name
/// and the data fingerprint. Repetition count, cadences and stopping rules
/// are excluded so a run may be extended from its checkpoint.
std::uint64_t config_digest(const RunConfig& config, std::string_view mode, std::uint64_t data_fingerprint);

} // namespace sla
