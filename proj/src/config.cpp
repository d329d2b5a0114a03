#include "sla/config.hpp"

#include "sla/error.hpp"
#include "text_table.hpp"

#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sla {

namespace {

constexpr const char* kModule = "config";


/// A typed view of one config entry.
struct Entry {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<bool(RunConfig&, std::string_view)> set;
    bool in_digest = false;
};

template <typename Int>
Entry int_entry(std::string key, Int RunConfig::*member, bool in_digest) {
    return {std::move(key), [member](const RunConfig& c) { return fmt::format("{}", c.*member); },
            [member](RunConfig& c, std::string_view v) { return detail::parse_int(v, c.*member); }, in_digest};
}

Entry real_entry(std::string key, double RunConfig::*member, bool in_digest) {
    return {std::move(key), [member](const RunConfig& c) { return fmt::format("{}", c.*member); },
            [member](RunConfig& c, std::string_view v) { return detail::parse_double(v, c.*member); }, in_digest};
}

Entry bool_entry(std::string key, bool RunConfig::*member, bool in_digest) {
    return {std::move(key), [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); },
            [member](RunConfig& c, std::string_view v) {
                if (v == "true" || v == "1") {
                    c.*member = true;
                } else if (v == "false" || v == "0") {
                    c.*member = false;
                } else {
                    return false;
                }
                return true;
            },
            in_digest};
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        t.push_back(int_entry("k_folds", &RunConfig::k_folds, true));
        t.push_back(int_entry("repetitions", &RunConfig::repetitions, false));
        t.push_back(int_entry("pca_dims", &RunConfig::pca_dims, true));
        t.push_back(real_entry("epsilon", &RunConfig::epsilon, true));
        t.push_back(real_entry("clip_delta", &RunConfig::clip_delta, true));
        t.push_back(real_entry("shrinkage", &RunConfig::shrinkage, true));
        t.push_back(int_entry("master_seed", &RunConfig::master_seed, true));
        t.push_back(int_entry("checkpoint_every", &RunConfig::checkpoint_every, false));
        t.push_back(int_entry("trace_every", &RunConfig::trace_every, false));
        t.push_back(real_entry("noise_ratio", &RunConfig::noise_ratio, true));
        t.push_back({"std_form",
                     [](const RunConfig& c) {
                         return std::string(c.std_form == StdForm::population ? "population" : "sample");
                     },
                     [](RunConfig& c, std::string_view v) {
                         if (v == "population") {
                             c.std_form = StdForm::population;
                         } else if (v == "sample") {
                             c.std_form = StdForm::sample;
                         } else {
                             return false;
                         }
                         return true;
                     },
                     true});
        t.push_back(bool_entry("early_stop", &RunConfig::early_stop, false));
        t.push_back(int_entry("stop_window", &RunConfig::stop_window, false));
        t.push_back(real_entry("stop_tau_auroc", &RunConfig::stop_tau_auroc, false));
        t.push_back(real_entry("stop_tau_rank", &RunConfig::stop_tau_rank, false));
        t.push_back(int_entry("sim_n", &RunConfig::sim_n, true));
        t.push_back(int_entry("sim_dims", &RunConfig::sim_dims, true));
        t.push_back(real_entry("sim_positive_fraction", &RunConfig::sim_positive_fraction, true));
        t.push_back(real_entry("sim_separation", &RunConfig::sim_separation, true));
        return t;
    }();
    return table;
}

} // namespace

std::uint64_t RunConfig::effective_trace_every() const {
    return trace_every != 0 ? trace_every : std::max<std::uint64_t>(50, repetitions / 200);
}

RunConfig RunConfig::resolved() const {
    RunConfig c = *this;
    c.trace_every = effective_trace_every();
    return c;
}

EngineOptions RunConfig::engine_options() const {
    EngineOptions o;
    o.folds = k_folds;
    o.epsilon = epsilon;
    o.clip_delta = clip_delta;
    o.shrinkage = shrinkage;
    o.std_form = std_form;
    o.master_seed = master_seed;
    return o;
}

StoppingPolicy RunConfig::stopping_policy() const {
    return StoppingPolicy{stop_window, stop_tau_auroc, stop_tau_rank};
}

void RunConfig::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError(kModule, what); };
    if (k_folds < 2) {
        fail(fmt::format("k_folds={} must be >= 2", k_folds));
    }
    if (repetitions < 1) {
        fail("repetitions must be >= 1");
    }
    if (pca_dims < 1) {
        fail("pca_dims must be positive");
    }
    if (!(epsilon > 0.0) || !(clip_delta > 0.0 && clip_delta < 0.5)) {
        fail("epsilon must be positive and clip_delta inside (0, 0.5)");
    }
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
        fail(fmt::format("shrinkage {} outside [0,1]", shrinkage));
    }
    if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) {
        fail(fmt::format("noise_ratio {} outside [0,1]", noise_ratio));
    }
    if (stop_window < 1 || !(stop_tau_auroc > 0.0) || !(stop_tau_rank > 0.0 && stop_tau_rank <= 1.0)) {
        fail("stopping policy needs stop_window >= 1, stop_tau_auroc > 0, stop_tau_rank in (0,1]");
    }
    if (sim_n < 2 || sim_dims < 1 || !(sim_positive_fraction > 0.0 && sim_positive_fraction < 1.0) ||
        !(sim_separation >= 0.0)) {
        fail("synthetic corpus parameters out of range");
    }
}

std::string serialize(const RunConfig& config) {
    std::string out;
    for (const auto& e : entries()) {
        out += e.key;
        out += '=';
        out += e.get(config);
        out += '\n';
    }
    return out;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::map<std::string_view, const Entry*> by_key;
    for (const auto& e : entries()) {
        by_key[e.key] = &e;
    }
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = detail::trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError(kModule, fmt::format("line {}: expected key=value", line_no));
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            throw ValidationError(kModule, fmt::format("line {}: unknown key '{}'", line_no, key));
        }
        if (!it->second->set(base, value)) {
            throw ValidationError(kModule, fmt::format("line {}: bad value '{}' for '{}'", line_no, value, key));
        }
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(kModule, fmt::format("cannot open '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void write_config(const std::filesystem::path& path, const RunConfig& config) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(kModule, fmt::format("cannot write '{}'", path.string()));
    }
    out << serialize(config);
    if (!out) {
        throw IoError(kModule, fmt::format("write failure on '{}'", path.string()));
    }
}

std::uint64_t config_digest(const RunConfig& config, std::string_view mode, std::uint64_t data_fingerprint) {
    detail::Fnv1a h;
    h.text(mode);
    for (const auto& e : entries()) {
        if (e.in_digest) {
            h.text(e.key);
            h.text(e.get(config));
        }
    }
    h.text(fmt::format("{:016x}", data_fingerprint));
    return h.value();
}

} // namespace sla
