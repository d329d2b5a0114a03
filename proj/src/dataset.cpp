#include "sla/dataset.hpp"

#include "sla/error.hpp"
#include "sla/rng.hpp"
#include "text_table.hpp"

#include <nlohmann/json.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace sla {

namespace {

constexpr const char* kModule = "dataset";

void hash_u64(detail::Fnv1a& h, std::uint64_t v) {
    unsigned char le[8];
    for (int b = 0; b < 8; ++b) {
        le[b] = static_cast<unsigned char>(v >> (8 * b));
    }
    h.bytes(le, sizeof le);
}

struct RawFeatures {
    std::vector<std::string> ids;
    Matrix values;
};

RawFeatures read_feature_table(const std::filesystem::path& path) {
    const auto table = detail::read_table(path, kModule);
    if (table.header.size() < 2 || table.header.front() != "id") {
        throw ValidationError(kModule, fmt::format("'{}': header must be id,f0,f1,...", path.string()));
    }
    const Index d = table.header.size() - 1;
    RawFeatures out;
    out.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(d));
    out.ids.reserve(table.rows.size());
    for (Index r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != d + 1) {
            throw ValidationError(kModule,
                                  fmt::format("dimension mismatch at line {}: expected {} columns, got {}",
                                              table.line_numbers[r], d + 1, row.size()));
        }
        out.ids.push_back(row[0]);
        for (Index c = 0; c < d; ++c) {
            double v = 0.0;
            if (!detail::parse_double(row[c + 1], v)) {
                throw ValidationError(kModule, fmt::format("unparsable value '{}' at ({},{})", row[c + 1], r, c));
            }
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return out;
}

RawFeatures read_feature_binary(const std::filesystem::path& path, const std::filesystem::path& sidecar) {
    nlohmann::json meta;
    {
        std::ifstream in(sidecar);
        if (!in) {
            throw IoError(kModule, fmt::format("cannot open '{}'", sidecar.string()));
        }
        try {
            meta = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(kModule, fmt::format("bad metadata '{}': {}", sidecar.string(), e.what()));
        }
    }
    if (!meta.contains("n") || !meta.contains("d") || !meta.contains("ids_path") ||
        !meta["n"].is_number_unsigned() || !meta["d"].is_number_unsigned() || !meta["ids_path"].is_string()) {
        throw ValidationError(kModule, fmt::format("metadata '{}' needs n, d and ids_path", sidecar.string()));
    }
    const auto n = meta["n"].get<std::uint64_t>();
    const auto d = meta["d"].get<std::uint64_t>();
    std::filesystem::path ids_path = meta["ids_path"].get<std::string>();
    if (ids_path.is_relative()) {
        ids_path = sidecar.parent_path() / ids_path;
    }

    RawFeatures out;
    {
        std::ifstream in(ids_path);
        if (!in) {
            throw IoError(kModule, fmt::format("cannot open '{}'", ids_path.string()));
        }
        std::string line;
        while (std::getline(in, line)) {
            auto id = detail::trim(line);
            if (!id.empty()) {
                out.ids.emplace_back(id);
            }
        }
    }
    if (out.ids.size() != n) {
        throw ValidationError(kModule, fmt::format("dimension mismatch: {} ids for n={}", out.ids.size(), n));
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(kModule, fmt::format("cannot open '{}'", path.string()));
    }
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);
    if (bytes != n * d * 4) {
        throw ValidationError(kModule, fmt::format("dimension mismatch: '{}' holds {} bytes, expected {}x{}x4",
                                                   path.string(), bytes, n, d));
    }
    std::vector<unsigned char> raw(bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (!in) {
        throw IoError(kModule, fmt::format("read failure on '{}'", path.string()));
    }
    out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::uint64_t i = 0; i < n * d; ++i) {
        std::uint32_t word = 0;
        for (int b = 0; b < 4; ++b) {
            word |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
        }
        out.values.data()[i] = static_cast<double>(std::bit_cast<float>(word));
    }
    return out;
}

} // namespace

Dataset::Dataset(std::vector<std::string> ids, Matrix features, Labels labels)
    : ids_(std::move(ids)), features_(std::move(features)), labels_(std::move(labels)) {
    const auto n = labels_.size();
    if (ids_.size() != n || static_cast<Index>(features_.rows()) != n) {
        throw ValidationError(kModule, fmt::format("dimension mismatch: {} ids, {} feature rows, {} labels",
                                                   ids_.size(), features_.rows(), n));
    }
    if (features_.cols() == 0) {
        throw ValidationError(kModule, "feature matrix has no columns");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(n);
    for (const auto& id : ids_) {
        if (!seen.insert(id).second) {
            throw ValidationError(kModule, fmt::format("duplicate id '{}'", id));
        }
    }
    for (Eigen::Index r = 0; r < features_.rows(); ++r) {
        for (Eigen::Index c = 0; c < features_.cols(); ++c) {
            if (!std::isfinite(features_(r, c))) {
                throw ValidationError(kModule, fmt::format("non-finite value at ({},{})", r, c));
            }
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (labels_[i] > 1) {
            throw ValidationError(kModule, fmt::format("label outside {{0,1}} for id '{}'", ids_[i]));
        }
    }
    const auto pos = count_positive();
    if (pos == 0 || pos == n) {
        throw ValidationError(kModule, "single-class corpus: both labels 0 and 1 must be present");
    }
}

Index Dataset::count_positive() const noexcept {
    return static_cast<Index>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

Dataset Dataset::with_labels(Labels labels) const {
    return Dataset(ids_, features_, std::move(labels));
}

Index NoiseMask::flip_count() const noexcept {
    return static_cast<Index>(std::count(flipped.begin(), flipped.end(), true));
}

Dataset load_dataset(const std::filesystem::path& features_path, const std::filesystem::path& labels_path) {
    auto sidecar = features_path;
    sidecar += ".json";
    RawFeatures raw = std::filesystem::exists(sidecar) ? read_feature_binary(features_path, sidecar)
                                                       : read_feature_table(features_path);

    const auto table = detail::read_table(labels_path, kModule);
    if (table.header.size() != 2 || table.header[0] != "id" || table.header[1] != "label") {
        throw ValidationError(kModule, fmt::format("'{}': header must be id,label", labels_path.string()));
    }
    std::unordered_map<std::string, std::uint8_t> by_id;
    by_id.reserve(table.rows.size());
    for (Index r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != 2) {
            throw ValidationError(kModule, fmt::format("dimension mismatch at line {} of '{}'",
                                                       table.line_numbers[r], labels_path.string()));
        }
        int value = -1;
        if (!detail::parse_int(row[1], value) || (value != 0 && value != 1)) {
            throw ValidationError(kModule, fmt::format("label outside {{0,1}} for id '{}': '{}'", row[0], row[1]));
        }
        if (!by_id.emplace(row[0], static_cast<std::uint8_t>(value)).second) {
            throw ValidationError(kModule, fmt::format("duplicate id '{}' in labels", row[0]));
        }
    }
    if (by_id.size() != raw.ids.size()) {
        throw ValidationError(kModule, fmt::format("dimension mismatch: {} feature rows, {} labels",
                                                   raw.ids.size(), by_id.size()));
    }
    Labels labels;
    labels.reserve(raw.ids.size());
    for (const auto& id : raw.ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw ValidationError(kModule, fmt::format("unmatched id '{}'", id));
        }
        labels.push_back(it->second);
    }
    return Dataset(std::move(raw.ids), std::move(raw.values), std::move(labels));
}

Index flip_count_for(double ratio, Index n) {
    return static_cast<Index>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

std::pair<Dataset, NoiseMask> inject_noise(const Dataset& dataset, double ratio, std::uint64_t seed) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
        throw ValidationError(kModule, fmt::format("noise ratio {} outside [0,1]", ratio));
    }
    const Index n = dataset.size();
    const Index flips = flip_count_for(ratio, n);

    // Partial Fisher-Yates: the first `flips` slots are a uniform sample
    // without replacement.
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    Xoshiro256 rng(stream_seed(seed, Stream::noise));
    for (Index i = 0; i < flips; ++i) {
        const Index j = i + static_cast<Index>(rng.below(n - i));
        std::swap(order[i], order[j]);
    }

    NoiseMask mask;
    mask.flipped.assign(n, false);
    mask.original_labels = dataset.labels();
    mask.ratio = ratio;
    mask.seed = seed;
    Labels observed = dataset.labels();
    for (Index i = 0; i < flips; ++i) {
        mask.flipped[order[i]] = true;
        observed[order[i]] ^= 1U;
    }
    const auto pos = static_cast<Index>(std::count(observed.begin(), observed.end(), std::uint8_t{1}));
    if (pos == 0 || pos == n) {
        throw ValidationError(kModule, fmt::format("flipping {} labels would leave a class empty", flips));
    }
    return {dataset.with_labels(std::move(observed)), std::move(mask)};
}

void write_noise_mask(const std::filesystem::path& path, const Dataset& observed, const NoiseMask& mask) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(kModule, fmt::format("cannot write '{}'", path.string()));
    }
    out << "id,original_label,observed_label,flipped\n";
    for (Index i = 0; i < observed.size(); ++i) {
        out << observed.ids()[i] << ',' << int(mask.original_labels[i]) << ',' << int(observed.labels()[i]) << ','
            << (mask.flipped[i] ? 1 : 0) << '\n';
    }
    if (!out) {
        throw IoError(kModule, fmt::format("write failure on '{}'", path.string()));
    }
}

std::vector<bool> read_noise_mask(const std::filesystem::path& path, const std::vector<std::string>& ids) {
    const auto table = detail::read_table(path, kModule);
    if (table.header != std::vector<std::string>{"id", "original_label", "observed_label", "flipped"}) {
        throw ValidationError(kModule,
                              fmt::format("'{}': header must be id,original_label,observed_label,flipped", path.string()));
    }
    std::unordered_map<std::string, bool> by_id;
    for (Index r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        int flag = -1;
        if (row.size() != 4 || !detail::parse_int(row[3], flag) || (flag != 0 && flag != 1)) {
            throw ValidationError(kModule, fmt::format("malformed mask row at line {}", table.line_numbers[r]));
        }
        by_id[row[0]] = flag == 1;
    }
    std::vector<bool> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw ValidationError(kModule, fmt::format("unmatched id '{}' in noise mask", id));
        }
        out.push_back(it->second);
    }
    return out;
}

Dataset make_gaussian_mixture(const MixtureSpec& spec, std::uint64_t seed) {
    if (spec.n < 2 || spec.dims == 0) {
        throw ValidationError(kModule, "mixture needs n >= 2 and dims >= 1");
    }
    if (!(spec.positive_fraction > 0.0 && spec.positive_fraction < 1.0)) {
        throw ValidationError(kModule, fmt::format("positive fraction {} outside (0,1)", spec.positive_fraction));
    }
    const Index n_pos = flip_count_for(spec.positive_fraction, spec.n);
    if (n_pos == 0 || n_pos == spec.n) {
        throw ValidationError(kModule, "mixture would contain a single class");
    }

    Xoshiro256 rng(stream_seed(seed, Stream::synthetic));
    Labels labels(spec.n, 0);
    std::fill_n(labels.begin(), n_pos, std::uint8_t{1});
    shuffle(labels, rng);

    const double offset = 0.5 * spec.separation / std::sqrt(static_cast<double>(spec.dims));
    Matrix x(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.dims));
    std::vector<std::string> ids;
    ids.reserve(spec.n);
    for (Index i = 0; i < spec.n; ++i) {
        const double shift = labels[i] ? offset : -offset;
        for (Index c = 0; c < spec.dims; ++c) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rng.normal() + shift;
        }
        ids.push_back(fmt::format("s{:05d}", i));
    }
    return Dataset(std::move(ids), std::move(x), std::move(labels));
}

std::uint64_t fingerprint(const Dataset& dataset) {
    detail::Fnv1a h;
    hash_u64(h, dataset.size());
    hash_u64(h, dataset.dims());
    for (const auto& id : dataset.ids()) {
        h.text(id);
    }
    h.bytes(dataset.labels().data(), dataset.labels().size());
    const auto& x = dataset.features();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        hash_u64(h, std::bit_cast<std::uint64_t>(x.data()[i]));
    }
    return h.value();
}

} // namespace sla
