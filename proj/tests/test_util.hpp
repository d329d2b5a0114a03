#pragma once

#include "sla/dataset.hpp"
#include "sla/rng.hpp"
#include "sla/types.hpp"

#include <filesystem>
#include <fstream>
#include <string>

namespace sla::testing {

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sla_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Matrix random_matrix(Index rows, Index cols, Xoshiro256& rng) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = rng.normal();
    }
    return m;
}

/// Writes `features.csv` and `labels.csv` for a dataset into `dir`.
inline void write_dataset_csv(const std::filesystem::path& dir, const Dataset& d) {
    std::ofstream f(dir / "features.csv");
    f << "id";
    for (Index c = 0; c < d.dims(); ++c) {
        f << ",f" << c;
    }
    f << '\n';
    f.precision(17);
    for (Index i = 0; i < d.size(); ++i) {
        f << d.ids()[i];
        for (Index c = 0; c < d.dims(); ++c) {
            f << ',' << d.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        }
        f << '\n';
    }
    std::ofstream l(dir / "labels.csv");
    l << "id,label\n";
    for (Index i = 0; i < d.size(); ++i) {
        l << d.ids()[i] << ',' << int(d.labels()[i]) << '\n';
    }
}

} // namespace sla::testing
