#include "sla/dataset.hpp"
#include "sla/error.hpp"
#include "sla/eval.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>

using namespace sla;
using sla::testing::scratch_dir;
using sla::testing::write_text;

namespace {

Dataset balanced(Index n, Index dims = 2) {
    std::vector<std::string> ids;
    Labels labels;
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
    for (Index i = 0; i < n; ++i) {
        ids.push_back("id" + std::to_string(i));
        labels.push_back(static_cast<std::uint8_t>(i % 2));
        x(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i);
    }
    return Dataset(ids, x, labels);
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("load_dataset reads a CSV table in file order") {
    const auto dir = scratch_dir("dataset_csv");
    write_text(dir / "f.csv", "id,f0,f1\nb,1.5,2\na,-3,4e-1\nc,0,0\n");
    write_text(dir / "l.csv", "id,label\na,1\nb,0\nc,1\n");
    const auto d = load_dataset(dir / "f.csv", dir / "l.csv");
    CHECK(d.size() == 3);
    CHECK(d.dims() == 2);
    CHECK(d.ids() == std::vector<std::string>{"b", "a", "c"});
    CHECK(d.labels() == Labels{0, 1, 1});
    CHECK(d.features()(1, 0) == -3.0);
    CHECK(d.features()(1, 1) == doctest::Approx(0.4));
}

TEST_CASE("load_dataset error paths") {
    const auto dir = scratch_dir("dataset_errors");
    write_text(dir / "f.csv", "id,f0\na,1\nb,2\nc,3\n");

    SUBCASE("unmatched id") {
        write_text(dir / "l.csv", "id,label\na,1\nb,0\nz,1\n");
        CHECK(error_of([&] { load_dataset(dir / "f.csv", dir / "l.csv"); }).find("unmatched id") != std::string::npos);
    }
    SUBCASE("label missing for one id") {
        write_text(dir / "l.csv", "id,label\na,1\nb,0\n");
        CHECK_THROWS_AS(load_dataset(dir / "f.csv", dir / "l.csv"), ValidationError);
    }
    SUBCASE("NaN cell") {
        write_text(dir / "g.csv", "id,f0,f1\na,1,2\nb,NaN,3\nc,0,0\n");
        write_text(dir / "l.csv", "id,label\na,1\nb,0\nc,1\n");
        CHECK(error_of([&] { load_dataset(dir / "g.csv", dir / "l.csv"); }) == "non-finite value at (1,0)");
    }
    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(load_dataset(dir / "nope.csv", dir / "l.csv"), IoError);
    }
}

TEST_CASE("loader rejects generated corruptions") {
    // Property: each corruption class is rejected for many random corpora.
    Xoshiro256 rng(7);
    const auto dir = scratch_dir("dataset_corrupt");
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 4 + rng.below(20);
        const Index d = 1 + rng.below(4);
        std::vector<std::vector<std::string>> cells(n);
        std::vector<int> labels(n);
        for (Index i = 0; i < n; ++i) {
            cells[i].push_back("s" + std::to_string(i));
            for (Index c = 0; c < d; ++c) {
                cells[i].push_back(std::to_string(rng.normal()));
            }
            labels[i] = static_cast<int>(i % 2);
        }
        const Index victim = rng.below(n);
        const int kind = trial % 7;
        auto& lab = labels;
        std::string extra_label_row;
        switch (kind) {
        case 0: cells[victim].push_back("1.0"); break;                 // dimension mismatch
        case 1: cells[victim][0] = cells[(victim + 1) % n][0]; break;   // duplicate id
        case 2: cells[victim][1] = "inf"; break;                        // non-finite
        case 3: lab[victim] = 2; break;                                 // label outside {0,1}
        case 4: std::fill(lab.begin(), lab.end(), 1); break;            // single class
        case 5: extra_label_row = "ghost,0\n"; break;                   // label without features
        case 6: cells[victim][1] = "abc"; break;                        // unparsable
        }
        std::string f = "id";
        for (Index c = 0; c < d; ++c) {
            f += ",f" + std::to_string(c);
        }
        f += '\n';
        std::string l = "id,label\n";
        for (Index i = 0; i < n; ++i) {
            for (Index c = 0; c < cells[i].size(); ++c) {
                f += (c ? "," : "") + cells[i][c];
            }
            f += '\n';
            if (!(kind == 1 && i == victim)) {
                l += "s" + std::to_string(i) + "," + std::to_string(lab[i]) + "\n";
            }
        }
        l += extra_label_row;
        write_text(dir / "f.csv", f);
        write_text(dir / "l.csv", l);
        CAPTURE(kind);
        CHECK_THROWS_AS(load_dataset(dir / "f.csv", dir / "l.csv"), ValidationError);
    }
}

TEST_CASE("load_dataset reads float32 binary with sidecar metadata") {
    const auto dir = scratch_dir("dataset_bin");
    const std::vector<float> values{1.0f, 2.0f, -0.5f, 4.0f, 8.0f, 0.25f};
    std::string bytes;
    for (float v : values) {
        const auto w = std::bit_cast<std::uint32_t>(v);
        for (int b = 0; b < 4; ++b) {
            bytes.push_back(static_cast<char>((w >> (8 * b)) & 0xFF));
        }
    }
    write_text(dir / "z.f32", bytes);
    write_text(dir / "z.f32.json", R"({"n": 3, "d": 2, "ids_path": "ids.txt"})");
    write_text(dir / "ids.txt", "img_a.png\nimg_b.png\nimg_c.png\n");
    write_text(dir / "l.csv", "id,label\nimg_c.png,1\nimg_a.png,0\nimg_b.png,1\n");
    const auto d = load_dataset(dir / "z.f32", dir / "l.csv");
    CHECK(d.size() == 3);
    CHECK(d.features()(1, 0) == -0.5);
    CHECK(d.features()(2, 1) == 0.25);
    CHECK(d.labels() == Labels{0, 1, 1});

    write_text(dir / "z.f32.json", R"({"n": 4, "d": 2, "ids_path": "ids.txt"})");
    CHECK_THROWS_AS(load_dataset(dir / "z.f32", dir / "l.csv"), ValidationError);
}

TEST_CASE("inject_noise with ratio 0 is the identity") {
    const auto d = balanced(50);
    const auto [noisy, mask] = inject_noise(d, 0.0, 3);
    CHECK(mask.flip_count() == 0);
    CHECK(noisy.labels() == d.labels());
}

TEST_CASE("inject_noise flips exactly round(ratio*N) labels") {
    const auto d = balanced(1000);
    const auto [noisy, mask] = inject_noise(d, 0.01, 11);
    // Oracle: elementwise comparison of observed and original labels.
    Index changed = 0;
    for (Index i = 0; i < d.size(); ++i) {
        const bool differs = noisy.labels()[i] != d.labels()[i];
        changed += differs ? 1 : 0;
        CHECK(differs == mask.flipped[i]);
        CHECK(mask.original_labels[i] == d.labels()[i]);
    }
    CHECK(changed == 10);
    CHECK(d.labels()[0] == 0); // input untouched
}

TEST_CASE("flip count exactness over the ratio grid") {
    for (Index n : {Index{100}, Index{1000}, Index{4999}}) {
        const auto d = balanced(n);
        for (double ratio : {0.001, 0.005, 0.01, 0.05, 0.1}) {
            const auto [noisy, mask] = inject_noise(d, ratio, n);
            const auto expected = static_cast<Index>(std::floor(ratio * static_cast<double>(n) + 0.5));
            CHECK(mask.flip_count() == expected);
        }
    }
    CHECK(flip_count_for(0.001, 1000) == 1);
    CHECK(flip_count_for(0.005, 100) == 1); // 0.5 rounds up
}

TEST_CASE("inject_noise is deterministic and reversible") {
    const auto d = balanced(300);
    const auto [a, mask_a] = inject_noise(d, 0.05, 42);
    const auto [b, mask_b] = inject_noise(d, 0.05, 42);
    CHECK(mask_a.flipped == mask_b.flipped);
    CHECK(a.labels() == b.labels());
    const auto [c, mask_c] = inject_noise(d, 0.05, 43);
    CHECK(mask_c.flipped != mask_a.flipped);

    Labels restored = a.labels();
    for (Index i = 0; i < restored.size(); ++i) {
        if (mask_a.flipped[i]) {
            restored[i] ^= 1U;
        }
    }
    CHECK(restored == d.labels());
}

TEST_CASE("inject_noise errors") {
    const auto d = balanced(10);
    CHECK_THROWS_AS(inject_noise(d, -0.1, 1), ValidationError);
    CHECK_THROWS_AS(inject_noise(d, 1.5, 1), ValidationError);
    const Dataset pair({"a", "b"}, Matrix::Zero(2, 1), Labels{0, 1});
    CHECK_THROWS_AS(inject_noise(pair, 0.5, 1), ValidationError);
}

TEST_CASE("noise mask export round-trips the flipped flags") {
    const auto dir = scratch_dir("dataset_mask");
    const auto d = balanced(40);
    const auto [noisy, mask] = inject_noise(d, 0.1, 5);
    write_noise_mask(dir / "mask.csv", noisy, mask);
    const auto text = sla::testing::read_text(dir / "mask.csv");
    CHECK(text.rfind("id,original_label,observed_label,flipped\n", 0) == 0);
    CHECK(read_noise_mask(dir / "mask.csv", noisy.ids()) == mask.flipped);
}

TEST_CASE("Gaussian mixture has the requested shape and separation") {
    MixtureSpec spec;
    spec.n = 20000;
    const auto d = make_gaussian_mixture(spec, 9);
    CHECK(d.size() == 20000);
    CHECK(d.count_positive() == 2000);
    CHECK(fingerprint(d) == fingerprint(make_gaussian_mixture(spec, 9)));
    CHECK(fingerprint(d) != fingerprint(make_gaussian_mixture(spec, 10)));

    // The Bayes discriminant projects onto the all-ones direction; its
    // AUROC should be Phi(separation / sqrt 2) = 0.9.
    std::vector<double> proj(d.size());
    std::vector<bool> pos(d.size());
    for (Index i = 0; i < d.size(); ++i) {
        proj[i] = d.features().row(static_cast<Eigen::Index>(i)).sum();
        pos[i] = d.labels()[i] == 1;
    }
    CHECK(compute_auroc(proj, pos) == doctest::Approx(0.9).epsilon(0.01));
}
