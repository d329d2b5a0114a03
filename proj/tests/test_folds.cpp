#include "sla/error.hpp"
#include "sla/folds.hpp"
#include "sla/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

using namespace sla;

namespace {

Labels make_labels(Index pos, Index neg, Xoshiro256& rng) {
    Labels y(pos + neg, 0);
    std::fill_n(y.begin(), pos, std::uint8_t{1});
    shuffle(y, rng);
    return y;
}

/// counts[c][k]: members of class c in fold k.
std::vector<std::vector<Index>> class_fold_counts(const FoldPlan& plan, const Labels& y) {
    std::vector<std::vector<Index>> counts(2, std::vector<Index>(plan.folds, 0));
    for (Index i = 0; i < y.size(); ++i) {
        ++counts[y[i]][plan.assignments[i]];
    }
    return counts;
}

} // namespace

TEST_CASE("reference vectors of the generators") {
    // splitmix64 seeded with 0 yields 0xE220A8397B1DCDAF first.
    CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
    Xoshiro256 a(123);
    Xoshiro256 b(123);
    for (int i = 0; i < 100; ++i) {
        CHECK(a() == b());
    }
    Xoshiro256 c(5);
    for (int i = 0; i < 1000; ++i) {
        CHECK(c.below(7) < 7);
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("balanced 5/5 corpus with K=5 gives one of each per fold") {
    Xoshiro256 rng(1);
    const auto y = make_labels(5, 5, rng);
    const auto plan = make_fold_plan(y, 5, 99, 0);
    const auto counts = class_fold_counts(plan, y);
    for (Index k = 0; k < 5; ++k) {
        CHECK(counts[0][k] == 1);
        CHECK(counts[1][k] == 1);
    }
}

TEST_CASE("10/90 corpus with K=5 gives 2 positives and 18 negatives per fold") {
    Xoshiro256 rng(2);
    const auto y = make_labels(10, 90, rng);
    for (std::uint64_t r = 0; r < 7; ++r) {
        const auto counts = class_fold_counts(make_fold_plan(y, 5, 3, r), y);
        for (Index k = 0; k < 5; ++k) {
            CHECK(counts[1][k] == 2);
            CHECK(counts[0][k] == 18);
        }
    }
}

TEST_CASE("plans are a pure function of their arguments") {
    Xoshiro256 rng(3);
    const auto y = make_labels(13, 40, rng);
    const auto a = make_fold_plan(y, 4, 77, 12);
    const auto b = make_fold_plan(y, 4, 77, 12);
    CHECK(a.assignments == b.assignments);
    CHECK(a.repetition == 12);
    CHECK(make_fold_plan(y, 4, 78, 12).assignments != a.assignments);
}

TEST_CASE("fold_members reads assignments directly") {
    FoldPlan plan{0, 2, {0, 1, 0, 1}};
    const auto s0 = fold_members(plan, 0);
    CHECK(s0.validation == std::vector<Index>{0, 2});
    CHECK(s0.train == std::vector<Index>{1, 3});
    const auto s1 = fold_members(plan, 1);
    CHECK(s1.validation == std::vector<Index>{1, 3});
    CHECK_THROWS_AS(fold_members(plan, 2), ValidationError);
}

TEST_CASE("partition, stratification and size balance over generated plans") {
    Xoshiro256 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const Index k = 2 + rng.below(9);
        const Index pos = k + rng.below(60);
        const Index neg = k + rng.below(200);
        const auto y = make_labels(pos, neg, rng);
        const auto plan = make_fold_plan(y, k, rng(), rng.below(1000));

        std::set<Index> seen;
        Index total = 0;
        Index smallest = y.size();
        Index largest = 0;
        for (Index f = 0; f < k; ++f) {
            const auto split = fold_members(plan, f);
            CHECK(std::is_sorted(split.validation.begin(), split.validation.end()));
            CHECK(std::is_sorted(split.train.begin(), split.train.end()));
            CHECK(split.validation.size() + split.train.size() == y.size());
            for (Index i : split.validation) {
                CHECK(seen.insert(i).second);
            }
            total += split.validation.size();
            smallest = std::min(smallest, split.validation.size());
            largest = std::max(largest, split.validation.size());
        }
        CHECK(total == y.size());
        CHECK(largest - smallest <= 2);
        const auto counts = class_fold_counts(plan, y);
        for (const auto& per_class : counts) {
            const auto [lo, hi] = std::minmax_element(per_class.begin(), per_class.end());
            CHECK(*hi - *lo <= 1);
        }
    }
}

TEST_CASE("consecutive repetitions differ") {
    Xoshiro256 rng(5);
    const auto y = make_labels(8, 12, rng);
    int identical = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto a = make_fold_plan(y, 5, seed, seed % 50);
        const auto b = make_fold_plan(y, 5, seed, seed % 50 + 1);
        identical += a.assignments == b.assignments ? 1 : 0;
    }
    CHECK(identical < 1);
}

TEST_CASE("round-robin start rotates with the repetition index") {
    // One member per class and fold: the dealt order starts at r mod K, so
    // the first shuffled member of each class lands in fold r mod K.
    const Labels y{0, 0, 0, 1, 1, 1};
    for (std::uint64_t r = 0; r < 6; ++r) {
        const auto plan = make_fold_plan(y, 3, 1, r);
        std::map<std::uint32_t, int> sizes;
        for (auto f : plan.assignments) {
            ++sizes[f];
        }
        CHECK(sizes.size() == 3);
        for (const auto& [fold, n] : sizes) {
            CHECK(n == 2);
        }
    }
}

TEST_CASE("fold preconditions") {
    CHECK_THROWS_AS(make_fold_plan(Labels{0, 1, 0, 1}, 1, 0, 0), ValidationError);
    try {
        make_fold_plan(Labels{0, 0, 0, 0, 0, 0, 1}, 5, 0, 0);
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("class with fewer than K members") != std::string::npos);
    }
}

TEST_CASE("plan dump lines") {
    const auto path = std::filesystem::temp_directory_path() / "sla_test_plan_dump.txt";
    std::filesystem::remove(path);
    append_plan_dump(path, FoldPlan{3, 2, {1, 0}});
    std::ifstream in(path);
    std::string a, b;
    std::getline(in, a);
    std::getline(in, b);
    CHECK(a == "3,0,1");
    CHECK(b == "3,1,0");
}
