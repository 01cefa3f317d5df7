#include <doctest.h>

#include <algorithm>
#include <random>

#include "datamech/error.hpp"
#include "datamech/gapped_histogram.hpp"

#include "oracles.hpp"

using namespace datamech;
using testsupport::exhaustive_best_segmentation;

namespace {

std::vector<double> two_cluster_fixture() {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(0.1 * i);
    for (int i = 0; i < 10; ++i) v.push_back(10.0 + 0.1 * i);
    return v;
}

// Violations of the built segmentation, recounted independently of the library.
std::uint64_t recount_violations(const GappedHistogram& hist, std::vector<double> values,
                                 double gap_factor) {
    std::sort(values.begin(), values.end());
    std::vector<double> distinct;
    for (double v : values)
        if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
    std::uint64_t total = 0;
    for (const auto& bin : hist.bins()) {
        std::vector<double> spac;
        for (std::size_t t = 0; t + 1 < distinct.size(); ++t)
            if (distinct[t] >= bin.lo && distinct[t + 1] <= bin.hi)
                spac.push_back(distinct[t + 1] - distinct[t]);
        if (spac.empty()) continue;
        std::vector<double> sorted = spac;
        std::sort(sorted.begin(), sorted.end());
        std::size_t h = sorted.size() / 2;
        double med = sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
        for (double d : spac)
            if (d > gap_factor * med) ++total;
    }
    return total;
}

} // namespace

TEST_CASE("degenerate single-value input gives one exact bin") {
    std::vector<double> v(50, 3.0);
    auto hist = build_histogram(v);
    REQUIRE(hist.bin_count() == 1);
    CHECK(hist.bins()[0].lo == 3.0);
    CHECK(hist.bins()[0].hi == 3.0);
    CHECK(hist.bins()[0].count == 50);
    CHECK(hist.gaps().empty());
    CHECK(hist.total_count() == 50);
}

TEST_CASE("two separated clusters produce two bins and one gap") {
    auto hist = build_histogram(two_cluster_fixture());
    REQUIRE(hist.bin_count() == 2);
    REQUIRE(hist.gaps().size() == 1);
    CHECK(hist.gaps()[0].lo == doctest::Approx(0.9));
    CHECK(hist.gaps()[0].hi == doctest::Approx(10.0));
    CHECK(hist.bins()[0].count == 10);
    CHECK(hist.bins()[1].count == 10);

    // the optimum agrees with the exhaustive boundary search
    auto ref = exhaustive_best_segmentation(two_cluster_fixture(), 10,
                                            std::log(20.0) / 40.0, 4.0);
    CHECK(ref.bins == 2);
    double impl_obj = hist.fit_error() +
                      (std::log(20.0) / 40.0) * static_cast<double>(hist.bin_count());
    CHECK(impl_obj == doctest::Approx(ref.objective).epsilon(1e-9));
}

TEST_CASE("histogram is permutation invariant") {
    std::vector<double> sorted = two_cluster_fixture();
    std::vector<double> shuffled = sorted;
    std::mt19937 rng(5);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto a = build_histogram(sorted);
    auto b = build_histogram(shuffled);
    REQUIRE(a.bin_count() == b.bin_count());
    for (std::size_t i = 0; i < a.bin_count(); ++i) {
        CHECK(a.bins()[i].lo == b.bins()[i].lo);
        CHECK(a.bins()[i].hi == b.bins()[i].hi);
        CHECK(a.bins()[i].count == b.bins()[i].count);
    }
    CHECK(a.fit_error() == b.fit_error());
}

TEST_CASE("build rejects bad input") {
    CHECK_THROWS_AS(build_histogram(std::vector<double>{}), ArgumentError);
    CHECK_THROWS_AS(build_histogram(std::vector<double>{1.0, std::nan("")}), ArgumentError);
    CHECK_THROWS_AS(build_histogram(std::vector<double>{1.0}, {0, {}, 4.0}), ArgumentError);
    CHECK_THROWS_AS(build_histogram(std::vector<double>{1.0}, {4, {}, 1.0}), ArgumentError);
}

TEST_CASE("DP optimum matches the exhaustive oracle on small inputs") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    std::uniform_int_distribution<int> nsz(1, 30), nb(1, 4), grid(0, 8);
    for (int trial = 0; trial < 120; ++trial) {
        std::size_t n = static_cast<std::size_t>(nsz(rng));
        std::vector<double> vals;
        bool gridded = trial % 2 == 0; // exercise ties
        for (std::size_t i = 0; i < n; ++i)
            vals.push_back(gridded ? 0.43 * grid(rng) : u(rng));
        int max_bins = nb(rng);
        const double penalty = 0.01;
        auto hist = build_histogram(vals, {max_bins, penalty, 4.0});
        auto ref = exhaustive_best_segmentation(vals, max_bins, penalty, 4.0);
        double impl_obj = hist.fit_error() + penalty * static_cast<double>(hist.bin_count());
        CAPTURE(trial);
        CHECK(recount_violations(hist, vals, 4.0) == ref.violations);
        CHECK(impl_obj == doctest::Approx(ref.objective).epsilon(1e-9));
    }
}

TEST_CASE("more allowed bins never increase the unpenalized fit error") {
    // gap_factor is huge so the gap rule stays out of the way and the nested
    // budgets compare pure fit errors
    std::mt19937 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> vals;
    for (int i = 0; i < 60; ++i) vals.push_back(g(rng));
    double prev = std::numeric_limits<double>::infinity();
    for (int budget = 1; budget <= 8; ++budget) {
        auto hist = build_histogram(vals, {budget, 0.0, 1e12});
        CHECK(hist.fit_error() <= prev + 1e-12);
        prev = hist.fit_error();
    }
}

TEST_CASE("categorize respects bin boundaries and the nearest-bin rule") {
    auto hist = build_histogram(two_cluster_fixture());
    REQUIRE(hist.bin_count() == 2);

    SUBCASE("value equal to a bin lo maps to that bin") {
        auto cats = categorize(hist, std::vector<double>{10.0});
        CHECK(cats[0] == 1);
    }
    SUBCASE("value in the gap maps to the nearest bin") {
        auto right = categorize(hist, std::vector<double>{9.8});
        CHECK(right[0] == 1);
        auto left = categorize(hist, std::vector<double>{1.3});
        CHECK(left[0] == 0);
    }
    SUBCASE("out-of-range values clamp to the end bins") {
        auto cats = categorize(hist, std::vector<double>{-5.0, 99.0});
        CHECK(cats[0] == 0);
        CHECK(cats[1] == 1);
    }
    SUBCASE("equidistant gap value prefers the lower bin") {
        auto cats = categorize(hist, std::vector<double>{(0.9 + 10.0) / 2.0});
        CHECK(cats[0] == 0);
    }
    SUBCASE("non-finite values are rejected") {
        CHECK_THROWS_AS(categorize(hist, std::vector<double>{std::nan("")}), ArgumentError);
    }
}

TEST_CASE("categorizing the training values reproduces the stored counts") {
    std::mt19937 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> vals;
    for (int i = 0; i < 200; ++i) vals.push_back(g(rng) * (i % 3 == 0 ? 0.2 : 1.0) + (i % 2) * 6.0);
    auto hist = build_histogram(vals);
    auto cats = categorize(hist, vals);
    std::vector<std::size_t> recount(hist.bin_count(), 0);
    for (int c : cats) ++recount[static_cast<std::size_t>(c)];
    for (std::size_t b = 0; b < hist.bin_count(); ++b) CHECK(recount[b] == hist.bins()[b].count);
}

TEST_CASE("partition, monotone assignment and gap soundness hold on random data") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> vals;
        std::size_t n = 40 + static_cast<std::size_t>(trial) * 7;
        for (std::size_t i = 0; i < n; ++i) {
            double base = u(rng);
            vals.push_back(base < 0.5 ? base : base + 4.0); // often gapped
        }
        auto hist = build_histogram(vals);

        std::size_t total = 0;
        for (const auto& b : hist.bins()) total += b.count;
        CHECK(total == n);

        auto cats = categorize(hist, vals);
        std::vector<std::pair<double, int>> pairs;
        for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(vals[i], cats[i]);
        std::sort(pairs.begin(), pairs.end());
        for (std::size_t i = 1; i < n; ++i) CHECK(pairs[i - 1].second <= pairs[i].second);

        for (const auto& gap : hist.gaps()) {
            CHECK(gap.lo < gap.hi);
            for (double v : vals) CHECK(!(v > gap.lo && v < gap.hi));
        }
    }
}

TEST_CASE("fit_quality") {
    SUBCASE("single value data fits exactly") {
        std::vector<double> v(9, 2.5);
        auto hist = build_histogram(v);
        CHECK(fit_quality(hist, v) == 0.0);
    }
    SUBCASE("exactly uniform data inside one bin deviates at most 1/n") {
        std::vector<double> v;
        for (int i = 0; i < 32; ++i) v.push_back(static_cast<double>(i));
        auto hist = build_histogram(v, {1, 0.0, 4.0});
        REQUIRE(hist.bin_count() == 1);
        CHECK(fit_quality(hist, v) <= 1.0 / 32.0 + 1e-12);
    }
    SUBCASE("a coarse fit scores worse than the chosen fit") {
        auto vals = two_cluster_fixture();
        auto chosen = build_histogram(vals);
        auto coarse = build_histogram(vals, {1, 0.0, 1e9});
        CHECK(fit_quality(chosen, vals) <= fit_quality(coarse, vals));
    }
}

TEST_CASE("histogram JSON round-trips") {
    auto hist = build_histogram(two_cluster_fixture());
    auto text = to_json(hist);
    auto back = histogram_from_json(text);
    REQUIRE(back.bin_count() == hist.bin_count());
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
        CHECK(back.bins()[i].lo == hist.bins()[i].lo);
        CHECK(back.bins()[i].hi == hist.bins()[i].hi);
        CHECK(back.bins()[i].count == hist.bins()[i].count);
    }
    REQUIRE(back.gaps().size() == hist.gaps().size());
    CHECK(back.fit_error() == hist.fit_error());
    CHECK_THROWS_AS(histogram_from_json("{"), ParseError);
}
