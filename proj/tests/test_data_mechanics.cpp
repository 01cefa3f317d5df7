#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "datamech/data_mechanics.hpp"
#include "datamech/error.hpp"

#include "generators.hpp"
#include "oracles.hpp"

using namespace datamech;
using testsupport::adjusted_rand_index;
using testsupport::planted_block_matrix;

namespace {

MceMatrix random_mce(std::size_t f, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> entries(f * f, 0.0);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < f; ++i) names.push_back("feat" + std::to_string(i));
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j) {
            double v = u(rng);
            entries[i * f + j] = v;
            entries[j * f + i] = v;
        }
    return MceMatrix(std::move(names), std::move(entries));
}

} // namespace

TEST_CASE("upper-triangle vectorization sizes") {
    std::mt19937 rng(1);
    CHECK(vectorize_upper_triangle(random_mce(21, rng)).size() == 210);
    CHECK(vectorize_upper_triangle(random_mce(11, rng)).size() == 55);
    auto two = random_mce(2, rng);
    auto v = vectorize_upper_triangle(two);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == two.at(0, 1));
}

TEST_CASE("vectorization is row-major over the upper triangle") {
    std::mt19937 rng(2);
    auto m = random_mce(4, rng);
    auto v = vectorize_upper_triangle(m);
    CHECK(v == std::vector<double>{m.at(0, 1), m.at(0, 2), m.at(0, 3), m.at(1, 2), m.at(1, 3),
                                   m.at(2, 3)});
    auto names = upper_triangle_pair_names(m.feature_names());
    REQUIRE(names.size() == 6);
    CHECK(names[0] == "feat0|feat1");
    CHECK(names[5] == "feat2|feat3");
}

TEST_CASE("stack_pitcher_seasons builds one row per matrix") {
    std::mt19937 rng(3);
    std::vector<std::pair<std::string, MceMatrix>> list;
    for (int i = 0; i < 108; ++i)
        list.emplace_back("pitcher-" + std::to_string(2010 + i), random_mce(21, rng));
    auto stacked = stack_pitcher_seasons(list);
    CHECK(stacked.row_count() == 108);
    CHECK(stacked.col_count() == 210);

    // row i reproduces the vectorization of matrix i
    auto v17 = vectorize_upper_triangle(list[17].second);
    for (std::size_t c = 0; c < 210; ++c) CHECK(stacked.at(17, c) == v17[c]);

    auto single = stack_pitcher_seasons(std::vector{list.front()});
    CHECK(single.row_count() == 1);

    // mismatched feature order is rejected
    auto other = random_mce(20, rng);
    std::vector<std::pair<std::string, MceMatrix>> bad{list.front(), {"x", other}};
    CHECK_THROWS_AS(stack_pitcher_seasons(bad), DataError);
}

TEST_CASE("augment_distance with weight zero is the plain Euclidean matrix") {
    auto planted = planted_block_matrix(8, 6, 2, 2, {0.0, 1.0, 1.0, 0.0}, 0.1, 5);
    ClusterCut cut{2, std::vector<int>(6, 0)};
    for (std::size_t c = 0; c < 6; ++c) cut.labels[c] = static_cast<int>(c % 2);

    auto plain = augment_distance(planted.matrix, Axis::rows, cut, 0.0);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double expect = 0.0;
            for (std::size_t c = 0; c < 6; ++c) {
                double diff = planted.matrix.at(i, c) - planted.matrix.at(j, c);
                expect += diff * diff;
            }
            CHECK(plain.at(i, j) == doctest::Approx(std::sqrt(expect)).epsilon(1e-12));
        }
}

TEST_CASE("singleton opposite clusters scale distances by one plus weight") {
    auto planted = planted_block_matrix(7, 5, 2, 2, {0.0, 1.0, 1.0, 0.0}, 0.2, 6);
    ClusterCut singleton{5, {0, 1, 2, 3, 4}};
    auto plain = augment_distance(planted.matrix, Axis::rows, singleton, 0.0);
    for (double w : {0.5, 1.0, 2.0}) {
        auto aug = augment_distance(planted.matrix, Axis::rows, singleton, w);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j)
                CHECK(aug.at(i, j) == doctest::Approx((1.0 + w) * plain.at(i, j)).epsilon(1e-12));

        // positive scaling preserves the merge order, so trees and cuts agree
        auto plain_tree = agglomerate(plain);
        auto aug_tree = agglomerate(aug);
        REQUIRE(plain_tree.merges().size() == aug_tree.merges().size());
        for (std::size_t t = 0; t < plain_tree.merges().size(); ++t) {
            CHECK(plain_tree.merges()[t].left == aug_tree.merges()[t].left);
            CHECK(plain_tree.merges()[t].right == aug_tree.merges()[t].right);
        }
        CHECK(cut(plain_tree, 2) == cut(aug_tree, 2));
    }
}

TEST_CASE("augmented distances match a direct recomputation on a fixed 4x4 fixture") {
    // two planted column clusters: {c0, c1} and {c2, c3}
    RectMatrix m({1.0, 2.0, 10.0, 11.0,
                  1.5, 2.5, 10.5, 11.5,
                  5.0, 6.0, -1.0, 0.0,
                  5.5, 6.5, -0.5, 0.5},
                 {"r0", "r1", "r2", "r3"}, {"c0", "c1", "c2", "c3"});
    ClusterCut col_cut{2, {0, 0, 1, 1}};
    const double w = 1.0;
    auto aug = augment_distance(m, Axis::rows, col_cut, w);

    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            double raw = 0.0;
            for (std::size_t c = 0; c < 4; ++c) {
                double diff = m.at(i, c) - m.at(j, c);
                raw += diff * diff;
            }
            double mi0 = (m.at(i, 0) + m.at(i, 1)) / 2.0, mi1 = (m.at(i, 2) + m.at(i, 3)) / 2.0;
            double mj0 = (m.at(j, 0) + m.at(j, 1)) / 2.0, mj1 = (m.at(j, 2) + m.at(j, 3)) / 2.0;
            double extra = (mi0 - mj0) * (mi0 - mj0) + (mi1 - mj1) * (mi1 - mj1);
            double expect = std::sqrt(raw) + w * std::sqrt(extra);
            CHECK(aug.at(i, j) == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    ClusterCut wrong{2, {0, 1}};
    CHECK_THROWS_AS(augment_distance(m, Axis::rows, wrong, 1.0), ArgumentError);
}

TEST_CASE("decoupled dm_iterate equals independent per-axis clustering") {
    auto planted = planted_block_matrix(12, 9, 3, 3,
                                        {0.0, 0.5, 1.0, 0.5, 1.0, 0.0, 1.0, 0.0, 0.5}, 0.05, 7);
    DmConfig config;
    config.iterations = 1;
    config.augment_weight = 0.0;
    config.row_cut_k = 3;
    config.col_cut_k = 3;
    auto coupled = dm_iterate(planted.matrix, config);

    ClusterCut all_cols{static_cast<int>(planted.matrix.col_count()), {}};
    all_cols.labels.resize(planted.matrix.col_count());
    for (std::size_t c = 0; c < planted.matrix.col_count(); ++c)
        all_cols.labels[c] = static_cast<int>(c);
    auto row_dist = augment_distance(planted.matrix, Axis::rows, all_cols, 0.0);
    auto col_dist = augment_distance(planted.matrix, Axis::cols,
                                     ClusterCut{static_cast<int>(planted.matrix.row_count()),
                                                [&] {
                                                    std::vector<int> l;
                                                    for (std::size_t r = 0;
                                                         r < planted.matrix.row_count(); ++r)
                                                        l.push_back(static_cast<int>(r));
                                                    return l;
                                                }()},
                                     0.0);
    CHECK(coupled.row_tree == agglomerate(row_dist, config.linkage));
    CHECK(coupled.col_tree == agglomerate(col_dist, config.linkage));
}

TEST_CASE("dm_iterate recovers planted blocks") {
    auto planted = planted_block_matrix(30, 30, 3, 3,
                                        {0.0, 0.5, 1.0, 0.5, 1.0, 0.0, 1.0, 0.0, 0.5}, 0.05,
                                        2024);
    DmConfig config;
    config.row_cut_k = 3;
    config.col_cut_k = 3;
    auto trees = dm_iterate(planted.matrix, config);
    CHECK(adjusted_rand_index(trees.row_cut.labels, planted.row_labels) >= 0.9);
    CHECK(adjusted_rand_index(trees.col_cut.labels, planted.col_labels) >= 0.9);

    // every block mean sits near one of the planted means
    for (const auto& row : trees.block_means)
        for (double v : row) {
            double nearest = std::min({std::abs(v - 0.0), std::abs(v - 0.5), std::abs(v - 1.0)});
            CHECK(nearest <= 0.05);
        }
}

TEST_CASE("dm_iterate is deterministic across thread budgets") {
    auto planted = planted_block_matrix(20, 15, 3, 3,
                                        {0.0, 0.5, 1.0, 0.5, 1.0, 0.0, 1.0, 0.0, 0.5}, 0.05, 99);
    DmConfig config;
    config.row_cut_k = 3;
    config.col_cut_k = 3;

    setenv("DATAMECH_THREADS", "1", 1);
    auto serial = dm_iterate(planted.matrix, config);
    setenv("DATAMECH_THREADS", "4", 1);
    auto parallel = dm_iterate(planted.matrix, config);
    unsetenv("DATAMECH_THREADS");
    CHECK(serial == parallel);

    auto again = dm_iterate(planted.matrix, config);
    CHECK(again == serial);
}

TEST_CASE("block means average the input matrix per block") {
    RectMatrix m({0.0, 0.0, 1.0,
                  0.0, 0.0, 1.0,
                  4.0, 4.0, 9.0},
                 {"r0", "r1", "r2"}, {"c0", "c1", "c2"});
    DmConfig config;
    config.row_cut_k = 2;
    config.col_cut_k = 2;
    auto trees = dm_iterate(m, config);
    // blocks: rows {r0,r1} vs {r2}; cols {c0,c1} vs {c2}
    CHECK(trees.block_means[0][0] == doctest::Approx(0.0));
    CHECK(trees.block_means[0][1] == doctest::Approx(1.0));
    CHECK(trees.block_means[1][0] == doctest::Approx(4.0));
    CHECK(trees.block_means[1][1] == doctest::Approx(9.0));
}

TEST_CASE("standardization only affects distances, not reported means") {
    auto planted = planted_block_matrix(10, 6, 2, 2, {0.0, 5.0, 5.0, 0.0}, 0.01, 4);
    DmConfig config;
    config.row_cut_k = 2;
    config.col_cut_k = 2;
    config.standardize_columns = true;
    auto trees = dm_iterate(planted.matrix, config);
    double lo = 1e9, hi = -1e9;
    for (const auto& row : trees.block_means)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    CHECK(lo == doctest::Approx(0.0).epsilon(0.05));
    CHECK(hi == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("dm_iterate input validation") {
    RectMatrix tiny({1.0, 2.0, 3.0, 4.0}, {"a", "b"}, {"c", "d"});
    DmConfig bad;
    bad.iterations = 0;
    CHECK_THROWS_AS(dm_iterate(tiny, bad), ArgumentError);
    DmConfig toodeep;
    toodeep.row_cut_k = 5;
    CHECK_THROWS_AS(dm_iterate(tiny, toodeep), ArgumentError);
    CHECK_THROWS_AS(RectMatrix({1.0, std::nan("")}, {"a"}, {"b", "c"}), ArgumentError);
    CHECK_THROWS_AS(RectMatrix({1.0, 1.0}, {"a", "a"}, {"b"}), ArgumentError);
}

TEST_CASE("coupled trees JSON round-trips") {
    auto planted = planted_block_matrix(8, 6, 2, 2, {0.0, 1.0, 1.0, 0.0}, 0.05, 13);
    DmConfig config;
    config.row_cut_k = 2;
    config.col_cut_k = 2;
    auto trees = dm_iterate(planted.matrix, config);
    auto back = coupled_trees_from_json(to_json(trees));
    CHECK(back == trees);
    CHECK_THROWS_AS(coupled_trees_from_json("{}"), ParseError);
}
