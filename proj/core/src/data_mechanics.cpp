#include "datamech/data_mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "datamech/error.hpp"
#include "datamech/parallel.hpp"

namespace datamech {

RectMatrix::RectMatrix(std::vector<double> values, std::vector<std::string> row_labels,
                       std::vector<std::string> col_labels)
    : values_(std::move(values)), row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)) {
    if (values_.size() != row_labels_.size() * col_labels_.size())
        throw ArgumentError("rect matrix: value count does not match labels");
    for (double v : values_)
        if (!std::isfinite(v)) throw ArgumentError("rect matrix: non-finite entry");
    for (const auto* labels : {&row_labels_, &col_labels_}) {
        std::unordered_set<std::string> seen;
        for (const auto& l : *labels)
            if (!seen.insert(l).second)
                throw ArgumentError("rect matrix: duplicate label '" + l + "'");
    }
}

std::vector<double> vectorize_upper_triangle(const MceMatrix& matrix) {
    const std::size_t f = matrix.size();
    if (f < 2) throw ArgumentError("vectorize_upper_triangle: need at least 2 features");
    std::vector<double> out;
    out.reserve(f * (f - 1) / 2);
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j) out.push_back(matrix.at(i, j));
    return out;
}

std::vector<std::string> upper_triangle_pair_names(std::span<const std::string> feature_names) {
    std::vector<std::string> out;
    out.reserve(feature_names.size() * (feature_names.size() - 1) / 2);
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        for (std::size_t j = i + 1; j < feature_names.size(); ++j)
            out.push_back(feature_names[i] + "|" + feature_names[j]);
    return out;
}

RectMatrix stack_pitcher_seasons(
    std::span<const std::pair<std::string, MceMatrix>> mce_list) {
    if (mce_list.empty()) throw ArgumentError("stack_pitcher_seasons: empty input");
    const auto& reference = mce_list.front().second.feature_names();
    std::vector<double> values;
    std::vector<std::string> row_labels;
    for (const auto& [label, matrix] : mce_list) {
        if (matrix.feature_names() != reference)
            throw DataError("stack_pitcher_seasons: '" + label +
                            "' has a different feature order");
        auto v = vectorize_upper_triangle(matrix);
        values.insert(values.end(), v.begin(), v.end());
        row_labels.push_back(label);
    }
    return RectMatrix(std::move(values), std::move(row_labels),
                      upper_triangle_pair_names(reference));
}

namespace {

// Item vectors along one axis, materialized row-major as items x coords.
std::vector<double> axis_vectors(const RectMatrix& m, Axis axis) {
    std::size_t items = axis == Axis::rows ? m.row_count() : m.col_count();
    std::size_t coords = axis == Axis::rows ? m.col_count() : m.row_count();
    std::vector<double> out(items * coords);
    for (std::size_t i = 0; i < items; ++i)
        for (std::size_t c = 0; c < coords; ++c)
            out[i * coords + c] = axis == Axis::rows ? m.at(i, c) : m.at(c, i);
    return out;
}

const std::vector<std::string>& axis_labels(const RectMatrix& m, Axis axis) {
    return axis == Axis::rows ? m.row_labels() : m.col_labels();
}

DistanceMatrix euclidean_with_extras(const std::vector<double>& raw, std::size_t items,
                                     std::size_t coords, const std::vector<double>& extras,
                                     std::size_t extra_coords, double weight,
                                     std::vector<std::string> labels) {
    std::vector<double> entries(items * items, 0.0);
    std::vector<std::size_t> pairs;
    for (std::size_t i = 0; i < items; ++i)
        for (std::size_t j = i + 1; j < items; ++j) pairs.push_back(i * items + j);
    parallel_for(pairs.size(), [&](std::size_t p) {
        std::size_t i = pairs[p] / items;
        std::size_t j = pairs[p] % items;
        double ss = 0.0;
        for (std::size_t c = 0; c < coords; ++c) {
            double diff = raw[i * coords + c] - raw[j * coords + c];
            ss += diff * diff;
        }
        double d = std::sqrt(ss);
        if (weight > 0.0 && extra_coords > 0) {
            double es = 0.0;
            for (std::size_t c = 0; c < extra_coords; ++c) {
                double diff = extras[i * extra_coords + c] - extras[j * extra_coords + c];
                es += diff * diff;
            }
            d += weight * std::sqrt(es);
        }
        entries[i * items + j] = d;
        entries[j * items + i] = d;
    });
    return DistanceMatrix(std::move(entries), std::move(labels));
}

// Per-cluster means of each item's coordinates under the opposite-axis cut.
std::vector<double> cluster_mean_coords(const std::vector<double>& raw, std::size_t items,
                                        std::size_t coords, const ClusterCut& cut) {
    auto k = static_cast<std::size_t>(cut.k);
    std::vector<double> means(items * k, 0.0);
    std::vector<double> counts(k, 0.0);
    for (std::size_t c = 0; c < coords; ++c) counts[static_cast<std::size_t>(cut.labels[c])] += 1.0;
    for (std::size_t i = 0; i < items; ++i) {
        for (std::size_t c = 0; c < coords; ++c)
            means[i * k + static_cast<std::size_t>(cut.labels[c])] += raw[i * coords + c];
        for (std::size_t g = 0; g < k; ++g)
            if (counts[g] > 0.0) means[i * k + g] /= counts[g];
    }
    return means;
}

std::vector<double> standardized_values(const RectMatrix& m) {
    std::size_t rows = m.row_count(), cols = m.col_count();
    std::vector<double> out(rows * cols);
    for (std::size_t c = 0; c < cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < rows; ++r) mean += m.at(r, c);
        mean /= static_cast<double>(rows);
        double var = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            double d = m.at(r, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(rows);
        double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
        for (std::size_t r = 0; r < rows; ++r) out[r * cols + c] = (m.at(r, c) - mean) * scale;
    }
    return out;
}

int auto_cut_k(std::size_t axis_size) {
    auto k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(axis_size))));
    k = std::max(2, k);
    return std::min(k, static_cast<int>(axis_size));
}

} // namespace

DistanceMatrix augment_distance(const RectMatrix& matrix, Axis axis,
                                const ClusterCut& other_axis_cut, double weight) {
    if (weight < 0.0) throw ArgumentError("augment_distance: negative weight");
    std::size_t items = axis == Axis::rows ? matrix.row_count() : matrix.col_count();
    std::size_t coords = axis == Axis::rows ? matrix.col_count() : matrix.row_count();
    if (other_axis_cut.labels.size() != coords)
        throw ArgumentError("augment_distance: cut covers " +
                            std::to_string(other_axis_cut.labels.size()) +
                            " items, opposite axis has " + std::to_string(coords));
    auto raw = axis_vectors(matrix, axis);
    auto extras = cluster_mean_coords(raw, items, coords, other_axis_cut);
    return euclidean_with_extras(raw, items, coords, extras,
                                 static_cast<std::size_t>(other_axis_cut.k), weight,
                                 axis_labels(matrix, axis));
}

CoupledTrees dm_iterate(const RectMatrix& matrix, const DmConfig& config) {
    if (matrix.row_count() < 2 || matrix.col_count() < 2)
        throw ArgumentError("dm_iterate: need at least a 2x2 matrix");
    if (config.iterations < 1) throw ArgumentError("dm_iterate: iterations must be >= 1");
    int row_k = config.row_cut_k > 0 ? config.row_cut_k : auto_cut_k(matrix.row_count());
    int col_k = config.col_cut_k > 0 ? config.col_cut_k : auto_cut_k(matrix.col_count());
    if (row_k > static_cast<int>(matrix.row_count()) ||
        col_k > static_cast<int>(matrix.col_count()))
        throw ArgumentError("dm_iterate: cut level exceeds axis size");

    RectMatrix working = config.standardize_columns
                             ? RectMatrix(standardized_values(matrix), matrix.row_labels(),
                                          matrix.col_labels())
                             : matrix;

    // Step 1: columns by plain Euclidean distance.
    auto col_raw = axis_vectors(working, Axis::cols);
    Dendrogram col_tree = agglomerate(
        euclidean_with_extras(col_raw, working.col_count(), working.row_count(), {}, 0, 0.0,
                              working.col_labels()),
        config.linkage);
    ClusterCut col_cut = cut(col_tree, col_k);

    // Steps 2-3, repeated: rows against the column cut, then columns against
    // the new row cut.
    Dendrogram row_tree = col_tree; // placeholder until the first row pass
    ClusterCut row_cut;
    for (int it = 0; it < config.iterations; ++it) {
        row_tree = agglomerate(
            augment_distance(working, Axis::rows, col_cut, config.augment_weight),
            config.linkage);
        row_cut = cut(row_tree, row_k);
        col_tree = agglomerate(
            augment_distance(working, Axis::cols, row_cut, config.augment_weight),
            config.linkage);
        col_cut = cut(col_tree, col_k);
    }

    // Block means are reported on the input values, not the standardized copy.
    std::vector<std::vector<double>> means(static_cast<std::size_t>(row_k),
                                           std::vector<double>(static_cast<std::size_t>(col_k),
                                                               0.0));
    std::vector<std::vector<double>> counts(static_cast<std::size_t>(row_k),
                                            std::vector<double>(static_cast<std::size_t>(col_k),
                                                                0.0));
    for (std::size_t r = 0; r < matrix.row_count(); ++r) {
        auto br = static_cast<std::size_t>(row_cut.labels[r]);
        for (std::size_t c = 0; c < matrix.col_count(); ++c) {
            auto bc = static_cast<std::size_t>(col_cut.labels[c]);
            means[br][bc] += matrix.at(r, c);
            counts[br][bc] += 1.0;
        }
    }
    for (std::size_t i = 0; i < means.size(); ++i)
        for (std::size_t j = 0; j < means[i].size(); ++j)
            if (counts[i][j] > 0.0) means[i][j] /= counts[i][j];

    return CoupledTrees{std::move(row_tree), std::move(col_tree), std::move(row_cut),
                        std::move(col_cut), std::move(means)};
}

namespace {

nlohmann::ordered_json dendrogram_to_ojson(const Dendrogram& d) {
    nlohmann::ordered_json j;
    j["merges"] = nlohmann::ordered_json::array();
    for (const auto& m : d.merges())
        j["merges"].push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}});
    j["leaf_order"] = d.leaf_order();
    j["leaf_labels"] = d.leaf_labels();
    return j;
}

Dendrogram dendrogram_from_ojson(const nlohmann::json& j) {
    std::vector<DendrogramMerge> merges;
    for (const auto& m : j.at("merges"))
        merges.push_back(
            {m.at("left").get<int>(), m.at("right").get<int>(), m.at("height").get<double>()});
    return Dendrogram(std::move(merges), j.at("leaf_labels").get<std::vector<std::string>>());
}

nlohmann::ordered_json cut_to_ojson(const ClusterCut& c) {
    return {{"k", c.k}, {"labels", c.labels}};
}

ClusterCut cut_from_ojson(const nlohmann::json& j) {
    return ClusterCut{j.at("k").get<int>(), j.at("labels").get<std::vector<int>>()};
}

} // namespace

std::string to_json(const CoupledTrees& trees) {
    nlohmann::ordered_json j;
    j["row_tree"] = dendrogram_to_ojson(trees.row_tree);
    j["col_tree"] = dendrogram_to_ojson(trees.col_tree);
    j["row_cut"] = cut_to_ojson(trees.row_cut);
    j["col_cut"] = cut_to_ojson(trees.col_cut);
    j["block_means"] = trees.block_means;
    return j.dump(2) + "\n";
}

CoupledTrees coupled_trees_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        return CoupledTrees{dendrogram_from_ojson(j.at("row_tree")),
                            dendrogram_from_ojson(j.at("col_tree")),
                            cut_from_ojson(j.at("row_cut")), cut_from_ojson(j.at("col_cut")),
                            j.at("block_means").get<std::vector<std::vector<double>>>()};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad coupled-trees JSON: ") + e.what());
    }
}

} // namespace datamech
