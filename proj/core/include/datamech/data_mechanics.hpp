#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "datamech/conditional_entropy.hpp"
#include "datamech/hier_clustering.hpp"

namespace datamech {

/// Dense m x p matrix with unique labels on both axes.
class RectMatrix {
public:
    /// Throws ArgumentError on non-finite entries, duplicate labels or a size
    /// mismatch between labels and values.
    RectMatrix(std::vector<double> values, std::vector<std::string> row_labels,
               std::vector<std::string> col_labels);

    std::size_t row_count() const { return row_labels_.size(); }
    std::size_t col_count() const { return col_labels_.size(); }
    double at(std::size_t i, std::size_t j) const { return values_[i * col_count() + j]; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }

private:
    std::vector<double> values_; ///< row-major
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
};

enum class Axis { rows, cols };

struct DmConfig {
    /// One iteration = one row pass plus one column pass (steps 2-3).
    int iterations = 2;
    /// Cut levels; 0 selects max(2, round(sqrt(axis size))).
    int row_cut_k = 0;
    int col_cut_k = 0;
    /// Weight of the cluster-average coordinates in the augmented distance.
    double augment_weight = 1.0;
    Linkage linkage = Linkage::average;
    /// Scale each column to zero mean / unit variance before any distance is
    /// taken. Off for MCE-derived matrices (already in [0,1]); on for raw
    /// pitch-by-feature matrices, which mix mph, rpm and degrees.
    bool standardize_columns = false;
};

/// Coupled row/column trees with their cuts and the per-block means of the
/// input matrix.
struct CoupledTrees {
    Dendrogram row_tree;
    Dendrogram col_tree;
    ClusterCut row_cut;
    ClusterCut col_cut;
    std::vector<std::vector<double>> block_means; ///< row_cut.k x col_cut.k

    bool operator==(const CoupledTrees&) const = default;
};

/// Row-major upper-triangle (i < j) flattening of an MCE matrix; f features
/// give f(f-1)/2 coordinates.
std::vector<double> vectorize_upper_triangle(const MceMatrix& matrix);

/// Column labels matching vectorize_upper_triangle: "featA|featB".
std::vector<std::string> upper_triangle_pair_names(std::span<const std::string> feature_names);

/// Stacks pitcher-season MCE vectors into one rectangular matrix, one row per
/// (label, matrix) pair. Throws DataError if feature orders differ.
RectMatrix stack_pitcher_seasons(
    std::span<const std::pair<std::string, MceMatrix>> mce_list);

/// Distance between items on `axis`: Euclidean distance on their raw
/// coordinates plus `weight` times the Euclidean distance between their
/// vectors of per-cluster means under `other_axis_cut` (one coordinate per
/// opposite-axis cluster). weight 0 is the plain Euclidean matrix.
/// Throws ArgumentError if the cut does not cover the opposite axis.
DistanceMatrix augment_distance(const RectMatrix& matrix, Axis axis,
                                const ClusterCut& other_axis_cut, double weight);

/// Iterative coupled clustering: columns are first clustered with the plain
/// Euclidean distance, then each iteration rebuilds the row tree against the
/// current column cut and the column tree against the new row cut, both with
/// tree-augmented distances. Fully deterministic.
CoupledTrees dm_iterate(const RectMatrix& matrix, const DmConfig& config);

/// `{row_tree, col_tree, row_cut, col_cut, block_means}`
std::string to_json(const CoupledTrees& trees);
CoupledTrees coupled_trees_from_json(const std::string& text);

} // namespace datamech
