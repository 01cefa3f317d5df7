#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace datamech {

/// Symmetric non-negative dissimilarity matrix with zero diagonal. The triangle
/// inequality is not assumed; MCE matrices need not satisfy it.
class DistanceMatrix {
public:
    /// `entries` is row-major n*n. Throws ArgumentError on NaN, asymmetry,
    /// negative entries or a nonzero diagonal.
    DistanceMatrix(std::vector<double> entries, std::vector<std::string> item_labels);

    std::size_t size() const { return labels_.size(); }
    double at(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
    const std::vector<std::string>& item_labels() const { return labels_; }
    const std::vector<double>& entries() const { return entries_; }

private:
    std::vector<double> entries_;
    std::vector<std::string> labels_;
};

enum class Linkage { single, complete, average, ward };

Linkage linkage_from_string(const std::string& name);
std::string to_string(Linkage linkage);

/// One agglomerative merge. Node ids follow the usual convention: 0..n-1 are
/// leaves, n+t is the cluster created by merge t. `left` always carries the
/// smaller minimum original leaf index.
struct DendrogramMerge {
    int left = 0;
    int right = 0;
    double height = 0.0;

    bool operator==(const DendrogramMerge&) const = default;
};

/// Agglomerative merge tree plus the deterministic planar leaf order used for
/// heatmap display.
class Dendrogram {
public:
    /// Empty placeholder; every accessor returns empty collections.
    Dendrogram() = default;

    Dendrogram(std::vector<DendrogramMerge> merges, std::vector<std::string> leaf_labels);

    std::size_t leaf_count() const { return leaf_labels_.size(); }
    const std::vector<DendrogramMerge>& merges() const { return merges_; }
    const std::vector<std::string>& leaf_labels() const { return leaf_labels_; }
    /// Left-to-right leaf permutation: at each internal node the subtree holding
    /// the smaller minimum original index goes left.
    const std::vector<int>& leaf_order() const { return leaf_order_; }

    bool operator==(const Dendrogram&) const = default;

private:
    std::vector<DendrogramMerge> merges_;
    std::vector<std::string> leaf_labels_;
    std::vector<int> leaf_order_;
};

/// Exactly k non-empty clusters from cutting a dendrogram. Cluster ids are
/// assigned by order of first appearance along the leaf order, so id 0 is the
/// leftmost block of the corresponding heatmap.
struct ClusterCut {
    int k = 0;
    std::vector<int> labels; ///< per original item, in [0, k)

    bool operator==(const ClusterCut&) const = default;
};

/// Standard agglomerative clustering (Lance-Williams updates). Ties in the
/// minimal distance are broken by the lexicographically smallest pair of
/// cluster labels, a cluster's label being its minimum original index, so the
/// merge sequence is deterministic. Ward follows the squared-distance
/// convention: updates are applied to squared dissimilarities and heights
/// reported on the original scale.
Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage = Linkage::average);

/// Removes the k-1 last (highest) merges; connected components become clusters.
/// Throws ArgumentError unless 1 <= k <= n.
ClusterCut cut(const Dendrogram& dendrogram, int k);

/// The dendrogram's planar leaf order (same permutation as leaf_order()).
std::vector<int> leaf_ordering(const Dendrogram& dendrogram);

/// `{merges:[{left,right,height}], leaf_order:[...], leaf_labels:[...]}`
std::string to_json(const Dendrogram& dendrogram);
Dendrogram dendrogram_from_json(const std::string& text);

} // namespace datamech
