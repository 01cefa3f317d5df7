#include "datamech/hier_clustering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

#include "datamech/error.hpp"

namespace datamech {

DistanceMatrix::DistanceMatrix(std::vector<double> entries, std::vector<std::string> item_labels)
    : entries_(std::move(entries)), labels_(std::move(item_labels)) {
    std::size_t n = labels_.size();
    if (entries_.size() != n * n) throw ArgumentError("distance matrix: entry count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (entries_[i * n + i] != 0.0)
            throw ArgumentError("distance matrix: nonzero diagonal at " + labels_[i]);
        for (std::size_t j = 0; j < i; ++j) {
            double d = entries_[i * n + j];
            if (std::isnan(d)) throw ArgumentError("distance matrix: NaN entry");
            if (d < 0.0) throw ArgumentError("distance matrix: negative entry");
            if (d != entries_[j * n + i]) throw ArgumentError("distance matrix: asymmetric");
        }
    }
}

Linkage linkage_from_string(const std::string& name) {
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "average") return Linkage::average;
    if (name == "ward") return Linkage::ward;
    throw ArgumentError("unknown linkage '" + name + "'");
}

std::string to_string(Linkage linkage) {
    switch (linkage) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
    case Linkage::ward: return "ward";
    }
    return "average";
}

namespace {

// Planar order: left child first; `left` is fixed at merge time to the subtree
// holding the smaller minimum original index.
std::vector<int> compute_leaf_order(const std::vector<DendrogramMerge>& merges,
                                    std::size_t n_leaves) {
    if (n_leaves == 0) return {};
    std::vector<int> order;
    order.reserve(n_leaves);
    if (merges.empty()) {
        for (std::size_t i = 0; i < n_leaves; ++i) order.push_back(static_cast<int>(i));
        return order;
    }
    int root = static_cast<int>(n_leaves + merges.size() - 1);
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int node = stack.back();
        stack.pop_back();
        if (node < static_cast<int>(n_leaves)) {
            order.push_back(node);
            continue;
        }
        const auto& m = merges[static_cast<std::size_t>(node) - n_leaves];
        stack.push_back(m.right); // popped after left
        stack.push_back(m.left);
    }
    return order;
}

} // namespace

Dendrogram::Dendrogram(std::vector<DendrogramMerge> merges, std::vector<std::string> leaf_labels)
    : merges_(std::move(merges)), leaf_labels_(std::move(leaf_labels)) {
    std::size_t n = leaf_labels_.size();
    if (n == 0) throw ArgumentError("dendrogram: no leaves");
    if (merges_.size() + 1 != n) throw ArgumentError("dendrogram: need exactly n-1 merges");
    int max_id = static_cast<int>(n + merges_.size());
    for (std::size_t t = 0; t < merges_.size(); ++t) {
        const auto& m = merges_[t];
        int limit = static_cast<int>(n + t);
        if (m.left < 0 || m.right < 0 || m.left >= limit || m.right >= limit || m.left == m.right)
            throw ArgumentError("dendrogram: merge references invalid node id");
        (void)max_id;
    }
    leaf_order_ = compute_leaf_order(merges_, n);
}

Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage) {
    const std::size_t n = dist.size();
    if (n < 2) throw ArgumentError("agglomerate: need at least 2 items");

    const bool squared = linkage == Linkage::ward;
    // Working dissimilarities between active slots, on the linkage's internal
    // scale (squared for ward).
    std::vector<double> work(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double d = dist.at(i, j);
            work[i * n + j] = squared ? d * d : d;
        }

    std::vector<bool> active(n, true);
    std::vector<int> label(n);       // minimum original leaf index in the cluster
    std::vector<int> node_id(n);     // dendrogram node id of the cluster at this slot
    std::vector<double> size(n, 1.0);
    std::vector<int> min_leaf(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        label[i] = static_cast<int>(i);
        node_id[i] = static_cast<int>(i);
        min_leaf[i] = static_cast<int>(i);
    }

    struct Candidate {
        double d = std::numeric_limits<double>::infinity();
        int lo = 0, hi = 0; // ordered labels, tie-break key
        std::size_t other = 0;
        bool valid = false;

        bool better_than(const Candidate& rhs) const {
            if (!rhs.valid) return valid;
            if (!valid) return false;
            if (d != rhs.d) return d < rhs.d;
            if (lo != rhs.lo) return lo < rhs.lo;
            return hi < rhs.hi;
        }
    };
    auto make_candidate = [&](std::size_t i, std::size_t j) {
        Candidate c;
        c.d = work[i * n + j];
        c.lo = std::min(label[i], label[j]);
        c.hi = std::max(label[i], label[j]);
        c.other = j;
        c.valid = true;
        return c;
    };
    // nearest[i]: best partner for slot i among active slots
    std::vector<Candidate> nearest(n);
    auto rescan_row = [&](std::size_t i) {
        Candidate best;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !active[j]) continue;
            Candidate c = make_candidate(i, j);
            if (c.better_than(best)) best = c;
        }
        nearest[i] = best;
    };
    for (std::size_t i = 0; i < n; ++i) rescan_row(i);

    std::vector<DendrogramMerge> merges;
    merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        // global best pair, normalized to (a = smaller label side)
        std::size_t a = 0;
        Candidate best;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i] || !nearest[i].valid) continue;
            if (nearest[i].better_than(best)) {
                best = nearest[i];
                a = i;
            }
        }
        std::size_t b = best.other;
        if (label[b] < label[a]) std::swap(a, b);

        double height = squared ? std::sqrt(std::max(best.d, 0.0)) : best.d;
        int new_id = static_cast<int>(n + step);
        int left_node = min_leaf[node_id[a]] < min_leaf[node_id[b]] ? node_id[a] : node_id[b];
        int right_node = left_node == node_id[a] ? node_id[b] : node_id[a];
        merges.push_back({left_node, right_node, height});
        min_leaf[new_id] = std::min(min_leaf[node_id[a]], min_leaf[node_id[b]]);

        // Lance-Williams update of distances to the merged cluster, kept in slot a.
        double ni = size[a], nj = size[b], dij = work[a * n + b];
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == a || k == b) continue;
            double dki = work[k * n + a];
            double dkj = work[k * n + b];
            double merged = 0.0;
            switch (linkage) {
            case Linkage::single: merged = std::min(dki, dkj); break;
            case Linkage::complete: merged = std::max(dki, dkj); break;
            case Linkage::average: merged = (ni * dki + nj * dkj) / (ni + nj); break;
            case Linkage::ward: {
                double nk = size[k];
                merged = ((nk + ni) * dki + (nk + nj) * dkj - nk * dij) / (nk + ni + nj);
                break;
            }
            }
            work[k * n + a] = merged;
            work[a * n + k] = merged;
        }

        active[b] = false;
        size[a] = ni + nj;
        node_id[a] = new_id;
        label[a] = std::min(label[a], label[b]); // == label[a] after the swap above

        // Refresh caches: rows pointing at a stale slot rescan; others only
        // compare against the merged cluster.
        rescan_row(a);
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == a) continue;
            if (nearest[k].other == a || nearest[k].other == b) {
                rescan_row(k);
            } else {
                Candidate c = make_candidate(k, a);
                if (c.better_than(nearest[k])) nearest[k] = c;
            }
        }
    }

    return Dendrogram(std::move(merges), dist.item_labels());
}

ClusterCut cut(const Dendrogram& dendrogram, int k) {
    const int n = static_cast<int>(dendrogram.leaf_count());
    if (k < 1 || k > n)
        throw ArgumentError("cut: k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");

    // Union-find over the first n-k merges; the k-1 highest merges are dropped.
    std::vector<int> root(static_cast<std::size_t>(2 * n - 1));
    for (std::size_t i = 0; i < root.size(); ++i) root[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (root[x] != x) {
            root[x] = root[root[x]];
            x = root[x];
        }
        return x;
    };
    const auto& merges = dendrogram.merges();
    for (int t = 0; t < n - k; ++t) {
        int target = n + t;
        root[find(merges[static_cast<std::size_t>(t)].left)] = target;
        root[find(merges[static_cast<std::size_t>(t)].right)] = target;
    }

    ClusterCut result;
    result.k = k;
    result.labels.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> id_of_root;
    for (int leaf : dendrogram.leaf_order()) {
        int r = find(leaf);
        auto it = std::find(id_of_root.begin(), id_of_root.end(), r);
        int id;
        if (it == id_of_root.end()) {
            id = static_cast<int>(id_of_root.size());
            id_of_root.push_back(r);
        } else {
            id = static_cast<int>(it - id_of_root.begin());
        }
        result.labels[static_cast<std::size_t>(leaf)] = id;
    }
    return result;
}

std::vector<int> leaf_ordering(const Dendrogram& dendrogram) { return dendrogram.leaf_order(); }

std::string to_json(const Dendrogram& dendrogram) {
    nlohmann::ordered_json j;
    j["merges"] = nlohmann::ordered_json::array();
    for (const auto& m : dendrogram.merges())
        j["merges"].push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}});
    j["leaf_order"] = dendrogram.leaf_order();
    j["leaf_labels"] = dendrogram.leaf_labels();
    return j.dump(2) + "\n";
}

Dendrogram dendrogram_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        std::vector<DendrogramMerge> merges;
        for (const auto& m : j.at("merges"))
            merges.push_back({m.at("left").get<int>(), m.at("right").get<int>(),
                              m.at("height").get<double>()});
        auto labels = j.at("leaf_labels").get<std::vector<std::string>>();
        return Dendrogram(std::move(merges), std::move(labels));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad dendrogram JSON: ") + e.what());
    }
}

} // namespace datamech
