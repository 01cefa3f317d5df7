#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "datamech/data_mechanics.hpp"
#include "datamech/dataset.hpp"
#include "datamech/hier_clustering.hpp"
#include "datamech/subtype_evolution.hpp"

namespace datamech {

/// Diverging blue-low / red-high ramp by default; any monotone ramp keeps cell
/// color order monotone in cell value.
enum class Colormap { blue_red, grayscale };

/// A matrix to draw, with optional margin dendrograms whose leaf orders
/// permute the corresponding axis, and optional cuts drawn as cluster
/// boundary lines.
struct HeatmapSpec {
    std::vector<double> values; ///< row-major, row_count x col_count
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::optional<Dendrogram> row_tree;
    std::optional<Dendrogram> col_tree;
    std::optional<ClusterCut> row_cut;
    std::optional<ClusterCut> col_cut;
    Colormap colormap = Colormap::blue_red;
    std::string title;

    static HeatmapSpec from(const MceMatrix& matrix, std::optional<Dendrogram> tree = {});
    static HeatmapSpec from(const RectMatrix& matrix, const CoupledTrees& trees);
};

/// Writes a standalone SVG 1.1 heatmap: cells permuted by the margin trees'
/// leaf orders, dendrograms drawn on the top/left margins, one <rect
/// class="cell"> per matrix entry and one <path class="merge"> per tree merge.
/// Output bytes are deterministic for identical input (coordinates rounded to
/// three decimals).
void render_heatmap(const HeatmapSpec& spec, const std::filesystem::path& path);

/// Likelihood plot: one panel per series, x = temporal index, y = likelihood,
/// each pitch drawn as a <text class="pt"> glyph carrying its 1-based subtype
/// id, with vertical rules at season changes. Deterministic bytes.
void render_likelihood_plot(std::span<const LikelihoodSeries> series,
                            const std::filesystem::path& path);

/// 3(+2)D point-cloud export: coords = (start_speed, pfx_z, break_angle),
/// size = spin_rate, color by pitch type for the focus season (FF red,
/// FT orange, SL green, CU blue, anything else purple) and gray for baseline
/// seasons. Pitches outside the selected seasons, or with a non-finite value
/// in the four features, are skipped. Throws SchemaError if a feature is
/// missing. JSON: {pitches:[{t, coords:[s,pz,ba], size, color, season,
/// pitch_type}]}.
void export_scatter3p2(const PitchDataset& dataset, int focus_season,
                       const std::set<int>& baseline_seasons,
                       const std::filesystem::path& path);

/// Expected block composition of an MCE matrix: one large block plus the
/// synergistic groups inside it.
struct BlockTemplate {
    std::vector<std::string> large_block;
    std::vector<std::vector<std::string>> groups;
};

/// The block composition recurring on real pitcher-season MCE matrices: an
/// 11-feature large block containing {start_speed, end_speed, vy0},
/// {pfx_z, az, break_length}, {break_angle, pfx_x, ax, spin_dir} and
/// {spin_rate}.
BlockTemplate default_universality_template();

struct UniversalityReport {
    std::vector<std::string> large_block;             ///< best-matching subtree
    std::vector<std::vector<std::string>> sub_blocks; ///< matched groups, then leftovers
    double match_score = 0.0;                         ///< in [0, 1]
};

/// Scores how well the dendrogram realizes the template: every expected group
/// (the large block and each sub-group) is matched to the subtree with the
/// highest Jaccard overlap, and match_score is the size-weighted mean of those
/// overlaps. Report-only; no threshold is enforced here. Throws ArgumentError
/// if the template names features absent from the tree.
UniversalityReport universality_report(const MceMatrix& matrix, const Dendrogram& tree,
                                       const BlockTemplate& expected);

std::string to_json(const UniversalityReport& report);

} // namespace datamech
