#include "datamech/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "datamech/error.hpp"

#include "svg_writer.hpp"
#include "text_util.hpp"

namespace datamech {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::string hex_color(int r, int g, int b) {
    static const char* digits = "0123456789abcdef";
    std::string out = "#";
    for (int v : {r, g, b}) {
        out.push_back(digits[(v >> 4) & 0xf]);
        out.push_back(digits[v & 0xf]);
    }
    return out;
}

// t in [0,1] -> blue..white..red; the red-minus-blue channel is strictly
// monotone in t, which keeps color order testable.
std::string ramp_color(double t, Colormap map) {
    t = std::clamp(t, 0.0, 1.0);
    if (map == Colormap::grayscale) {
        int v = static_cast<int>(std::lround(255.0 * t));
        return hex_color(v, v, v);
    }
    if (t < 0.5) {
        int v = static_cast<int>(std::lround(510.0 * t));
        return hex_color(v, v, 255);
    }
    int v = static_cast<int>(std::lround(510.0 * (1.0 - t)));
    return hex_color(255, v, v);
}

struct TreeGeometry {
    // x (along the leaf axis) and depth (distance from the leaf base line, in
    // pixels, growing away from the matrix) per dendrogram node.
    std::vector<double> x;
    std::vector<double> depth;
};

TreeGeometry tree_geometry(const Dendrogram& tree, double cell, double margin) {
    const std::size_t n = tree.leaf_count();
    TreeGeometry g;
    g.x.assign(2 * n - 1, 0.0);
    g.depth.assign(2 * n - 1, 0.0);
    const auto& order = tree.leaf_order();
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        g.x[static_cast<std::size_t>(order[pos])] = (static_cast<double>(pos) + 0.5) * cell;
    double max_h = 0.0;
    for (const auto& m : tree.merges()) max_h = std::max(max_h, m.height);
    double scale = max_h > 0.0 ? (margin - 6.0) / max_h : 0.0;
    for (std::size_t t = 0; t < tree.merges().size(); ++t) {
        const auto& m = tree.merges()[t];
        std::size_t id = n + t;
        g.x[id] = 0.5 * (g.x[static_cast<std::size_t>(m.left)] +
                         g.x[static_cast<std::size_t>(m.right)]);
        g.depth[id] = std::max(m.height, 0.0) * scale;
    }
    return g;
}

// Draws one bracket per merge. `horizontal` true for the top margin (columns).
void draw_tree(detail::SvgWriter& svg, const Dendrogram& tree, double cell, double margin,
               double offset_along, double base, bool horizontal) {
    TreeGeometry g = tree_geometry(tree, cell, margin);
    for (std::size_t t = 0; t < tree.merges().size(); ++t) {
        const auto& m = tree.merges()[t];
        std::size_t id = tree.leaf_count() + t;
        auto a = static_cast<std::size_t>(m.left);
        auto b = static_cast<std::size_t>(m.right);
        std::string d;
        if (horizontal) {
            d = "M " + detail::format_fixed3(offset_along + g.x[a]) + " " +
                detail::format_fixed3(base - g.depth[a]) + " L " +
                detail::format_fixed3(offset_along + g.x[a]) + " " +
                detail::format_fixed3(base - g.depth[id]) + " L " +
                detail::format_fixed3(offset_along + g.x[b]) + " " +
                detail::format_fixed3(base - g.depth[id]) + " L " +
                detail::format_fixed3(offset_along + g.x[b]) + " " +
                detail::format_fixed3(base - g.depth[b]);
        } else {
            d = "M " + detail::format_fixed3(base - g.depth[a]) + " " +
                detail::format_fixed3(offset_along + g.x[a]) + " L " +
                detail::format_fixed3(base - g.depth[id]) + " " +
                detail::format_fixed3(offset_along + g.x[a]) + " L " +
                detail::format_fixed3(base - g.depth[id]) + " " +
                detail::format_fixed3(offset_along + g.x[b]) + " L " +
                detail::format_fixed3(base - g.depth[b]) + " " +
                detail::format_fixed3(offset_along + g.x[b]);
        }
        svg.path(d, "#444444", 1.0, "merge");
    }
}

std::vector<int> display_order(const std::optional<Dendrogram>& tree, std::size_t n) {
    if (tree) return tree->leaf_order();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    return order;
}

} // namespace

HeatmapSpec HeatmapSpec::from(const MceMatrix& matrix, std::optional<Dendrogram> tree) {
    HeatmapSpec spec;
    spec.values.reserve(matrix.size() * matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t j = 0; j < matrix.size(); ++j) spec.values.push_back(matrix.at(i, j));
    spec.row_labels = matrix.feature_names();
    spec.col_labels = matrix.feature_names();
    spec.row_tree = tree;
    spec.col_tree = std::move(tree);
    return spec;
}

HeatmapSpec HeatmapSpec::from(const RectMatrix& matrix, const CoupledTrees& trees) {
    HeatmapSpec spec;
    spec.values = matrix.values();
    spec.row_labels = matrix.row_labels();
    spec.col_labels = matrix.col_labels();
    spec.row_tree = trees.row_tree;
    spec.col_tree = trees.col_tree;
    spec.row_cut = trees.row_cut;
    spec.col_cut = trees.col_cut;
    return spec;
}

void render_heatmap(const HeatmapSpec& spec, const std::filesystem::path& path) {
    const std::size_t rows = spec.row_labels.size();
    const std::size_t cols = spec.col_labels.size();
    if (rows == 0 || cols == 0) throw ArgumentError("render_heatmap: empty matrix");
    if (spec.values.size() != rows * cols)
        throw ArgumentError("render_heatmap: values do not match labels");
    if (spec.row_tree && spec.row_tree->leaf_count() != rows)
        throw ArgumentError("render_heatmap: row tree does not match row count");
    if (spec.col_tree && spec.col_tree->leaf_count() != cols)
        throw ArgumentError("render_heatmap: column tree does not match column count");

    const double cell = 14.0;
    const double tree_margin = 72.0;
    const double left = spec.row_tree ? tree_margin : 8.0;
    const double title_h = spec.title.empty() ? 0.0 : 18.0;
    const double top = (spec.col_tree ? tree_margin : 8.0) + title_h;
    const bool draw_labels = rows <= 120 && cols <= 120;
    const double label_w = draw_labels ? 110.0 : 8.0;
    const double width = left + static_cast<double>(cols) * cell + label_w;
    const double height = top + static_cast<double>(rows) * cell + label_w;

    auto row_order = display_order(spec.row_tree, rows);
    auto col_order = display_order(spec.col_tree, cols);

    double vmin = spec.values[0], vmax = spec.values[0];
    for (double v : spec.values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    double span = vmax > vmin ? vmax - vmin : 1.0;

    detail::SvgWriter svg(width, height);
    if (!spec.title.empty()) svg.text(left, 12.0, spec.title, 11.0);

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double v = spec.values[static_cast<std::size_t>(row_order[r]) * cols +
                                   static_cast<std::size_t>(col_order[c])];
            svg.rect(left + static_cast<double>(c) * cell, top + static_cast<double>(r) * cell,
                     cell, cell, ramp_color((v - vmin) / span, spec.colormap), "cell");
        }
    }

    if (spec.col_tree) draw_tree(svg, *spec.col_tree, cell, tree_margin, left, top - 1.0, true);
    if (spec.row_tree) draw_tree(svg, *spec.row_tree, cell, tree_margin, top, left - 1.0, false);

    // Cluster boundaries along the permuted axes.
    if (spec.row_cut && spec.row_cut->labels.size() == rows) {
        for (std::size_t r = 0; r + 1 < rows; ++r) {
            if (spec.row_cut->labels[static_cast<std::size_t>(row_order[r])] !=
                spec.row_cut->labels[static_cast<std::size_t>(row_order[r + 1])]) {
                double y = top + static_cast<double>(r + 1) * cell;
                svg.line(left, y, left + static_cast<double>(cols) * cell, y, "#000000", 1.5,
                         "boundary");
            }
        }
    }
    if (spec.col_cut && spec.col_cut->labels.size() == cols) {
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            if (spec.col_cut->labels[static_cast<std::size_t>(col_order[c])] !=
                spec.col_cut->labels[static_cast<std::size_t>(col_order[c + 1])]) {
                double x = left + static_cast<double>(c + 1) * cell;
                svg.line(x, top, x, top + static_cast<double>(rows) * cell, "#000000", 1.5,
                         "boundary");
            }
        }
    }

    if (draw_labels) {
        for (std::size_t r = 0; r < rows; ++r)
            svg.text(left + static_cast<double>(cols) * cell + 4.0,
                     top + (static_cast<double>(r) + 0.7) * cell,
                     spec.row_labels[static_cast<std::size_t>(row_order[r])], 8.0, "#000000",
                     "start", "row-label");
        for (std::size_t c = 0; c < cols; ++c) {
            double x = left + (static_cast<double>(c) + 0.7) * cell;
            double y = top + static_cast<double>(rows) * cell + 4.0;
            svg.text(x, y, spec.col_labels[static_cast<std::size_t>(col_order[c])], 8.0,
                     "#000000", "start", "col-label",
                     "rotate(90 " + detail::format_fixed3(x) + " " + detail::format_fixed3(y) +
                         ")");
        }
    }

    write_file(path, svg.finish());
}

void render_likelihood_plot(std::span<const LikelihoodSeries> series,
                            const std::filesystem::path& path) {
    const double panel_w = 640.0, panel_h = 110.0, left = 48.0, gap = 26.0, top_pad = 10.0;
    const std::size_t panels = std::max<std::size_t>(series.size(), 1);
    const double width = left + panel_w + 16.0;
    const double height = top_pad + static_cast<double>(panels) * (panel_h + gap);

    std::uint64_t tmin = 0, tmax = 1;
    bool any = false;
    for (const auto& s : series)
        for (const auto& p : s.points) {
            if (!any) {
                tmin = tmax = p.temporal_index;
                any = true;
            } else {
                tmin = std::min(tmin, p.temporal_index);
                tmax = std::max(tmax, p.temporal_index);
            }
        }
    double tspan = tmax > tmin ? static_cast<double>(tmax - tmin) : 1.0;

    static const char* subtype_palette[] = {"#c0392b", "#d98e04", "#7d9029", "#1a7a4a",
                                            "#2471a3", "#6c3483", "#a04000", "#5d6d7e"};

    detail::SvgWriter svg(width, height);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& one = series[s];
        double y0 = top_pad + static_cast<double>(s) * (panel_h + gap); // panel top
        double y1 = y0 + panel_h;                                       // baseline
        svg.line(left, y0, left, y1, "#000000", 1.0, "axis");
        svg.line(left, y1, left + panel_w, y1, "#000000", 1.0, "axis");
        for (double tick : {0.0, 0.5, 1.0}) {
            double y = y1 - tick * panel_h;
            svg.line(left - 3.0, y, left, y, "#000000", 1.0);
            svg.text(left - 6.0, y + 2.5, detail::format_fixed3(tick).substr(0, 3), 7.0,
                     "#000000", "end");
        }
        svg.text(left, y0 - 3.0,
                 one.pitch_type + (one.pitcher_id.empty() ? "" : " (" + one.pitcher_id + ")"),
                 9.0, "#000000", "start", "panel-label");

        auto x_of = [&](std::uint64_t t) {
            return left + (static_cast<double>(t - tmin) / tspan) * panel_w;
        };
        for (std::size_t i = 0; i + 1 < one.points.size(); ++i) {
            if (one.points[i].season != one.points[i + 1].season) {
                double x = 0.5 * (x_of(one.points[i].temporal_index) +
                                  x_of(one.points[i + 1].temporal_index));
                svg.line(x, y0, x, y1, "#999999", 0.8, "season");
            }
        }
        for (const auto& p : one.points) {
            double y = y1 - std::clamp(p.likelihood, 0.0, 1.0) * panel_h;
            svg.text(x_of(p.temporal_index), y, std::to_string(p.subtype + 1), 7.0,
                     subtype_palette[static_cast<std::size_t>(p.subtype) % 8], "middle", "pt");
        }
    }
    write_file(path, svg.finish());
}

void export_scatter3p2(const PitchDataset& dataset, int focus_season,
                       const std::set<int>& baseline_seasons,
                       const std::filesystem::path& path) {
    static const char* coord_features[] = {"start_speed", "pfx_z", "break_angle"};
    std::size_t coord_idx[3];
    for (int i = 0; i < 3; ++i) {
        auto idx = dataset.schema().index_of(coord_features[i]);
        if (!idx)
            throw SchemaError(std::string("export_scatter3p2: schema lacks '") +
                              coord_features[i] + "'");
        coord_idx[static_cast<std::size_t>(i)] = *idx;
    }
    auto size_idx = dataset.schema().index_of("spin_rate");
    if (!size_idx) throw SchemaError("export_scatter3p2: schema lacks 'spin_rate'");

    auto color_of = [&](const PitchRecord& r) -> std::string {
        if (r.season != focus_season) return "gray";
        if (r.pitch_type == "FF") return "red";
        if (r.pitch_type == "FT") return "orange";
        if (r.pitch_type == "SL") return "green";
        if (r.pitch_type == "CU") return "blue";
        return "purple";
    };

    nlohmann::ordered_json j;
    j["pitches"] = nlohmann::ordered_json::array();
    for (const auto& r : dataset.records()) {
        bool selected = r.season == focus_season || baseline_seasons.count(r.season);
        if (!selected) continue;
        double s = r.values[coord_idx[0]];
        double pz = r.values[coord_idx[1]];
        double ba = r.values[coord_idx[2]];
        double size = r.values[*size_idx];
        if (!std::isfinite(s) || !std::isfinite(pz) || !std::isfinite(ba) ||
            !std::isfinite(size))
            continue;
        j["pitches"].push_back({{"t", r.temporal_index},
                                {"coords", {s, pz, ba}},
                                {"size", size},
                                {"color", color_of(r)},
                                {"season", r.season},
                                {"pitch_type", r.pitch_type}});
    }
    write_file(path, j.dump(2) + "\n");
}

BlockTemplate default_universality_template() {
    BlockTemplate t;
    t.large_block = {"start_speed", "end_speed", "vy0",     "pfx_z",    "az",       "break_length",
                     "break_angle", "pfx_x",     "ax",      "spin_dir", "spin_rate"};
    t.groups = {{"start_speed", "end_speed", "vy0"},
                {"pfx_z", "az", "break_length"},
                {"break_angle", "pfx_x", "ax", "spin_dir"},
                {"spin_rate"}};
    return t;
}

UniversalityReport universality_report(const MceMatrix& matrix, const Dendrogram& tree,
                                       const BlockTemplate& expected) {
    const auto& labels = tree.leaf_labels();
    if (matrix.feature_names() != labels)
        throw ArgumentError("universality_report: tree and matrix feature orders differ");
    auto index_of = [&](const std::string& name) {
        auto it = std::find(labels.begin(), labels.end(), name);
        if (it == labels.end())
            throw ArgumentError("universality_report: template feature '" + name +
                                "' not in the tree");
        return static_cast<int>(it - labels.begin());
    };

    // Leaf sets of every subtree (leaves first, then one per merge).
    const std::size_t n = labels.size();
    std::vector<std::vector<int>> subtree(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) subtree[i] = {static_cast<int>(i)};
    for (std::size_t t = 0; t < tree.merges().size(); ++t) {
        const auto& m = tree.merges()[t];
        auto merged = subtree[static_cast<std::size_t>(m.left)];
        const auto& rhs = subtree[static_cast<std::size_t>(m.right)];
        merged.insert(merged.end(), rhs.begin(), rhs.end());
        std::sort(merged.begin(), merged.end());
        subtree[n + t] = std::move(merged);
    }

    auto best_match = [&](const std::vector<std::string>& group) {
        std::vector<int> want;
        want.reserve(group.size());
        for (const auto& name : group) want.push_back(index_of(name));
        std::sort(want.begin(), want.end());
        double best = 0.0;
        std::size_t arg = 0;
        for (std::size_t s = 0; s < subtree.size(); ++s) {
            std::vector<int> inter;
            std::set_intersection(subtree[s].begin(), subtree[s].end(), want.begin(), want.end(),
                                  std::back_inserter(inter));
            double uni = static_cast<double>(subtree[s].size() + want.size() - inter.size());
            double jaccard = static_cast<double>(inter.size()) / uni;
            if (jaccard > best) {
                best = jaccard;
                arg = s;
            }
        }
        return std::pair<double, std::size_t>{best, arg};
    };
    auto names_of = [&](const std::vector<int>& idx) {
        std::vector<std::string> out;
        out.reserve(idx.size());
        for (int i : idx) out.push_back(labels[static_cast<std::size_t>(i)]);
        return out;
    };

    UniversalityReport report;
    double weighted = 0.0, weight_total = 0.0;

    auto [large_score, large_arg] = best_match(expected.large_block);
    report.large_block = names_of(subtree[large_arg]);
    weighted += large_score * static_cast<double>(expected.large_block.size());
    weight_total += static_cast<double>(expected.large_block.size());

    std::vector<bool> taken(n, false);
    for (const auto& group : expected.groups) {
        auto [score, arg] = best_match(group);
        weighted += score * static_cast<double>(group.size());
        weight_total += static_cast<double>(group.size());
        std::vector<int> block;
        for (int i : subtree[arg])
            if (!taken[static_cast<std::size_t>(i)]) {
                taken[static_cast<std::size_t>(i)] = true;
                block.push_back(i);
            }
        report.sub_blocks.push_back(names_of(block));
    }
    std::vector<int> leftovers;
    for (std::size_t i = 0; i < n; ++i)
        if (!taken[i]) leftovers.push_back(static_cast<int>(i));
    if (!leftovers.empty()) report.sub_blocks.push_back(names_of(leftovers));

    report.match_score = weight_total > 0.0 ? weighted / weight_total : 0.0;
    return report;
}

std::string to_json(const UniversalityReport& report) {
    nlohmann::ordered_json j;
    j["large_block"] = report.large_block;
    j["sub_blocks"] = report.sub_blocks;
    j["match_score"] = report.match_score;
    return j.dump(2) + "\n";
}

} // namespace datamech
