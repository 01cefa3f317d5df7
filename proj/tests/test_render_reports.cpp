#include <doctest.h>

#include <regex>
#include <set>

#include "datamech/conditional_entropy.hpp"
#include "datamech/error.hpp"
#include "datamech/render.hpp"

#include "generators.hpp"
#include "test_util.hpp"

using namespace datamech;
using testsupport::count_occurrences;
using testsupport::read_text;
using testsupport::TempDir;

namespace {

MceMatrix grid_mce(std::size_t f, double lo = 0.1, double hi = 0.9) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < f; ++i) names.push_back("g" + std::to_string(i));
    std::vector<double> entries(f * f, 0.0);
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j) {
            double t = static_cast<double>(i * f + j) / static_cast<double>(f * f);
            double v = lo + (hi - lo) * t;
            entries[i * f + j] = v;
            entries[j * f + i] = v;
        }
    return MceMatrix(std::move(names), std::move(entries));
}

Dendrogram tree_of(const MceMatrix& m) {
    std::vector<double> d;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) d.push_back(m.at(i, j));
    return agglomerate(DistanceMatrix(std::move(d), m.feature_names()));
}

// An MCE matrix whose block structure exactly realizes the template: tiny
// distances inside groups, medium between groups of the large block, large
// to everything outside.
MceMatrix engineered_universality_mce() {
    auto tmpl = default_universality_template();
    std::vector<std::string> names = FeatureSchema::default21().names();
    auto group_of = [&](const std::string& n) -> int {
        for (std::size_t g = 0; g < tmpl.groups.size(); ++g)
            for (const auto& f : tmpl.groups[g])
                if (f == n) return static_cast<int>(g);
        return -1;
    };
    std::size_t f = names.size();
    std::vector<double> entries(f * f, 0.0);
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j) {
            int gi = group_of(names[i]);
            int gj = group_of(names[j]);
            double v;
            if (gi >= 0 && gi == gj) v = 0.05;
            else if (gi >= 0 && gj >= 0) v = 0.4;
            else v = 0.95;
            entries[i * f + j] = v;
            entries[j * f + i] = v;
        }
    return MceMatrix(names, std::move(entries));
}

std::vector<std::string> extract_cell_fills(const std::string& svg) {
    std::vector<std::string> fills;
    std::regex cell_re("<rect class=\"cell\"[^>]*fill=\"(#[0-9a-f]{6})\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell_re);
         it != std::sregex_iterator(); ++it)
        fills.push_back((*it)[1]);
    return fills;
}

} // namespace

TEST_CASE("2x2 heatmap renders four cells with two colors") {
    TempDir tmp;
    HeatmapSpec spec;
    spec.values = {0.0, 1.0, 1.0, 0.0};
    spec.row_labels = {"a", "b"};
    spec.col_labels = {"x", "y"};
    auto path = tmp / "tiny.svg";
    render_heatmap(spec, path);
    auto svg = read_text(path);
    CHECK(testsupport::well_formed_xml(svg));
    auto fills = extract_cell_fills(svg);
    REQUIRE(fills.size() == 4);
    CHECK(fills[0] == fills[3]);
    CHECK(fills[1] == fills[2]);
    CHECK(fills[0] != fills[1]);
}

TEST_CASE("rendering is byte-deterministic") {
    TempDir tmp;
    auto mce = grid_mce(9);
    auto tree = tree_of(mce);
    auto spec = HeatmapSpec::from(mce, tree);
    render_heatmap(spec, tmp / "one.svg");
    render_heatmap(spec, tmp / "two.svg");
    CHECK(read_text(tmp / "one.svg") == read_text(tmp / "two.svg"));
}

TEST_CASE("21x21 heatmap carries 441 cells and 20 merges per margin tree") {
    TempDir tmp;
    auto mce = grid_mce(21);
    auto tree = tree_of(mce);
    auto spec = HeatmapSpec::from(mce, tree);
    render_heatmap(spec, tmp / "mce.svg");
    auto svg = read_text(tmp / "mce.svg");
    CHECK(testsupport::well_formed_xml(svg));
    CHECK(count_occurrences(svg, "class=\"cell\"") == 441);
    CHECK(count_occurrences(svg, "class=\"merge\"") == 40); // 20 per margin
}

TEST_CASE("heatmap cell colors are monotone in cell value") {
    TempDir tmp;
    HeatmapSpec spec;
    spec.values = {0.0, 0.25, 0.5, 0.75, 1.0, 0.1, 0.2, 0.3, 0.9};
    spec.row_labels = {"r0", "r1", "r2"};
    spec.col_labels = {"c0", "c1", "c2"};
    render_heatmap(spec, tmp / "m.svg");
    auto fills = extract_cell_fills(read_text(tmp / "m.svg"));
    REQUIRE(fills.size() == 9);
    auto red_minus_blue = [](const std::string& hex) {
        int r = std::stoi(hex.substr(1, 2), nullptr, 16);
        int b = std::stoi(hex.substr(5, 2), nullptr, 16);
        return r - b;
    };
    for (std::size_t i = 0; i + 1 < 9; ++i) {
        bool value_le = spec.values[i] <= spec.values[i + 1];
        bool channel_le = red_minus_blue(fills[i]) <= red_minus_blue(fills[i + 1]);
        CHECK(value_le == channel_le);
    }
}

TEST_CASE("cluster cuts draw boundary lines along both axes") {
    TempDir tmp;
    // two clear row blocks and two clear column blocks
    std::vector<double> values = {0.0, 0.1, 1.0, 1.1,
                                  0.1, 0.0, 1.1, 1.0,
                                  1.0, 1.1, 0.0, 0.1,
                                  1.1, 1.0, 0.1, 0.0};
    datamech::RectMatrix m(values, {"r0", "r1", "r2", "r3"}, {"c0", "c1", "c2", "c3"});
    datamech::DmConfig config;
    config.row_cut_k = 2;
    config.col_cut_k = 2;
    auto trees = dm_iterate(m, config);
    auto spec = HeatmapSpec::from(m, trees);
    render_heatmap(spec, tmp / "blocks.svg");
    auto svg = read_text(tmp / "blocks.svg");
    CHECK(count_occurrences(svg, "class=\"boundary\"") == 2); // one per axis
}

TEST_CASE("heatmap validates its spec") {
    HeatmapSpec spec;
    spec.values = {1.0};
    spec.row_labels = {"a"};
    spec.col_labels = {"x", "y"};
    TempDir tmp;
    CHECK_THROWS_AS(render_heatmap(spec, tmp / "bad.svg"), ArgumentError);
}

TEST_CASE("likelihood plot draws one glyph per point") {
    TempDir tmp;
    LikelihoodSeries ff;
    ff.pitcher_id = "kershaw";
    ff.pitch_type = "FF";
    for (int i = 0; i < 25; ++i)
        ff.points.push_back({static_cast<std::uint64_t>(i), 2012 + i / 9, i % 6,
                             0.1 + 0.1 * static_cast<double>(i % 6)});
    LikelihoodSeries cu;
    cu.pitcher_id = "kershaw";
    cu.pitch_type = "CU";
    for (int i = 0; i < 10; ++i)
        cu.points.push_back({static_cast<std::uint64_t>(30 + i), 2013, 2, 0.4});

    std::vector<LikelihoodSeries> series{ff, cu};
    render_likelihood_plot(series, tmp / "lik.svg");
    auto svg = read_text(tmp / "lik.svg");
    CHECK(testsupport::well_formed_xml(svg));
    CHECK(count_occurrences(svg, "class=\"pt\"") == 35);
    CHECK(count_occurrences(svg, "class=\"panel-label\"") == 2);
    CHECK(count_occurrences(svg, "class=\"season\"") >= 2); // 2012->2013->2014 in FF

    render_likelihood_plot(series, tmp / "lik2.svg");
    CHECK(read_text(tmp / "lik2.svg") == svg);
}

TEST_CASE("empty series render axes only") {
    TempDir tmp;
    LikelihoodSeries empty;
    empty.pitch_type = "SL";
    std::vector<LikelihoodSeries> series{empty};
    render_likelihood_plot(series, tmp / "empty.svg");
    auto svg = read_text(tmp / "empty.svg");
    CHECK(testsupport::well_formed_xml(svg));
    CHECK(count_occurrences(svg, "class=\"pt\"") == 0);
    CHECK(count_occurrences(svg, "class=\"axis\"") == 2);
}

TEST_CASE("single-subtype series form one horizontal band") {
    TempDir tmp;
    LikelihoodSeries one;
    one.pitch_type = "FF";
    for (int i = 0; i < 12; ++i)
        one.points.push_back({static_cast<std::uint64_t>(i), 2015, 3, 0.25});
    std::vector<LikelihoodSeries> series{one};
    render_likelihood_plot(series, tmp / "band.svg");
    auto svg = read_text(tmp / "band.svg");
    std::regex pt_re("<text class=\"pt\" x=\"[0-9.]+\" y=\"([0-9.]+)\"");
    std::set<std::string> ys;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), pt_re);
         it != std::sregex_iterator(); ++it)
        ys.insert((*it)[1]);
    CHECK(ys.size() == 1);
}

TEST_CASE("scatter export colors and counts") {
    using testsupport::dataset_from_columns;
    auto schema = FeatureSchema::default21();
    std::vector<PitchRecord> records;
    auto add = [&](int season, const std::string& type) {
        PitchRecord r;
        r.pitcher_id = "kershaw";
        r.season = season;
        r.game_date = std::to_string(season) + "-06-01";
        r.temporal_index = records.size();
        r.pitch_type = type;
        r.values.assign(21, 1.5);
        auto set = [&](const char* name, double v) {
            r.values[*schema.index_of(name)] = v;
        };
        set("start_speed", 93.5);
        set("pfx_z", 8.25);
        set("break_angle", 21.0);
        set("spin_rate", 2200.0);
        records.push_back(r);
    };
    SUBCASE("all-baseline datasets are all gray") {
        for (int i = 0; i < 5; ++i) add(2012, "FF");
        PitchDataset ds(schema, records);
        TempDir tmp;
        export_scatter3p2(ds, 2013, {2012}, tmp / "s.json");
        auto text = read_text(tmp / "s.json");
        CHECK(count_occurrences(text, "\"color\": \"gray\"") == 5);
    }
    SUBCASE("focus pitches take the pitch-type palette and copy coordinates") {
        add(2013, "FF");
        add(2013, "FT");
        add(2013, "SL");
        add(2013, "CU");
        add(2013, "CH");
        add(2012, "FF");
        PitchDataset ds(schema, records);
        TempDir tmp;
        export_scatter3p2(ds, 2013, {2012}, tmp / "s.json");
        auto text = read_text(tmp / "s.json");
        CHECK(count_occurrences(text, "\"color\": \"red\"") == 1);
        CHECK(count_occurrences(text, "\"color\": \"orange\"") == 1);
        CHECK(count_occurrences(text, "\"color\": \"green\"") == 1);
        CHECK(count_occurrences(text, "\"color\": \"blue\"") == 1);
        CHECK(count_occurrences(text, "\"color\": \"purple\"") == 1);
        CHECK(count_occurrences(text, "\"color\": \"gray\"") == 1);
        CHECK(count_occurrences(text, "\"pitch_type\"") == 6); // one record per pitch
        CHECK(text.find("93.5") != std::string::npos);
        CHECK(text.find("8.25") != std::string::npos);
        CHECK((text.find("21.0") != std::string::npos || text.find("21,") != std::string::npos));
    }
    SUBCASE("out-of-range seasons are excluded") {
        add(2010, "FF");
        add(2013, "FF");
        PitchDataset ds(schema, records);
        TempDir tmp;
        export_scatter3p2(ds, 2013, {2012}, tmp / "s.json");
        CHECK(count_occurrences(read_text(tmp / "s.json"), "\"season\"") == 1);
    }
    SUBCASE("missing features raise SchemaError") {
        PitchDataset ds(testsupport::tiny_schema(2), {});
        TempDir tmp;
        CHECK_THROWS_AS(export_scatter3p2(ds, 2013, {}, tmp / "s.json"), SchemaError);
    }
}

TEST_CASE("universality report scores an engineered matrix perfectly") {
    auto mce = engineered_universality_mce();
    auto tree = tree_of(mce);
    auto report = universality_report(mce, tree, default_universality_template());
    CHECK(report.match_score == doctest::Approx(1.0));
    CHECK(report.large_block.size() == 11);

    // sub_blocks partition the full feature set
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& block : report.sub_blocks) {
        total += block.size();
        for (const auto& f : block) seen.insert(f);
    }
    CHECK(total == 21);
    CHECK(seen.size() == 21);
}

TEST_CASE("universality report on an arbitrary matrix stays in range") {
    auto mce = grid_mce(21);
    auto tree = tree_of(mce);
    // rename grid features to the template names so the template applies
    auto names = FeatureSchema::default21().names();
    std::vector<double> entries;
    for (std::size_t i = 0; i < mce.size(); ++i)
        for (std::size_t j = 0; j < mce.size(); ++j) entries.push_back(mce.at(i, j));
    MceMatrix renamed(names, std::move(entries));
    auto report = universality_report(renamed, tree_of(renamed),
                                      default_universality_template());
    CHECK(report.match_score >= 0.0);
    CHECK(report.match_score <= 1.0);
}

TEST_CASE("universality report rejects unknown template features") {
    auto mce = grid_mce(5);
    auto tree = tree_of(mce);
    BlockTemplate bad;
    bad.large_block = {"does_not_exist"};
    CHECK_THROWS_AS(universality_report(mce, tree, bad), ArgumentError);
}
