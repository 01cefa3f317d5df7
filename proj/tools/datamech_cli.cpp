// datamech: pitch-mechanics pattern extraction pipeline.
//
//   datamech <ingest|mce|dm|subtypes|report> [--config FILE] [--out DIR] ...
//
// Every command writes its outputs plus a run.manifest.json into --out.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "datamech/conditional_entropy.hpp"
#include "datamech/data_mechanics.hpp"
#include "datamech/dataset.hpp"
#include "datamech/error.hpp"
#include "datamech/gapped_histogram.hpp"
#include "datamech/hier_clustering.hpp"
#include "datamech/ingest.hpp"
#include "datamech/render.hpp"
#include "datamech/subtype_evolution.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- manifest

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

struct Manifest {
    std::string command;
    ordered_json config;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    void write(const fs::path& out_dir) {
        ordered_json j;
        j["command"] = command;
        j["config"] = config;
        j["inputs"] = inputs;
        j["config_hash"] = hex64(fnv1a(command + config.dump() +
                                       ordered_json(inputs).dump()));
        outputs.push_back("run.manifest.json");
        j["outputs"] = outputs;
        std::ofstream out(out_dir / "run.manifest.json", std::ios::binary | std::ios::trunc);
        if (!out) throw datamech::IoError("cannot write manifest");
        out << j.dump(2) << "\n";
    }
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw datamech::IoError("cannot write '" + path.string() + "'");
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw datamech::IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ------------------------------------------------------------------ config

struct Settings {
    fs::path out_dir = ".";
    datamech::HistogramConfig histogram;
    datamech::DmConfig dm;
    std::string features = "all";
    std::string linkage_name = "average";
    std::map<std::string, std::string> column_mapping;
    datamech::GamedayDefaults xml_defaults;

    // out_dir is deliberately omitted: it changes where results land, not what
    // they contain, and manifests should hash identically across workspaces.
    ordered_json describe() const {
        ordered_json j;
        j["histogram"] = {{"max_bins", histogram.max_bins},
                          {"penalty", histogram.penalty ? ordered_json(*histogram.penalty)
                                                        : ordered_json(nullptr)},
                          {"gap_factor", histogram.gap_factor}};
        j["dm"] = {{"iterations", dm.iterations},
                   {"row_cut_k", dm.row_cut_k},
                   {"col_cut_k", dm.col_cut_k},
                   {"augment_weight", dm.augment_weight},
                   {"linkage", datamech::to_string(dm.linkage)},
                   {"standardize_columns", dm.standardize_columns}};
        j["features"] = features;
        if (!column_mapping.empty()) j["column_mapping"] = column_mapping;
        return j;
    }
};

void apply_config_file(Settings& s, const fs::path& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("bad config file '" + path.string() + "': " + e.what());
    }
    if (j.contains("out_dir")) s.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("histogram")) {
        const auto& h = j["histogram"];
        if (h.contains("max_bins")) s.histogram.max_bins = h["max_bins"].get<int>();
        if (h.contains("penalty") && !h["penalty"].is_null())
            s.histogram.penalty = h["penalty"].get<double>();
        if (h.contains("gap_factor")) s.histogram.gap_factor = h["gap_factor"].get<double>();
    }
    if (j.contains("dm")) {
        const auto& d = j["dm"];
        if (d.contains("iterations")) s.dm.iterations = d["iterations"].get<int>();
        if (d.contains("row_cut_k")) s.dm.row_cut_k = d["row_cut_k"].get<int>();
        if (d.contains("col_cut_k")) s.dm.col_cut_k = d["col_cut_k"].get<int>();
        if (d.contains("augment_weight"))
            s.dm.augment_weight = d["augment_weight"].get<double>();
        if (d.contains("linkage")) s.linkage_name = d["linkage"].get<std::string>();
        if (d.contains("standardize_columns"))
            s.dm.standardize_columns = d["standardize_columns"].get<bool>();
    }
    if (j.contains("features")) s.features = j["features"].get<std::string>();
    if (j.contains("column_mapping"))
        s.column_mapping = j["column_mapping"].get<std::map<std::string, std::string>>();
    if (j.contains("xml")) {
        if (j["xml"].contains("pitcher")) s.xml_defaults.pitcher = j["xml"]["pitcher"];
        if (j["xml"].contains("date")) s.xml_defaults.date = j["xml"]["date"];
    }
}

std::vector<std::string> resolve_features(const std::string& spec,
                                          const datamech::FeatureSchema& schema) {
    const std::vector<std::string> universality11 = {
        "start_speed", "end_speed", "vy0",      "pfx_z",    "az",       "break_length",
        "break_angle", "pfx_x",     "ax",       "spin_dir", "spin_rate"};
    std::vector<std::string> names;
    if (spec == "all" || spec == "21set" || spec.empty()) {
        names = schema.names();
    } else if (spec == "universality11" || spec == "11set") {
        names = universality11;
    } else if (spec == "subtype13") {
        names = universality11;
        names.push_back("x0");
        names.push_back("z0");
    } else {
        std::string token;
        for (char c : spec + ",") {
            if (c == ',') {
                if (!token.empty()) names.push_back(token);
                token.clear();
            } else {
                token.push_back(c);
            }
        }
    }
    for (const auto& n : names)
        if (!schema.index_of(n))
            throw UsageError("feature '" + n + "' is not in the schema");
    if (names.size() < 2) throw UsageError("need at least 2 features, got '" + spec + "'");
    return names;
}

std::set<int> parse_seasons(const std::string& text) {
    std::set<int> out;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        auto dash = token.find('-');
        if (dash != std::string::npos && dash > 0) {
            int lo = std::stoi(token.substr(0, dash));
            int hi = std::stoi(token.substr(dash + 1));
            for (int y = lo; y <= hi; ++y) out.insert(y);
        } else {
            out.insert(std::stoi(token));
        }
        token.clear();
    };
    for (char c : text + ",") {
        if (c == ',') flush();
        else token.push_back(c);
    }
    if (out.empty()) throw UsageError("cannot parse seasons from '" + text + "'");
    return out;
}

datamech::FeatureSchema schema_from_json_file(const fs::path& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw datamech::ParseError("bad schema JSON '" + path.string() + "': " + e.what());
    }
    std::vector<datamech::Feature> features;
    for (const auto& f : j.at("features"))
        features.push_back({f.at("name").get<std::string>(), f.value("unit", std::string()),
                            f.value("required", true)});
    return datamech::FeatureSchema(j.value("version", "1"), std::move(features));
}

datamech::Dendrogram mce_tree(const datamech::MceMatrix& mce, datamech::Linkage linkage) {
    std::vector<double> d;
    d.reserve(mce.size() * mce.size());
    for (std::size_t i = 0; i < mce.size(); ++i)
        for (std::size_t j = 0; j < mce.size(); ++j) d.push_back(mce.at(i, j));
    return agglomerate(datamech::DistanceMatrix(std::move(d), mce.feature_names()), linkage);
}

// ---------------------------------------------------------------- commands

struct IngestArgs {
    std::vector<std::string> inputs;
    std::string format = "auto";
    std::string schema_path;
    std::string name = "dataset";
};

int cmd_ingest(const Settings& settings, const IngestArgs& args) {
    if (args.inputs.empty()) throw UsageError("ingest: at least one --input required");
    datamech::FeatureSchema schema = args.schema_path.empty()
                                         ? datamech::FeatureSchema::default21()
                                         : schema_from_json_file(args.schema_path);
    datamech::ColumnMapping mapping{settings.column_mapping};

    std::vector<datamech::PitchRecord> all;
    datamech::IngestReport report;
    for (const auto& input : args.inputs) {
        fs::path path(input);
        std::string format = args.format;
        if (format == "auto")
            format = path.extension() == ".xml" ? "xml" : "csv";
        datamech::PitchDataset part =
            format == "xml"
                ? datamech::parse_gameday_xml(path, schema, settings.xml_defaults, &report)
                : datamech::parse_csv(path, schema, mapping, &report);
        all.insert(all.end(), part.records().begin(), part.records().end());
    }
    auto dataset = assign_temporal_order(
        datamech::PitchDataset(schema, std::move(all), "ingest"));
    fs::create_directories(settings.out_dir);
    save_dataset(dataset, settings.out_dir / args.name);

    std::cout << "ingested " << dataset.size() << " pitches (" << report.rejected
              << " rejected) -> " << (settings.out_dir / args.name).string() << ".data.csv\n";
    for (const auto& m : report.messages) std::cerr << "  rejected " << m << "\n";

    Manifest manifest{"ingest", settings.describe(), args.inputs,
                      {args.name + ".data.csv", args.name + ".schema.json"}};
    manifest.config["schema"] = args.schema_path;
    manifest.write(settings.out_dir);
    return 0;
}

struct MceArgs {
    std::string dataset;
    std::string pitcher;
    int season = 0;
};

int cmd_mce(const Settings& settings, const MceArgs& args) {
    if (args.dataset.empty()) throw UsageError("mce: --dataset required");
    auto dataset = datamech::load_dataset(args.dataset);
    datamech::RecordFilter f;
    if (!args.pitcher.empty()) f.pitcher = args.pitcher;
    if (args.season != 0) f.seasons = {args.season};
    auto selected = filter(dataset, f);
    if (selected.empty()) throw datamech::DataError("mce: no records match the filter");

    auto features = resolve_features(settings.features, dataset.schema());
    fs::create_directories(settings.out_dir);

    std::vector<std::string> outputs;
    for (const auto& [pitcher, season] : selected.pitcher_seasons()) {
        datamech::RecordFilter group;
        group.pitcher = pitcher;
        group.seasons = {season};
        auto slice = filter(selected, group);
        if (slice.size() < 2) {
            std::cerr << "skipping " << pitcher << "-" << season << ": fewer than 2 pitches\n";
            continue;
        }
        datamech::MceBuildReport report;
        auto mce = mce_matrix(slice, features, settings.histogram, &report);
        for (const auto& w : report.warnings) std::cerr << "  " << w << "\n";

        std::string stem = pitcher + "-" + std::to_string(season);
        write_file(settings.out_dir / (stem + ".mce.json"), to_json(mce));
        write_file(settings.out_dir / (stem + ".mce.csv"), to_csv(mce));
        auto tree = mce_tree(mce, settings.dm.linkage);
        auto spec = datamech::HeatmapSpec::from(mce, tree);
        spec.title = stem;
        render_heatmap(spec, settings.out_dir / (stem + ".mce.svg"));
        outputs.push_back(stem + ".mce.json");
        outputs.push_back(stem + ".mce.csv");
        outputs.push_back(stem + ".mce.svg");
        std::cout << stem << ": " << slice.size() << " pitches, " << features.size()
                  << " features\n";
    }
    if (outputs.empty()) throw datamech::DataError("mce: no pitcher-season had enough pitches");

    Manifest manifest{"mce", settings.describe(), {args.dataset}, outputs};
    manifest.config["pitcher"] = args.pitcher;
    manifest.config["season"] = args.season;
    manifest.write(settings.out_dir);
    return 0;
}

struct DmArgs {
    std::vector<std::string> mce_inputs;
    std::string stack = "all";
};

int cmd_dm(const Settings& settings, const DmArgs& args) {
    std::vector<fs::path> files;
    for (const auto& input : args.mce_inputs) {
        fs::path p(input);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.path().string().ends_with(".mce.json")) files.push_back(entry.path());
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    if (files.size() < 2) throw UsageError("dm: need at least two .mce.json inputs");

    std::vector<std::pair<std::string, datamech::MceMatrix>> list;
    for (const auto& file : files) {
        auto matrix = datamech::mce_from_json(read_file(file));
        std::string label = file.filename().string();
        if (auto pos = label.find(".mce.json"); pos != std::string::npos) label.resize(pos);
        if (settings.features != "all" && !settings.features.empty()) {
            auto features = resolve_features(
                settings.features,
                datamech::FeatureSchema("1", [&] {
                    std::vector<datamech::Feature> fs_;
                    for (const auto& n : matrix.feature_names()) fs_.push_back({n, "", true});
                    return fs_;
                }()));
            matrix = matrix.submatrix(features);
        }
        list.emplace_back(label, std::move(matrix));
    }

    auto stacked = datamech::stack_pitcher_seasons(list);
    datamech::DmConfig config = settings.dm;
    auto trees = dm_iterate(stacked, config);

    fs::create_directories(settings.out_dir);
    write_file(settings.out_dir / "systemic.coupled.json", to_json(trees));
    auto spec = datamech::HeatmapSpec::from(stacked, trees);
    spec.title = "systemic (" + std::to_string(stacked.row_count()) + " pitcher-seasons x " +
                 std::to_string(stacked.col_count()) + " pairs)";
    render_heatmap(spec, settings.out_dir / "systemic.svg");
    std::cout << "stacked " << stacked.row_count() << " pitcher-seasons, "
              << stacked.col_count() << " feature-pair columns\n";

    Manifest manifest{"dm", settings.describe(), {}, {"systemic.coupled.json", "systemic.svg"}};
    for (const auto& f : files) manifest.inputs.push_back(f.string());
    manifest.write(settings.out_dir);
    return 0;
}

struct SubtypesArgs {
    std::string dataset;
    std::string pitch_type;
    std::vector<std::string> pitchers;
    std::string baseline_seasons;
    std::string baseline_pitcher;
};

int cmd_subtypes(const Settings& settings, const SubtypesArgs& args) {
    if (args.dataset.empty()) throw UsageError("subtypes: --dataset required");
    if (args.pitch_type.empty()) throw UsageError("subtypes: --pitch-type required");
    auto dataset = datamech::load_dataset(args.dataset);
    auto features = resolve_features(settings.features == "all" ? "subtype13"
                                                                : settings.features,
                                     dataset.schema());
    datamech::DmConfig config = settings.dm;
    if (config.row_cut_k <= 0) config.row_cut_k = 6;

    fs::create_directories(settings.out_dir);
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;

    if (!args.baseline_pitcher.empty()) {
        // pooled comparison across pitchers, baseline = one pitcher's pitches
        std::vector<datamech::PitchDataset> per_pitcher;
        std::vector<std::string> names = args.pitchers;
        if (names.empty())
            for (const auto& [p, s] : dataset.pitcher_seasons())
                if (std::find(names.begin(), names.end(), p) == names.end()) names.push_back(p);
        for (const auto& name : names) {
            datamech::RecordFilter f;
            f.pitcher = name;
            per_pitcher.push_back(filter(dataset, f));
        }
        auto result = cross_pitcher_series(per_pitcher, args.baseline_pitcher, args.pitch_type,
                                           features, config, &warnings);
        std::string stem = "pooled-" + args.pitch_type;
        write_file(settings.out_dir / (stem + ".subtypes.json"), to_json(result.model));
        outputs.push_back(stem + ".subtypes.json");
        std::vector<datamech::LikelihoodSeries> all_series;
        for (const auto& [pitcher, series] : result.series_by_pitcher) {
            auto csv_name = pitcher + "-" + args.pitch_type + ".likelihood.csv";
            write_file(settings.out_dir / csv_name, to_csv(series));
            outputs.push_back(csv_name);
            all_series.push_back(series);
        }
        render_likelihood_plot(all_series, settings.out_dir / (stem + ".likelihood.svg"));
        outputs.push_back(stem + ".likelihood.svg");
    } else {
        if (args.baseline_seasons.empty())
            throw UsageError("subtypes: --baseline-seasons or --baseline-pitcher required");
        datamech::PitchDataset scope = dataset;
        std::string who = "all";
        if (!args.pitchers.empty()) {
            datamech::RecordFilter f;
            f.pitcher = args.pitchers.front();
            scope = filter(dataset, f);
            who = args.pitchers.front();
        }
        auto model = extract_subtypes(scope, args.pitch_type, features, config, &warnings);
        model = fit_baseline(model, parse_seasons(args.baseline_seasons));
        auto series = likelihood_series(model, scope);

        std::string stem = who + "-" + args.pitch_type;
        write_file(settings.out_dir / (stem + ".subtypes.json"), to_json(model));
        write_file(settings.out_dir / (stem + ".likelihood.csv"), to_csv(series));
        std::vector<datamech::LikelihoodSeries> one{series};
        render_likelihood_plot(one, settings.out_dir / (stem + ".likelihood.svg"));
        outputs = {stem + ".subtypes.json", stem + ".likelihood.csv",
                   stem + ".likelihood.svg"};

        // pitch-by-feature heatmap framed by the coupled trees
        std::vector<double> values;
        std::vector<std::string> row_labels;
        std::vector<std::size_t> idx;
        for (const auto& f : model.feature_names) idx.push_back(*scope.schema().index_of(f));
        std::map<std::pair<std::string, std::uint64_t>, const datamech::PitchRecord*> lookup;
        for (const auto& r : scope.records()) lookup[{r.pitcher_id, r.temporal_index}] = &r;
        for (const auto& p : model.pitches) {
            const auto* r = lookup.at({p.pitcher_id, p.temporal_index});
            for (auto i : idx) values.push_back(r->values[i]);
            row_labels.push_back(p.pitcher_id + ":" + std::to_string(p.temporal_index));
        }
        datamech::RectMatrix pitch_matrix(std::move(values), std::move(row_labels),
                                          model.feature_names);
        auto spec = datamech::HeatmapSpec::from(pitch_matrix, model.trees);
        spec.title = stem + " pitches";
        render_heatmap(spec, settings.out_dir / (stem + ".pitches.svg"));
        outputs.push_back(stem + ".pitches.svg");
    }
    for (const auto& w : warnings) std::cerr << "  " << w << "\n";

    Manifest manifest{"subtypes", settings.describe(), {args.dataset}, outputs};
    manifest.config["pitch_type"] = args.pitch_type;
    manifest.config["baseline_seasons"] = args.baseline_seasons;
    manifest.config["baseline_pitcher"] = args.baseline_pitcher;
    manifest.write(settings.out_dir);
    return 0;
}

struct ReportArgs {
    std::string dataset;
    std::string mce_file;
    int focus_season = 0;
    std::string baseline_seasons;
};

int cmd_report(const Settings& settings, const ReportArgs& args) {
    if (args.mce_file.empty()) throw UsageError("report: --mce required");
    if (args.dataset.empty()) throw UsageError("report: --dataset required");
    if (args.focus_season == 0) throw UsageError("report: --focus-season required");
    if (args.baseline_seasons.empty()) throw UsageError("report: --baseline-seasons required");

    auto mce = datamech::mce_from_json(read_file(args.mce_file));
    auto tree = mce_tree(mce, settings.dm.linkage);
    auto report = universality_report(mce, tree, datamech::default_universality_template());

    fs::create_directories(settings.out_dir);
    write_file(settings.out_dir / "universality.json", to_json(report));

    auto dataset = datamech::load_dataset(args.dataset);
    export_scatter3p2(dataset, args.focus_season, parse_seasons(args.baseline_seasons),
                      settings.out_dir / "scatter.json");

    std::cout << "universality match_score " << report.match_score << "\n";

    Manifest manifest{"report", settings.describe(), {args.dataset, args.mce_file},
                      {"universality.json", "scatter.json"}};
    manifest.config["focus_season"] = args.focus_season;
    manifest.config["baseline_seasons"] = args.baseline_seasons;
    manifest.write(settings.out_dir);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pitch-mechanics pattern extraction (possibly-gapped histograms, mutual "
                 "conditional entropy, coupled-tree biclustering, subtype likelihoods)"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    app.add_option("--config", config_path, "JSON config file (flags override it)")
        ->expected(1);
    app.add_option("--out", out_dir, "output directory");

    Settings settings;
    std::string features_flag, linkage_flag, penalty_flag;
    int max_bins_flag = -1;
    double gap_factor_flag = -1.0, weight_flag = -1.0;
    int iterations_flag = -1, row_k_flag = -1, col_k_flag = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->fallthrough(); // let --config/--out appear after the subcommand
        cmd->add_option("--features", features_flag,
                        "feature preset (all|universality11|subtype13) or comma list");
        cmd->add_option("--max-bins", max_bins_flag, "histogram bin budget");
        cmd->add_option("--penalty", penalty_flag, "histogram per-bin penalty");
        cmd->add_option("--gap-factor", gap_factor_flag, "histogram gap factor");
        cmd->add_option("--iterations", iterations_flag, "DM iterations");
        cmd->add_option("--row-k", row_k_flag, "row cut level (0 = auto)");
        cmd->add_option("--col-k", col_k_flag, "column cut level (0 = auto)");
        cmd->add_option("--weight", weight_flag, "augmented-distance weight");
        cmd->add_option("--linkage", linkage_flag, "single|complete|average|ward");
    };

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "parse CSV/Gameday-XML pitch files");
    ingest->fallthrough();
    ingest->add_option("--input", ingest_args.inputs, "input files")->required();
    ingest->add_option("--format", ingest_args.format, "csv|xml|auto");
    ingest->add_option("--schema", ingest_args.schema_path, "schema JSON override");
    ingest->add_option("--name", ingest_args.name, "output dataset name");
    std::string xml_pitcher, xml_date;
    ingest->add_option("--xml-pitcher", xml_pitcher, "fallback pitcher id for XML");
    ingest->add_option("--xml-date", xml_date, "fallback ISO date for XML");

    MceArgs mce_args;
    auto* mce = app.add_subcommand("mce", "mutual conditional entropy matrices per pitcher-season");
    mce->add_option("--dataset", mce_args.dataset, "dataset base path")->required();
    mce->add_option("--pitcher", mce_args.pitcher, "restrict to one pitcher");
    mce->add_option("--season", mce_args.season, "restrict to one season");
    add_common(mce);

    DmArgs dm_args;
    auto* dm = app.add_subcommand("dm", "systemic coupled biclustering over MCE vectors");
    dm->add_option("--mce", dm_args.mce_inputs, ".mce.json files or directories")->required();
    dm->add_option("--stack", dm_args.stack, "which matrices to stack (all)");
    add_common(dm);

    SubtypesArgs sub_args;
    auto* subtypes = app.add_subcommand("subtypes", "pitch-subtype extraction and likelihoods");
    subtypes->add_option("--dataset", sub_args.dataset, "dataset base path")->required();
    subtypes->add_option("--pitch-type", sub_args.pitch_type, "pitch type code or OT")
        ->required();
    subtypes->add_option("--pitcher", sub_args.pitchers, "pitcher(s) to include");
    subtypes->add_option("--baseline-seasons", sub_args.baseline_seasons,
                         "e.g. 2012-2014 or 2012,2013");
    subtypes->add_option("--baseline-pitcher", sub_args.baseline_pitcher,
                         "pooled mode: baseline pitcher id");
    add_common(subtypes);

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "universality report and 3(+2)D scatter export");
    report->add_option("--dataset", report_args.dataset, "dataset base path")->required();
    report->add_option("--mce", report_args.mce_file, "MCE JSON for the universality check")
        ->required();
    report->add_option("--focus-season", report_args.focus_season, "season drawn in color");
    report->add_option("--baseline-seasons", report_args.baseline_seasons,
                       "gray background seasons");
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 1;
    }

    try {
        if (!config_path.empty()) apply_config_file(settings, config_path);
        if (!out_dir.empty()) settings.out_dir = out_dir;
        if (!features_flag.empty()) settings.features = features_flag;
        if (max_bins_flag >= 0) settings.histogram.max_bins = max_bins_flag;
        if (!penalty_flag.empty()) settings.histogram.penalty = std::stod(penalty_flag);
        if (gap_factor_flag > 0) settings.histogram.gap_factor = gap_factor_flag;
        if (iterations_flag > 0) settings.dm.iterations = iterations_flag;
        if (row_k_flag >= 0) settings.dm.row_cut_k = row_k_flag;
        if (col_k_flag >= 0) settings.dm.col_cut_k = col_k_flag;
        if (weight_flag >= 0) settings.dm.augment_weight = weight_flag;
        if (!linkage_flag.empty()) settings.linkage_name = linkage_flag;
        settings.dm.linkage = datamech::linkage_from_string(settings.linkage_name);
        if (!xml_pitcher.empty()) settings.xml_defaults.pitcher = xml_pitcher;
        if (!xml_date.empty()) settings.xml_defaults.date = xml_date;

        if (ingest->parsed()) return cmd_ingest(settings, ingest_args);
        if (mce->parsed()) return cmd_mce(settings, mce_args);
        if (dm->parsed()) return cmd_dm(settings, dm_args);
        if (subtypes->parsed()) return cmd_subtypes(settings, sub_args);
        if (report->parsed()) return cmd_report(settings, report_args);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const datamech::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
