#include "datamech/subtype_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "datamech/error.hpp"

#include "text_util.hpp"

namespace datamech {

namespace {

constexpr int kDefaultSubtypes = 6;

std::string pitch_row_label(const PitchRecord& r) {
    return r.pitcher_id + ":" + std::to_string(r.temporal_index);
}

// Pitches of one type as a pitches x features matrix, with NaN-bearing rows
// dropped (a pitch must be fully observed to be clustered).
struct TypedPitches {
    std::vector<const PitchRecord*> records;
    RectMatrix matrix;
};

TypedPitches collect_typed(const PitchDataset& dataset,
                           const std::function<bool(const PitchRecord&)>& selector,
                           std::span<const std::string> features, const std::string& what,
                           std::vector<std::string>* warnings) {
    std::vector<std::size_t> feature_idx;
    for (const auto& name : features) {
        auto idx = dataset.schema().index_of(name);
        if (!idx) throw SchemaError("unknown feature '" + name + "'");
        feature_idx.push_back(*idx);
    }

    std::vector<const PitchRecord*> selected;
    std::vector<double> values;
    std::size_t dropped = 0;
    for (const auto& r : dataset.records()) {
        if (!selector(r)) continue;
        bool complete = true;
        for (auto idx : feature_idx)
            if (!std::isfinite(r.values[idx])) {
                complete = false;
                break;
            }
        if (!complete) {
            ++dropped;
            continue;
        }
        selected.push_back(&r);
        for (auto idx : feature_idx) values.push_back(r.values[idx]);
    }
    if (selected.empty()) throw DataError("no usable pitches for " + what);
    if (dropped > 0 && warnings)
        warnings->push_back(std::to_string(dropped) + " " + what +
                            " pitches dropped for missing feature values");

    std::vector<std::string> row_labels;
    row_labels.reserve(selected.size());
    for (const auto* r : selected) row_labels.push_back(pitch_row_label(*r));
    return TypedPitches{std::move(selected),
                        RectMatrix(std::move(values), std::move(row_labels),
                                   std::vector<std::string>(features.begin(), features.end()))};
}

SubtypeModel build_model(const TypedPitches& typed, const std::string& pitch_type,
                         std::span<const std::string> features, DmConfig dm_config,
                         std::vector<std::string>* warnings) {
    const std::size_t n = typed.records.size();
    int k = dm_config.row_cut_k > 0 ? dm_config.row_cut_k : kDefaultSubtypes;
    if (static_cast<std::size_t>(k) > n) {
        k = static_cast<int>(n);
        if (warnings)
            warnings->push_back("only " + std::to_string(n) + " pitches of type '" + pitch_type +
                                "'; cutting at " + std::to_string(k) + " subtypes");
    }
    dm_config.row_cut_k = k;
    if (dm_config.col_cut_k <= 0)
        dm_config.col_cut_k = std::min<int>(static_cast<int>(features.size()),
                                            kDefaultSubtypes);
    dm_config.standardize_columns = true; // raw features mix mph, rpm, degrees

    if (n < 2) throw DataError("need at least 2 pitches of type '" + pitch_type + "'");
    CoupledTrees trees = dm_iterate(typed.matrix, dm_config);

    SubtypeModel model;
    model.pitch_type = pitch_type;
    model.feature_names.assign(features.begin(), features.end());
    model.subtype_ids = trees.row_cut.labels; // numbered along the leaf order already
    model.subtype_count = trees.row_cut.k;
    model.trees = std::move(trees);
    model.pitches.reserve(n);
    for (const auto* r : typed.records)
        model.pitches.push_back({r->pitcher_id, r->temporal_index, r->season});
    return model;
}

} // namespace

int SubtypeModel::subtype_of(const std::string& pitcher_id, std::uint64_t temporal_index) const {
    for (std::size_t i = 0; i < pitches.size(); ++i)
        if (pitches[i].temporal_index == temporal_index && pitches[i].pitcher_id == pitcher_id)
            return subtype_ids[i];
    return -1;
}

SubtypeModel extract_subtypes(const PitchDataset& dataset, const std::string& pitch_type,
                              std::span<const std::string> features, const DmConfig& dm_config,
                              std::vector<std::string>* warnings) {
    auto typed = collect_typed(
        dataset, [&](const PitchRecord& r) { return r.pitch_type == pitch_type; }, features,
        "'" + pitch_type + "'", warnings);
    return build_model(typed, pitch_type, features, dm_config, warnings);
}

SubtypeModel fit_baseline(SubtypeModel model, const std::set<int>& baseline_seasons) {
    if (baseline_seasons.empty()) throw ArgumentError("fit_baseline: no baseline seasons given");
    std::vector<double> tally(static_cast<std::size_t>(model.subtype_count), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < model.pitches.size(); ++i) {
        if (!baseline_seasons.count(model.pitches[i].season)) continue;
        tally[static_cast<std::size_t>(model.subtype_ids[i])] += 1.0;
        total += 1.0;
    }
    if (total == 0.0)
        throw DataError("fit_baseline: no '" + model.pitch_type +
                        "' pitches fall in the baseline seasons");
    for (auto& t : tally) t /= total;
    model.baseline_seasons = baseline_seasons;
    model.pattern_distribution = std::move(tally);
    return model;
}

LikelihoodSeries likelihood_series(const SubtypeModel& model, const PitchDataset& dataset) {
    if (!model.fitted()) throw ArgumentError("likelihood_series: model has no baseline fitted");
    std::unordered_map<std::string, int> index;
    index.reserve(model.pitches.size());
    for (std::size_t i = 0; i < model.pitches.size(); ++i)
        index.emplace(model.pitches[i].pitcher_id + ":" +
                          std::to_string(model.pitches[i].temporal_index),
                      model.subtype_ids[i]);
    LikelihoodSeries series;
    series.pitch_type = model.pitch_type;
    for (const auto& r : dataset.records()) {
        if (r.pitch_type != model.pitch_type) continue;
        if (series.pitcher_id.empty()) series.pitcher_id = r.pitcher_id;
        auto it = index.find(pitch_row_label(r));
        if (it == index.end())
            throw DataError("likelihood_series: pitch " + pitch_row_label(r) +
                            " is unknown to the model");
        int subtype = it->second;
        series.points.push_back({r.temporal_index, r.season, subtype,
                                 model.pattern_distribution[static_cast<std::size_t>(subtype)]});
    }
    std::sort(series.points.begin(), series.points.end(),
              [](const LikelihoodPoint& a, const LikelihoodPoint& b) {
                  return a.temporal_index < b.temporal_index;
              });
    return series;
}

CrossPitcherResult cross_pitcher_series(std::span<const PitchDataset> datasets,
                                        const std::string& baseline_pitcher,
                                        const std::string& pitch_type,
                                        std::span<const std::string> features,
                                        const DmConfig& dm_config,
                                        std::vector<std::string>* warnings) {
    if (datasets.empty()) throw ArgumentError("cross_pitcher_series: no datasets");
    const auto& schema = datasets.front().schema();
    std::vector<PitchRecord> pooled;
    for (const auto& d : datasets) {
        if (!(d.schema() == schema))
            throw SchemaError("cross_pitcher_series: datasets use different schemas");
        pooled.insert(pooled.end(), d.records().begin(), d.records().end());
    }
    PitchDataset pool(schema, std::move(pooled), "pooled");

    // The baseline pitcher's repertoire decides what "OT" means.
    std::unordered_set<std::string> repertoire;
    bool baseline_seen = false;
    for (const auto& r : pool.records()) {
        if (r.pitcher_id == baseline_pitcher) {
            baseline_seen = true;
            repertoire.insert(r.pitch_type);
        }
    }
    if (!baseline_seen)
        throw DataError("cross_pitcher_series: baseline pitcher '" + baseline_pitcher +
                        "' not present");

    const bool out_of_repertoire = pitch_type == kOutOfRepertoireType;
    auto selector = [&](const PitchRecord& r) {
        return out_of_repertoire ? !repertoire.count(r.pitch_type) : r.pitch_type == pitch_type;
    };
    auto typed = collect_typed(pool, selector, features, "'" + pitch_type + "'", warnings);
    SubtypeModel model = build_model(typed, pitch_type, features, dm_config, warnings);
    model.baseline_pitcher = baseline_pitcher;

    // Pattern distribution over the baseline pitcher's own pitches. A type
    // outside the repertoire has an empty baseline by construction: the
    // distribution is all zeros and every pitch carries likelihood 0.
    std::vector<double> tally(static_cast<std::size_t>(model.subtype_count), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < model.pitches.size(); ++i) {
        if (model.pitches[i].pitcher_id != baseline_pitcher) continue;
        tally[static_cast<std::size_t>(model.subtype_ids[i])] += 1.0;
        total += 1.0;
    }
    if (total > 0.0)
        for (auto& t : tally) t /= total;
    else if (warnings)
        warnings->push_back("baseline pitcher throws no '" + pitch_type +
                            "'; all likelihoods are 0");
    model.pattern_distribution = std::move(tally);

    CrossPitcherResult result;
    for (std::size_t i = 0; i < model.pitches.size(); ++i) {
        const auto& p = model.pitches[i];
        auto& series = result.series_by_pitcher[p.pitcher_id];
        series.pitcher_id = p.pitcher_id;
        series.pitch_type = pitch_type;
        series.points.push_back(
            {p.temporal_index, p.season, model.subtype_ids[i],
             model.pattern_distribution[static_cast<std::size_t>(model.subtype_ids[i])]});
    }
    for (auto& [pitcher, series] : result.series_by_pitcher)
        std::sort(series.points.begin(), series.points.end(),
                  [](const LikelihoodPoint& a, const LikelihoodPoint& b) {
                      return a.temporal_index < b.temporal_index;
                  });
    result.model = std::move(model);
    return result;
}

std::string to_csv(const LikelihoodSeries& series) {
    std::string out = "temporal_index,season,pitch_type,subtype,likelihood\n";
    for (const auto& p : series.points) {
        out += std::to_string(p.temporal_index);
        out += "," + std::to_string(p.season);
        out += "," + series.pitch_type;
        out += "," + std::to_string(p.subtype + 1); // FF1..FF6 reading
        out += "," + detail::format_double(p.likelihood);
        out += "\n";
    }
    return out;
}

std::string to_json(const SubtypeModel& model) {
    nlohmann::ordered_json j;
    j["pitch_type"] = model.pitch_type;
    j["feature_names"] = model.feature_names;
    j["subtype_count"] = model.subtype_count;
    j["baseline_seasons"] = model.baseline_seasons;
    j["baseline_pitcher"] = model.baseline_pitcher;
    j["pattern_distribution"] = model.pattern_distribution;
    j["pitches"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < model.pitches.size(); ++i) {
        const auto& p = model.pitches[i];
        j["pitches"].push_back({{"pitcher", p.pitcher_id},
                                {"temporal_index", p.temporal_index},
                                {"season", p.season},
                                {"subtype", model.subtype_ids[i]}});
    }
    j["trees"] = nlohmann::json::parse(to_json(model.trees));
    return j.dump(2) + "\n";
}

SubtypeModel subtype_model_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        SubtypeModel model;
        model.pitch_type = j.at("pitch_type").get<std::string>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.subtype_count = j.at("subtype_count").get<int>();
        model.baseline_seasons = j.at("baseline_seasons").get<std::set<int>>();
        model.baseline_pitcher = j.value("baseline_pitcher", std::string());
        model.pattern_distribution = j.at("pattern_distribution").get<std::vector<double>>();
        for (const auto& p : j.at("pitches")) {
            model.pitches.push_back({p.at("pitcher").get<std::string>(),
                                     p.at("temporal_index").get<std::uint64_t>(),
                                     p.at("season").get<int>()});
            model.subtype_ids.push_back(p.at("subtype").get<int>());
        }
        model.trees = coupled_trees_from_json(j.at("trees").dump());
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad subtype model JSON: ") + e.what());
    }
}

} // namespace datamech
