#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "datamech/data_mechanics.hpp"
#include "datamech/dataset.hpp"

namespace datamech {

/// Identity of one pitch inside a model: who threw it and when.
struct ModelPitch {
    std::string pitcher_id;
    std::uint64_t temporal_index = 0;
    int season = 0;

    bool operator==(const ModelPitch&) const = default;
};

/// Per-pitch-type clustering into subtypes plus the baseline categorical
/// pattern distribution that drives likelihood timelines.
struct SubtypeModel {
    std::string pitch_type;
    std::vector<std::string> feature_names;
    CoupledTrees trees;
    std::vector<ModelPitch> pitches;  ///< ordered by (pitcher_id, temporal_index)
    std::vector<int> subtype_ids;     ///< aligned to pitches; numbered along the
                                      ///< row-tree leaf order, 0 = leftmost block
    int subtype_count = 0;
    std::set<int> baseline_seasons;   ///< empty until fitted
    std::string baseline_pitcher;     ///< set instead of seasons in pooled mode
    /// Per-subtype share of baseline pitches. Sums to 1 when the baseline is
    /// non-empty; all zeros for a pitch-type absent from the baseline
    /// repertoire (every such pitch then carries likelihood 0).
    std::vector<double> pattern_distribution;

    bool fitted() const { return !pattern_distribution.empty(); }
    int subtype_of(const std::string& pitcher_id, std::uint64_t temporal_index) const;
};

struct LikelihoodPoint {
    std::uint64_t temporal_index = 0;
    int season = 0;
    int subtype = 0;          ///< 0-based subtype id
    double likelihood = 0.0;  ///< pattern_distribution[subtype]

    bool operator==(const LikelihoodPoint&) const = default;
};

/// Temporally ordered likelihood timeline of one pitcher's pitches of one type.
struct LikelihoodSeries {
    std::string pitcher_id;
    std::string pitch_type;
    std::vector<LikelihoodPoint> points;

    bool operator==(const LikelihoodSeries&) const = default;
};

/// Clusters all pitches of `pitch_type` over `features` with dm_iterate
/// (columns standardized) and cuts the row tree at 6 to define the subtypes.
/// Fewer than 6 pitches cut at n with a warning appended to `warnings`.
/// Throws DataError when the type is absent, SchemaError on unknown features.
SubtypeModel extract_subtypes(const PitchDataset& dataset, const std::string& pitch_type,
                              std::span<const std::string> features, const DmConfig& dm_config,
                              std::vector<std::string>* warnings = nullptr);

/// Computes the categorical pattern distribution from the pitches whose season
/// lies in `baseline_seasons`. Throws DataError when the intersection is empty.
SubtypeModel fit_baseline(SubtypeModel model, const std::set<int>& baseline_seasons);

/// One point per pitch of the model's type found in `dataset`, ordered by
/// temporal_index; each point's likelihood is the pattern probability of its
/// subtype. Throws DataError for pitches unknown to the model.
LikelihoodSeries likelihood_series(const SubtypeModel& model, const PitchDataset& dataset);

/// Pools pitches of `pitch_type` across the given per-pitcher datasets,
/// extracts subtypes on the pool, takes every pitch of `baseline_pitcher` as
/// the baseline and returns one series per pitcher. The pseudo-type "OT"
/// selects all pitches whose type is outside the baseline pitcher's
/// repertoire; its distribution is all zeros, so every OT pitch carries
/// likelihood 0. Throws DataError if the baseline pitcher is absent.
struct CrossPitcherResult {
    SubtypeModel model;
    std::map<std::string, LikelihoodSeries> series_by_pitcher;
};
CrossPitcherResult cross_pitcher_series(std::span<const PitchDataset> datasets,
                                        const std::string& baseline_pitcher,
                                        const std::string& pitch_type,
                                        std::span<const std::string> features,
                                        const DmConfig& dm_config,
                                        std::vector<std::string>* warnings = nullptr);

/// Pseudo pitch-type code pooling everything outside the baseline repertoire.
inline constexpr const char* kOutOfRepertoireType = "OT";

/// `temporal_index,season,pitch_type,subtype,likelihood` with subtypes printed
/// 1-based to match the FF1..FF6 reading of the heatmaps.
std::string to_csv(const LikelihoodSeries& series);

/// Full model bundle, including trees and per-pitch assignments.
std::string to_json(const SubtypeModel& model);
SubtypeModel subtype_model_from_json(const std::string& text);

} // namespace datamech
