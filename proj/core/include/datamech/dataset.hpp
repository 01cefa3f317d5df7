#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "datamech/schema.hpp"

namespace datamech {

/// One pitch: label metadata plus a numeric feature vector aligned to a FeatureSchema.
struct PitchRecord {
    std::string pitcher_id;
    int season = 0;                  ///< year, normally derived from game_date
    std::string game_date;           ///< ISO-8601 YYYY-MM-DD
    std::uint64_t temporal_index = 0;
    std::string pitch_type;          ///< MLBAM code (FF, FT, SL, CH, CU, FC, SI, KN, ...)
    std::vector<double> values;

    bool operator==(const PitchRecord&) const = default;
};

/// Immutable-after-construction collection of pitches sharing one schema.
/// Safe to share read-only across threads.
class PitchDataset {
public:
    /// Validates every record: value count equals schema size (SchemaError) and
    /// required features are finite (DataError).
    PitchDataset(FeatureSchema schema, std::vector<PitchRecord> records,
                 std::string provenance = {});

    const FeatureSchema& schema() const { return schema_; }
    const std::vector<PitchRecord>& records() const { return records_; }
    const std::string& provenance() const { return provenance_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// Column of values for one feature, in record order. Throws SchemaError if
    /// the feature is not in the schema.
    std::vector<double> feature_column(std::string_view name) const;

    /// Distinct (pitcher_id, season) pairs in first-appearance order.
    std::vector<std::pair<std::string, int>> pitcher_seasons() const;

    bool operator==(const PitchDataset&) const = default;

private:
    FeatureSchema schema_;
    std::vector<PitchRecord> records_;
    std::string provenance_;
};

/// Declarative record predicate; empty sets match everything.
struct RecordFilter {
    std::optional<std::string> pitcher;
    std::set<int> seasons;
    std::set<std::string> pitch_types;

    bool matches(const PitchRecord& r) const;
};

/// Order- and schema-preserving subset. An empty result is allowed.
PitchDataset filter(const PitchDataset& dataset, const RecordFilter& f);
PitchDataset filter(const PitchDataset& dataset,
                    const std::function<bool(const PitchRecord&)>& pred);

/// Reassigns temporal_index as the stable sort rank of (pitcher_id, game_date,
/// current position) and reorders records to that rank. Applied once at ingest;
/// per pitcher the index then strictly increases with (date, in-file order).
PitchDataset assign_temporal_order(const PitchDataset& dataset);

} // namespace datamech
