#include "datamech/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "datamech/error.hpp"

namespace datamech {

PitchDataset::PitchDataset(FeatureSchema schema, std::vector<PitchRecord> records,
                           std::string provenance)
    : schema_(std::move(schema)), records_(std::move(records)),
      provenance_(std::move(provenance)) {
    const auto& features = schema_.features();
    for (const auto& r : records_) {
        if (r.values.size() != features.size())
            throw SchemaError("record for pitcher '" + r.pitcher_id + "' has " +
                              std::to_string(r.values.size()) + " values, schema has " +
                              std::to_string(features.size()));
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (features[i].required && !std::isfinite(r.values[i]))
                throw DataError("non-finite value for required feature '" + features[i].name +
                                "' (pitcher '" + r.pitcher_id + "')");
        }
    }
}

std::vector<double> PitchDataset::feature_column(std::string_view name) const {
    auto idx = schema_.index_of(name);
    if (!idx) throw SchemaError("unknown feature '" + std::string(name) + "'");
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.values[*idx]);
    return out;
}

std::vector<std::pair<std::string, int>> PitchDataset::pitcher_seasons() const {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& r : records_) {
        std::pair<std::string, int> key{r.pitcher_id, r.season};
        if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
    }
    return out;
}

bool RecordFilter::matches(const PitchRecord& r) const {
    if (pitcher && r.pitcher_id != *pitcher) return false;
    if (!seasons.empty() && !seasons.count(r.season)) return false;
    if (!pitch_types.empty() && !pitch_types.count(r.pitch_type)) return false;
    return true;
}

PitchDataset filter(const PitchDataset& dataset, const RecordFilter& f) {
    return filter(dataset, [&f](const PitchRecord& r) { return f.matches(r); });
}

PitchDataset filter(const PitchDataset& dataset,
                    const std::function<bool(const PitchRecord&)>& pred) {
    std::vector<PitchRecord> kept;
    for (const auto& r : dataset.records())
        if (pred(r)) kept.push_back(r);
    return PitchDataset(dataset.schema(), std::move(kept), dataset.provenance());
}

PitchDataset assign_temporal_order(const PitchDataset& dataset) {
    const auto& records = dataset.records();
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = records[a];
        const auto& rb = records[b];
        if (ra.pitcher_id != rb.pitcher_id) return ra.pitcher_id < rb.pitcher_id;
        return ra.game_date < rb.game_date; // ISO dates sort lexicographically
    });
    std::vector<PitchRecord> sorted;
    sorted.reserve(records.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        PitchRecord r = records[order[rank]];
        r.temporal_index = rank;
        sorted.push_back(std::move(r));
    }
    return PitchDataset(dataset.schema(), std::move(sorted), dataset.provenance());
}

} // namespace datamech
