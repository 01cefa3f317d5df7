#include "datamech/schema.hpp"

#include <unordered_set>

#include "datamech/error.hpp"

namespace datamech {

FeatureSchema::FeatureSchema(std::string version, std::vector<Feature> features)
    : version_(std::move(version)), features_(std::move(features)) {
    std::unordered_set<std::string> seen;
    for (const auto& f : features_) {
        if (f.name.empty()) throw ArgumentError("schema: empty feature name");
        if (!seen.insert(f.name).second)
            throw ArgumentError("schema: duplicate feature name '" + f.name + "'");
    }
}

FeatureSchema FeatureSchema::default21() {
    return FeatureSchema(
        "1",
        {
            {"start_speed", "mph", true},
            {"end_speed", "mph", true},
            {"vx0", "ft/s", true},
            {"vy0", "ft/s", true},
            {"vz0", "ft/s", true},
            {"ax", "ft/s2", true},
            {"ay", "ft/s2", true},
            {"az", "ft/s2", true},
            {"pfx_x", "in", true},
            {"pfx_z", "in", true},
            {"break_angle", "deg", true},
            {"break_length", "in", true},
            {"break_y", "ft", true},
            {"spin_dir", "deg", true},
            {"spin_rate", "rpm", true},
            {"x0", "ft", true},
            {"y0", "ft", true},
            {"z0", "ft", true},
            {"px", "ft", false},
            {"pz", "ft", false},
            {"sz_top", "ft", false},
        });
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].name == name) return i;
    return std::nullopt;
}

std::vector<std::string> FeatureSchema::names() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const auto& f : features_) out.push_back(f.name);
    return out;
}

} // namespace datamech
