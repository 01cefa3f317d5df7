#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace datamech {

/// One named numeric feature. `required` features must be finite in every record;
/// optional ones may be missing (stored as NaN).
struct Feature {
    std::string name;
    std::string unit;
    bool required = true;

    bool operator==(const Feature&) const = default;
};

/// Ordered feature list. The order is fixed at construction and defines the column
/// order of every downstream matrix.
class FeatureSchema {
public:
    /// Throws ArgumentError on duplicate or empty feature names.
    FeatureSchema(std::string version, std::vector<Feature> features);

    /// The default 21-feature PITCHf/x schema: the 18 kinematic features
    /// (start_speed .. z0) plus the plate-crossing coordinates px, pz and sz_top.
    /// The three slots beyond the 18 kinematic ones are convention, not physics;
    /// override with a custom schema file where a different set was recorded.
    static FeatureSchema default21();

    const std::string& version() const { return version_; }
    const std::vector<Feature>& features() const { return features_; }
    std::size_t size() const { return features_.size(); }
    const Feature& at(std::size_t i) const { return features_.at(i); }

    /// Position of `name` in the column order, or nullopt.
    std::optional<std::size_t> index_of(std::string_view name) const;

    /// All feature names in column order.
    std::vector<std::string> names() const;

    bool operator==(const FeatureSchema&) const = default;

private:
    std::string version_;
    std::vector<Feature> features_;
};

} // namespace datamech
