#include <cmath>
#include <limits>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "datamech/error.hpp"
#include "datamech/ingest.hpp"

#include "text_util.hpp"

namespace datamech {

namespace {

namespace pt = boost::property_tree;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Inherited {
    std::string pitcher;
    std::string date;
};

std::string attr_or(const pt::ptree& node, const std::string& name, const std::string& fallback) {
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
        if (auto v = attrs->get_optional<std::string>(name)) return *v;
    }
    return fallback;
}

void collect_pitches(const pt::ptree& node, const FeatureSchema& schema, Inherited inherited,
                     std::vector<PitchRecord>& records, IngestReport& rep) {
    for (const auto& [name, child] : node) {
        if (name == "<xmlattr>") continue;
        Inherited next = inherited;
        next.pitcher = attr_or(child, "pitcher", next.pitcher);
        next.date = attr_or(child, "date", next.date);
        if (name != "pitch") {
            collect_pitches(child, schema, next, records, rep);
            continue;
        }

        auto fail = [&](const std::string& why) {
            rep.reject("<pitch> #" + std::to_string(rep.accepted + rep.rejected + 1) + ": " + why);
        };
        PitchRecord r;
        r.pitcher_id = next.pitcher;
        r.game_date = next.date;
        r.pitch_type = attr_or(child, "pitch_type", "");
        if (r.pitcher_id.empty()) {
            fail("no pitcher attribute in scope");
            continue;
        }
        auto year = detail::parse_iso_date_year(r.game_date);
        if (!year) {
            fail("no usable date attribute in scope ('" + r.game_date + "')");
            continue;
        }
        r.season = *year;
        if (r.pitch_type.empty()) {
            fail("missing pitch_type attribute");
            continue;
        }

        r.values.assign(schema.size(), kNaN);
        bool ok = true;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const auto& feature = schema.at(i);
            std::string raw = attr_or(child, feature.name, "");
            if (raw.empty()) {
                if (feature.required) {
                    fail("missing required attribute '" + feature.name + "'");
                    ok = false;
                    break;
                }
                continue;
            }
            auto value = detail::parse_double(raw);
            if (!value || !std::isfinite(*value)) {
                if (feature.required) {
                    fail("unparseable attribute " + feature.name + "='" + raw + "'");
                    ok = false;
                    break;
                }
                continue;
            }
            r.values[i] = *value;
        }
        if (!ok) continue;

        r.temporal_index = records.size();
        records.push_back(std::move(r));
        ++rep.accepted;
    }
}

} // namespace

PitchDataset parse_gameday_xml(const std::filesystem::path& path, const FeatureSchema& schema,
                               const GamedayDefaults& defaults, IngestReport* report) {
    pt::ptree tree;
    try {
        pt::read_xml(path.string(), tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("malformed XML in '" + path.string() + "': " + e.message());
    } catch (const pt::ptree_error& e) {
        throw ParseError("cannot read '" + path.string() + "': " + e.what());
    }

    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::vector<PitchRecord> records;
    collect_pitches(tree, schema, {defaults.pitcher, defaults.date}, records, rep);

    if (records.empty())
        throw DataError("no usable <pitch> elements in '" + path.string() + "' (" +
                        std::to_string(rep.rejected) + " skipped)");
    return PitchDataset(schema, std::move(records), path.filename().string());
}

} // namespace datamech
