#include <cmath>
#include <limits>
#include <unordered_map>

#include "datamech/error.hpp"
#include "datamech/ingest.hpp"

#include "csv_reader.hpp"
#include "text_util.hpp"

namespace datamech {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

const std::string& ColumnMapping::resolve(const std::string& name) const {
    auto it = columns.find(name);
    return it == columns.end() ? name : it->second;
}

void IngestReport::reject(std::string message) {
    ++rejected;
    messages.push_back(std::move(message));
}

PitchDataset parse_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                       const ColumnMapping& mapping, IngestReport* report) {
    auto rows = detail::read_csv_rows(path);
    if (rows.empty()) throw ParseError("'" + path.string() + "' has no header row");

    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header.emplace(rows[0][i], i);

    auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = header.find(mapping.resolve(name));
        if (it == header.end()) return std::nullopt;
        return it->second;
    };
    auto require_column = [&](const std::string& name) {
        auto col = column_of(name);
        if (!col)
            throw SchemaError("required column '" + mapping.resolve(name) + "' missing from '" +
                              path.string() + "'");
        return *col;
    };

    std::vector<std::optional<std::size_t>> feature_cols;
    feature_cols.reserve(schema.size());
    for (const auto& f : schema.features()) {
        auto col = column_of(f.name);
        if (f.required && !col)
            throw SchemaError("required column '" + mapping.resolve(f.name) + "' missing from '" +
                              path.string() + "'");
        feature_cols.push_back(col);
    }
    std::size_t pitcher_col = require_column("pitcher");
    std::size_t date_col = require_column("date");
    std::size_t type_col = require_column("pitch_type");
    auto season_col = column_of("season");

    IngestReport local;
    IngestReport& rep = report ? *report : local;
    std::vector<PitchRecord> records;

    for (std::size_t rown = 1; rown < rows.size(); ++rown) {
        const auto& row = rows[rown];
        if (row.size() == 1 && row[0].empty()) continue; // trailing blank line
        auto cell = [&](std::size_t col) -> const std::string& {
            static const std::string empty;
            return col < row.size() ? row[col] : empty;
        };
        auto fail = [&](const std::string& why) {
            rep.reject(path.filename().string() + ":" + std::to_string(rown + 1) + ": " + why);
        };

        PitchRecord r;
        r.pitcher_id = cell(pitcher_col);
        r.game_date = cell(date_col);
        r.pitch_type = cell(type_col);
        if (r.pitcher_id.empty()) {
            fail("empty pitcher");
            continue;
        }
        auto year = detail::parse_iso_date_year(r.game_date);
        if (!year) {
            fail("bad date '" + r.game_date + "'");
            continue;
        }
        r.season = *year;
        if (season_col) {
            auto season = detail::parse_int(cell(*season_col));
            if (!season) {
                fail("bad season '" + cell(*season_col) + "'");
                continue;
            }
            r.season = static_cast<int>(*season);
        }
        if (r.pitch_type.empty()) {
            fail("empty pitch_type");
            continue;
        }

        r.values.assign(schema.size(), kNaN);
        bool ok = true;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const auto& feature = schema.at(i);
            const std::string& raw = feature_cols[i] ? cell(*feature_cols[i]) : std::string();
            if (raw.empty()) {
                if (feature.required) {
                    fail("missing required value for '" + feature.name + "'");
                    ok = false;
                    break;
                }
                continue;
            }
            auto value = detail::parse_double(raw);
            if (!value || !std::isfinite(*value)) {
                if (feature.required) {
                    fail("unparseable value '" + raw + "' for '" + feature.name + "'");
                    ok = false;
                    break;
                }
                continue; // optional bad cell degrades to NaN
            }
            r.values[i] = *value;
        }
        if (!ok) continue;

        r.temporal_index = records.size(); // file order; ingest reassigns globally
        records.push_back(std::move(r));
        ++rep.accepted;
    }

    if (records.empty())
        throw DataError("no usable rows in '" + path.string() + "' (" +
                        std::to_string(rep.rejected) + " rejected)");
    return PitchDataset(schema, std::move(records), path.filename().string());
}

} // namespace datamech
