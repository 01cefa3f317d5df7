#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "datamech/error.hpp"
#include "datamech/ingest.hpp"

#include "csv_reader.hpp"
#include "text_util.hpp"

namespace datamech {

namespace {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
    std::string s = base.string();
    // accept either the bare base or a path ending in one of the two suffixes
    for (const char* known : {".data.csv", ".schema.json"}) {
        if (s.size() > std::strlen(known) && s.ends_with(known)) {
            s.resize(s.size() - std::strlen(known));
            break;
        }
    }
    return std::filesystem::path(s + suffix);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

} // namespace

void save_dataset(const PitchDataset& dataset, const std::filesystem::path& base) {
    ordered_json schema_json;
    schema_json["version"] = dataset.schema().version();
    schema_json["features"] = ordered_json::array();
    for (const auto& f : dataset.schema().features()) {
        schema_json["features"].push_back(
            {{"name", f.name}, {"unit", f.unit}, {"required", f.required}});
    }
    write_file(with_suffix(base, ".schema.json"), schema_json.dump(2) + "\n");

    std::string csv = "pitcher,season,date,temporal_index,pitch_type";
    for (const auto& f : dataset.schema().features()) csv += "," + detail::csv_escape(f.name);
    csv += "\n";
    for (const auto& r : dataset.records()) {
        csv += detail::csv_escape(r.pitcher_id);
        csv += "," + std::to_string(r.season);
        csv += "," + detail::csv_escape(r.game_date);
        csv += "," + std::to_string(r.temporal_index);
        csv += "," + detail::csv_escape(r.pitch_type);
        for (double v : r.values) {
            csv += ",";
            if (std::isfinite(v)) csv += detail::format_double(v);
        }
        csv += "\n";
    }
    write_file(with_suffix(base, ".data.csv"), csv);
}

PitchDataset load_dataset(const std::filesystem::path& base) {
    auto schema_path = with_suffix(base, ".schema.json");
    auto data_path = with_suffix(base, ".data.csv");

    ordered_json schema_json;
    try {
        schema_json = ordered_json::parse(read_file(schema_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad schema JSON in '" + schema_path.string() + "': " + e.what());
    }
    std::string version = schema_json.value("version", std::string());
    if (version != kDatasetFormatVersion)
        throw DataError("dataset '" + base.string() + "' has schema version '" + version +
                        "'; this build reads version '" + kDatasetFormatVersion + "'");
    std::vector<Feature> features;
    for (const auto& f : schema_json.at("features")) {
        features.push_back({f.at("name").get<std::string>(), f.value("unit", std::string()),
                            f.value("required", true)});
    }
    FeatureSchema schema(version, std::move(features));

    auto rows = detail::read_csv_rows(data_path);
    if (rows.empty()) throw ParseError("'" + data_path.string() + "' is empty");
    const std::size_t meta_cols = 5;
    if (rows[0].size() != meta_cols + schema.size())
        throw ParseError("'" + data_path.string() + "' header does not match schema width");

    std::vector<PitchRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != meta_cols + schema.size())
            throw ParseError(data_path.string() + ":" + std::to_string(i + 1) +
                             ": wrong field count");
        PitchRecord r;
        r.pitcher_id = row[0];
        auto season = detail::parse_int(row[1]);
        auto tindex = detail::parse_int(row[3]);
        if (!season || !tindex || *tindex < 0)
            throw ParseError(data_path.string() + ":" + std::to_string(i + 1) + ": bad metadata");
        r.season = static_cast<int>(*season);
        r.game_date = row[2];
        r.temporal_index = static_cast<std::uint64_t>(*tindex);
        r.pitch_type = row[4];
        r.values.reserve(schema.size());
        for (std::size_t j = 0; j < schema.size(); ++j) {
            const std::string& cell = row[meta_cols + j];
            if (cell.empty()) {
                r.values.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            auto v = detail::parse_double(cell);
            if (!v)
                throw ParseError(data_path.string() + ":" + std::to_string(i + 1) +
                                 ": bad numeric '" + cell + "'");
            r.values.push_back(*v);
        }
        records.push_back(std::move(r));
    }
    return PitchDataset(std::move(schema), std::move(records), base.filename().string());
}

} // namespace datamech
