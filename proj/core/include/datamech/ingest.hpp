#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "datamech/dataset.hpp"

namespace datamech {

/// Remaps input column/attribute names. Keys are schema feature names or the
/// metadata names "pitcher", "date", "season", "pitch_type"; values are the
/// names as they appear in the file. Unmapped names are looked up verbatim.
struct ColumnMapping {
    std::map<std::string, std::string> columns;

    const std::string& resolve(const std::string& name) const;
};

/// Per-file ingest outcome. Rejected rows are counted, never fatal.
struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<std::string> messages;

    void reject(std::string message);
};

/// Parses a header-rowed CSV of pitches. Metadata columns: pitcher, date
/// (ISO-8601), pitch_type, optional season (defaults to the date's year).
///
/// A row with an unparseable or missing value in a required feature or in any
/// metadata column is rejected and logged in `report`; optional features parse
/// to NaN when blank. Throws SchemaError if a required column is absent from
/// the header, ParseError on structural garbage, DataError if no row survives.
PitchDataset parse_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                       const ColumnMapping& mapping = {}, IngestReport* report = nullptr);

/// Fallback metadata for Gameday files whose <pitch> elements do not carry
/// pitcher/date attributes (the stock inning_all.xml keeps them on ancestors
/// or in the directory name).
struct GamedayDefaults {
    std::string pitcher;
    std::string date;
};

/// Parses MLB Gameday inning XML: every <pitch> element, at any depth, with
/// feature attributes matching schema names. A <pitch> missing a required
/// attribute is skipped and logged. pitcher is taken from the pitch's own
/// attribute, else the enclosing <atbat pitcher=...>, else `defaults`; date
/// likewise from pitch/game attributes or `defaults`.
/// Throws ParseError on malformed XML, DataError if nothing survives.
PitchDataset parse_gameday_xml(const std::filesystem::path& path, const FeatureSchema& schema,
                               const GamedayDefaults& defaults = {},
                               IngestReport* report = nullptr);

/// Persists as `<base>.data.csv` + `<base>.schema.json`. Writes are
/// deterministic: the same dataset always produces byte-identical files.
void save_dataset(const PitchDataset& dataset, const std::filesystem::path& base);

/// Loads a dataset written by save_dataset. Round-trips field-for-field.
/// Throws DataError if the stored schema version is not supported, IoError if
/// either file is missing.
PitchDataset load_dataset(const std::filesystem::path& base);

/// Dataset store version accepted by load_dataset.
inline constexpr const char* kDatasetFormatVersion = "1";

} // namespace datamech
