#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "datamech/ingest.hpp"

#include "generators.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using testsupport::read_text;
using testsupport::TempDir;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(DATAMECH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

// Two pitchers x two seasons of clustered FF/CU pitches over the default
// 21-feature schema, written as an ingestable CSV.
void write_fixture_csv(const fs::path& path, std::uint32_t seed) {
    auto schema = datamech::FeatureSchema::default21();
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::string csv;
    for (const auto& f : schema.features()) csv += f.name + ",";
    csv += "pitch_type,pitcher,date\n";
    const char* pitchers[] = {"kershaw", "verlander"};
    for (int season = 2013; season <= 2014; ++season) {
        for (const char* who : pitchers) {
            for (int i = 0; i < 40; ++i) {
                bool fastball = i % 2 == 0;
                double base = fastball ? 93.0 : 78.0;
                for (std::size_t c = 0; c < schema.size(); ++c) {
                    double center = base + static_cast<double>(c % 7) * 3.0 +
                                    (i % 4 == 0 ? 4.0 : 0.0);
                    csv += std::to_string(center + noise(rng)) + ",";
                }
                csv += fastball ? "FF," : "CU,";
                csv += who;
                csv += ",";
                csv += std::to_string(season) + "-06-" + (i % 9 < 4 ? "0" : "1") +
                       std::to_string(1 + i % 5) + "\n";
            }
        }
    }
    testsupport::write_text(path, csv);
}

} // namespace

TEST_CASE("cli pipeline end to end") {
    TempDir tmp;
    auto csv = tmp / "pitches.csv";
    write_fixture_csv(csv, 7);
    auto out = (tmp / "out").string();

    REQUIRE(run("ingest --input " + csv.string() + " --name fixture --out " + out) == 0);
    CHECK(fs::exists(tmp / "out" / "fixture.data.csv"));
    CHECK(fs::exists(tmp / "out" / "fixture.schema.json"));
    CHECK(fs::exists(tmp / "out" / "run.manifest.json"));

    std::string dataset = (tmp / "out" / "fixture").string();
    REQUIRE(run("mce --dataset " + dataset + " --out " + out) == 0);
    for (const char* stem : {"kershaw-2013", "kershaw-2014", "verlander-2013",
                             "verlander-2014"}) {
        CHECK(fs::exists(tmp / "out" / (std::string(stem) + ".mce.json")));
        CHECK(fs::exists(tmp / "out" / (std::string(stem) + ".mce.csv")));
        CHECK(fs::exists(tmp / "out" / (std::string(stem) + ".mce.svg")));
    }

    REQUIRE(run("dm --mce " + out + " --features universality11 --out " + out) == 0);
    CHECK(fs::exists(tmp / "out" / "systemic.coupled.json"));
    CHECK(fs::exists(tmp / "out" / "systemic.svg"));

    REQUIRE(run("subtypes --dataset " + dataset +
                " --pitcher kershaw --pitch-type FF --baseline-seasons 2013 --out " + out) ==
            0);
    CHECK(fs::exists(tmp / "out" / "kershaw-FF.subtypes.json"));
    CHECK(fs::exists(tmp / "out" / "kershaw-FF.likelihood.csv"));
    CHECK(fs::exists(tmp / "out" / "kershaw-FF.likelihood.svg"));
    CHECK(fs::exists(tmp / "out" / "kershaw-FF.pitches.svg"));

    REQUIRE(run("report --dataset " + dataset + " --mce " +
                (tmp / "out" / "kershaw-2013.mce.json").string() +
                " --focus-season 2014 --baseline-seasons 2013 --out " + out) == 0);
    CHECK(fs::exists(tmp / "out" / "universality.json"));
    CHECK(fs::exists(tmp / "out" / "scatter.json"));

    // every command leaves a manifest naming its outputs
    auto manifest = read_text(tmp / "out" / "run.manifest.json");
    CHECK(manifest.find("\"command\": \"report\"") != std::string::npos);
    CHECK(manifest.find("universality.json") != std::string::npos);
    CHECK(manifest.find("config_hash") != std::string::npos);
}

TEST_CASE("cli runs are deterministic") {
    TempDir tmp;
    auto csv = tmp / "pitches.csv";
    write_fixture_csv(csv, 11);
    auto out1 = (tmp / "one").string();
    auto out2 = (tmp / "two").string();

    REQUIRE(run("ingest --input " + csv.string() + " --name d --out " + out1) == 0);
    REQUIRE(run("ingest --input " + csv.string() + " --name d --out " + out2) == 0);
    CHECK(read_text(tmp / "one" / "d.data.csv") == read_text(tmp / "two" / "d.data.csv"));
    CHECK(read_text(tmp / "one" / "run.manifest.json") ==
          read_text(tmp / "two" / "run.manifest.json"));

    std::string d1 = (tmp / "one" / "d").string();
    REQUIRE(run("mce --dataset " + d1 + " --pitcher kershaw --season 2013 --out " + out1) == 0);
    auto first = read_text(tmp / "one" / "kershaw-2013.mce.json");
    auto first_svg = read_text(tmp / "one" / "kershaw-2013.mce.svg");
    REQUIRE(run("mce --dataset " + d1 + " --pitcher kershaw --season 2013 --out " + out1) == 0);
    CHECK(read_text(tmp / "one" / "kershaw-2013.mce.json") == first);
    CHECK(read_text(tmp / "one" / "kershaw-2013.mce.svg") == first_svg);
}

TEST_CASE("cli exit codes distinguish usage, data and success") {
    TempDir tmp;
    CHECK(run("no-such-command") == 1);
    CHECK(run("mce") == 1);                                         // missing --dataset
    CHECK(run("mce --dataset " + (tmp / "missing").string()) == 2); // no such dataset
    CHECK(run("--help") == 0);

    auto csv = tmp / "pitches.csv";
    write_fixture_csv(csv, 3);
    auto out = (tmp / "out").string();
    REQUIRE(run("ingest --input " + csv.string() + " --name d --out " + out) == 0);
    // filter that matches nothing -> data error
    CHECK(run("mce --dataset " + (tmp / "out" / "d").string() +
              " --pitcher nobody --out " + out) == 2);
    // bad feature name -> usage error
    CHECK(run("mce --dataset " + (tmp / "out" / "d").string() +
              " --features bogus_feature,start_speed --out " + out) == 1);
}

TEST_CASE("cli config file applies and flags override it") {
    TempDir tmp;
    auto csv = tmp / "pitches.csv";
    write_fixture_csv(csv, 5);
    auto out = (tmp / "out").string();
    REQUIRE(run("ingest --input " + csv.string() + " --name d --out " + out) == 0);

    testsupport::write_text(tmp / "config.json",
                            "{\"features\": \"universality11\", \"histogram\": {\"max_bins\": 4},"
                            " \"dm\": {\"linkage\": \"complete\"}}");
    REQUIRE(run("mce --dataset " + (tmp / "out" / "d").string() + " --config " +
                (tmp / "config.json").string() + " --pitcher kershaw --season 2013 --out " +
                out) == 0);
    auto mce_json = read_text(tmp / "out" / "kershaw-2013.mce.json");
    // 11 features selected by the config
    CHECK(testsupport::count_occurrences(mce_json, "\"") > 0);
    auto manifest = read_text(tmp / "out" / "run.manifest.json");
    CHECK(manifest.find("\"features\": \"universality11\"") != std::string::npos);
    CHECK(manifest.find("\"max_bins\": 4") != std::string::npos);
    CHECK(manifest.find("\"linkage\": \"complete\"") != std::string::npos);
}
