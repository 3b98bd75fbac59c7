#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bplus/cli.hpp"

using namespace bplus;
using nlohmann::json;

TEST_CASE("parse_config fills defaults and echoes a stable object") {
    json minimal = json::object();
    json full = parse_config("lat", minimal);
    CHECK(full.at("preset") == "dipolar3q");
    CHECK(full.at("noise").at("variance").get<double>() == doctest::Approx(0.1));
    CHECK(full.at("noise").at("realizations").get<int>() == 100);

    // Round trip: re-parsing the echo gives an identical hash.
    json again = parse_config("lat", full);
    CHECK(config_hash(again) == config_hash(full));
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_config("lat", json{{"noise", json{{"varianec", 0.2}}}});
        FAIL("expected a config error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("lat.noise.varianec") != std::string::npos);
    }
}

TEST_CASE("schema violations name the offending field") {
    CHECK_THROWS_WITH_AS(parse_config("lat", json{{"noise", json{{"variance", -0.5}}}}),
                         "config: 'lat.noise.variance' must be >= 0", std::invalid_argument);
    CHECK_THROWS_AS(parse_config("retro", json{{"gamma", -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("dephasing", json{{"modes", json::array({json{{"omega", -1.0}, {"g", 0.1}}})}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config("bplus", json{{"frame", "bogus"}}), std::invalid_argument);
}

TEST_CASE("config hash is insensitive to key order") {
    json a = json::parse(R"({"menu":"full","probe_time":1.0})");
    json b = json::parse(R"({"probe_time":1.0,"menu":"full"})");
    CHECK(config_hash(parse_config("lat", a)) == config_hash(parse_config("lat", b)));
}

TEST_CASE("execute is deterministic across parallelism degrees") {
    RunConfig rc1;
    rc1.subcommand = "retro";
    rc1.seed = 99;
    rc1.jobs = 1;
    json config = parse_config("retro", json{{"trajectories", 2000}, {"horizon", 3.0}});
    RunConfig rc8 = rc1;
    rc8.jobs = 8;
    auto r1 = execute(rc1, config);
    auto r8 = execute(rc8, config);
    REQUIRE(r1.size() == r8.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
        CHECK(r1[i].outputs.dump() == r8[i].outputs.dump());
}

TEST_CASE("emit_results writes records, tables and the config echo") {
    namespace fs = std::filesystem;
    RunConfig rc;
    rc.subcommand = "markov";
    rc.out_dir = (fs::temp_directory_path() / "bpt_test_emit").string();
    fs::remove_all(rc.out_dir);
    json config = parse_config("markov", json{{"demo", "revival"}});
    auto records = execute(rc, config);
    EmittedFiles files = emit_results(rc, config, records);
    CHECK(fs::exists(files.records_path));
    CHECK(fs::exists(files.config_echo_path));
    // One JSON object per line.
    std::ifstream in(files.records_path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        json parsed = json::parse(line);
        CHECK(parsed.contains("run_id"));
        CHECK_FALSE(parsed.contains("duration_s"));  // timing lives in the log
        ++lines;
    }
    CHECK(lines == static_cast<int>(records.size()));

    SUBCASE("empty record lists still produce a valid file") {
        EmittedFiles empty = emit_results(rc, config, {});
        CHECK(fs::exists(empty.records_path));
        CHECK(fs::file_size(empty.records_path) == 0);
    }
    fs::remove_all(rc.out_dir);
}

TEST_CASE("execute rejects unknown subcommands") {
    RunConfig rc;
    rc.subcommand = "nope";
    CHECK_THROWS_AS(execute(rc, json::object()), std::invalid_argument);
}
