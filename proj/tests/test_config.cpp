/*
   Copyright 2026 The dwq Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <dwq/config.hpp>
#include <dwq/io.hpp>
#include <dwq/params.hpp>

using namespace dwq;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "dwq_test_config";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("presets carry the tabulated ratios", "[config]")
{
    for (auto [name, d, q] : {std::tuple{"XXL", 1e8, 1e-4}, {"XL", 1e6, 1e-3}, {"L", 1e4, 1e-2}}) {
        const auto c = preset(name);
        CHECK(c.well_length == d);
        CHECK_THAT(c.well_frequency / c.trap_frequency, WithinRel(q, 1e-14));
        CHECK(c.start_ratio == 0.1);
        CHECK_FALSE(preset_info(name).derived);
    }
    // desk-scale sets are constructed from eta
    CHECK_THAT(delocalization(preset("M")), WithinRel(100.0, 1e-12));
    CHECK_THAT(delocalization(preset("S")), WithinRel(10.0, 1e-12));
    CHECK_THAT(squeezing_s0(delocalization(preset("XS"))), WithinRel(1.0, 1e-12));
    CHECK(preset_info("M").derived);
    CHECK_THROWS_AS(preset("XXXL"), DomainError);
}

TEST_CASE("validation rejects unphysical parameters", "[config]")
{
    auto c = preset("L");
    c.start_ratio = 1.5;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = preset("L");
    c.mean_phonons = -1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = preset("L");
    c.well_frequency = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);

    CHECK(preset("L").regime_warnings().empty());
    CHECK_FALSE(preset("XS").regime_warnings().empty());
}

TEST_CASE("experiment documents convert units", "[config][io]")
{
    const json doc = {
        {"label", "unit-test"},
        {"trap_frequency", {{"value", 100e3}, {"unit", "Hz"}}},
        {"well_frequency", {{"value", 1e3}, {"unit", "Hz"}}},
        {"mass", {{"value", 1e-18}, {"unit", "kg"}}},
        {"well_length", {{"value", 1e-7}, {"unit", "m"}}},
        {"start_position", {{"value", 0.1}, {"unit", "d"}}},
        {"decoherence_rate", {{"value", 2.0 * std::numbers::pi * 100e3 * 1e-8}, {"unit", "1/s"}}},
        {"timing_imprecision", {{"value", 1e-6}, {"unit", "s"}}},
    };
    const auto c = io::parse_experiment(doc).config;
    const double x_zpf = std::sqrt(constants::hbar / (2.0 * 1e-18 * c.trap_frequency));
    CHECK_THAT(c.frequency_ratio(), WithinRel(100.0, 1e-12));
    CHECK_THAT(c.well_length, WithinRel(1e-7 / x_zpf, 1e-12));
    CHECK_THAT(c.decoherence_rate, WithinRel(1e-8, 1e-12));
    CHECK_THAT(c.timing_imprecision, WithinRel(1e-6 * 2.0 * std::numbers::pi * 1e3, 1e-12));
}

TEST_CASE("preset documents accept overrides", "[config][io]")
{
    const auto c = io::parse_experiment({{"preset", "L"}, {"mean_phonons", {{"value", 3}, {"unit", "1"}}}}).config;
    CHECK(c.well_length == 1e4);
    CHECK(c.mean_phonons == 3.0);
}

TEST_CASE("schema violations are reported as such", "[config][io]")
{
    CHECK_THROWS_AS(io::parse_experiment(json::array()), SchemaError);
    CHECK_THROWS_AS(io::parse_experiment({{"preset", "L"}, {"colour", "red"}}), SchemaError);
    CHECK_THROWS_AS(io::parse_experiment({{"preset", "L"}, {"well_length", 3.0}}), SchemaError);
    CHECK_THROWS_AS(io::parse_experiment({{"preset", "L"}, {"well_length", {{"value", 3.0}, {"unit", "furlong"}}}}),
                    SchemaError);
    // metres need a mass to convert
    CHECK_THROWS_AS(io::parse_experiment({{"preset", "L"}, {"well_length", {{"value", 1e-7}, {"unit", "m"}}}}),
                    SchemaError);
    // domain errors surface as schema errors at the document boundary
    CHECK_THROWS_AS(io::parse_experiment({{"preset", "L"}, {"start_position", {{"value", 2.0}, {"unit", "d"}}}}),
                    SchemaError);
    CHECK_THROWS_AS(io::parse_experiment({{"well_length", {{"value", 1e4}, {"unit", "x_zpf"}}}}), SchemaError);
}

TEST_CASE("bundled configs parse", "[config][io]")
{
    for (const char* name : {"XXL", "XL", "L", "M", "S", "XS", "L_silica"}) {
        const auto path = std::filesystem::path(DWQ_SOURCE_DIR) / "configs" / (std::string(name) + ".json");
        INFO(path);
        const auto doc = io::load_experiment(path);
        CHECK_NOTHROW(doc.config.validate());
    }
    // the explicit L document describes the same experiment as the preset
    const auto l = io::load_experiment(std::filesystem::path(DWQ_SOURCE_DIR) / "configs" / "L.json").config;
    CHECK_THAT(l.frequency_ratio(), WithinRel(preset("L").frequency_ratio(), 1e-12));
    CHECK(l.well_length == preset("L").well_length);
}

TEST_CASE("config hash identifies the resolved experiment", "[io]")
{
    const auto a = preset("M");
    auto b = a;
    CHECK(io::config_hash(a) == io::config_hash(b));
    b.mean_phonons = 1.0;
    CHECK(io::config_hash(a) != io::config_hash(b));
    CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("CSV rows are printed reproducibly", "[io]")
{
    const auto path = scratch("rows.csv");
    {
        io::CsvWriter csv(path, {"a", "b"});
        csv.row({1.0, -0.0});
        csv.row({0.1, 1e-300});
        CHECK_THROWS_AS(csv.row({1.0}), Error);
    }
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == "a,b\n1,0\n0.1,1e-300\n");
}
