#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cleanspread/case_studies.hpp"
#include "cleanspread/errors.hpp"
#include "cleanspread/scenario.hpp"

using namespace cleanspread;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny() {
    ScenarioConfig c;
    c.grid.n_d = 7;
    c.grid.n_c = c.grid.n_g = 6;
    c.grid.n_e = 12;
    c.grid.n_t = 40;
    c.mc.n_paths = 200;
    c.mc.record_stride = 5;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "cleanspread_scenario" / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    const ScenarioConfig c;
    EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
    ScenarioConfig d = tiny();
    d.reduced.emissions_initial = 1.2e8;
    d.plants.push_back({"x", Fuel::coal, 4.0, 1.2, 3.5});
    d.model.demand.harmonics.push_back({200.0, 52.0});
    d.variant = Variant::gbm_emissions;
    EXPECT_EQ(to_json(config_from_json(to_json(d))), to_json(d));
}

TEST(Config, MissingKeysTakeDefaults) {
    const ScenarioConfig c = config_from_json(nlohmann::json::parse(R"({"cap": {"cap": 1.6e8}, "mc": {"seed": 5}})"));
    EXPECT_EQ(c.model.cap.cap, 1.6e8);
    EXPECT_EQ(c.model.cap.penalty, 100.0);
    EXPECT_EQ(c.mc.seed, 5u);
    EXPECT_EQ(c.plants.size(), 4u);
    EXPECT_EQ(to_json(config_from_json(nlohmann::json::object())), to_json(ScenarioConfig{}));
}

TEST(Config, CheckedInBaseCaseIsTheDefault) {
    EXPECT_EQ(to_json(load_config(fs::path(CLEANSPREAD_SOURCE_DIR) / "config/base_case.json")), to_json(ScenarioConfig{}));
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"cap": {"capp": 1}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"grid": {"n_d": "many"}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"variant": "heston"})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"grid": {"precision": "f16"}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"plants": [{"id": "a", "fuel": "oil", "heat_rate": 1, "emissions_rate": 1}]})")),
                 ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, DottedOverrides) {
    nlohmann::json doc = nlohmann::json::object();
    apply_override(doc, "cap.cap=1.2e8");
    apply_override(doc, "plants.1.fixed_cost=2.5");
    apply_override(doc, "variant=tax");
    apply_override(doc, "sweeps.case1_caps=[2e8,1.2e8]");
    const ScenarioConfig c = config_from_json(doc);
    EXPECT_EQ(c.model.cap.cap, 1.2e8);
    EXPECT_EQ(c.plants[1].fixed_cost, 2.5);
    EXPECT_EQ(c.variant, Variant::tax);
    EXPECT_EQ(c.sweeps.case1_caps.size(), 2u);
    EXPECT_THROW(apply_override(doc, "cap.nope=1"), ConfigError);
    EXPECT_THROW(apply_override(doc, "plants.9.id=x"), ConfigError);
    EXPECT_THROW(apply_override(doc, "cap.cap.x=1"), ConfigError);
    EXPECT_THROW(apply_override(doc, "novalue"), ConfigError);
}

TEST(Config, ValidationRejectsBeforeCompute) {
    EXPECT_NO_THROW(validate_config(ScenarioConfig{}));
    ScenarioConfig c;
    c.model.demand.vol_scale = 0.3;  // Jacobi containment
    EXPECT_THROW(validate_config(c), ConfigError);
    c = ScenarioConfig{};
    c.grid.n_t = 20;  // advection step bound
    try {
        validate_config(c);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("advection"), std::string::npos) << e.what();
    }
    c = ScenarioConfig{};
    c.plants[0].heat_rate = -1;
    EXPECT_THROW(validate_config(c), ConfigError);
    c = ScenarioConfig{};
    c.reduced.rho_ac = -0.95;
    c.reduced.rho_ag = 0.95;
    EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(Config, HashesTrackContent) {
    ScenarioConfig a, b;
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(grid_hash(a), grid_hash(b));
    b.mc.seed = 1;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(grid_hash(a), grid_hash(b));
    b.grid.n_e = 41;
    EXPECT_NE(grid_hash(a), grid_hash(b));
}

TEST(FormatNumber, Fixed) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.4e8), "140000000");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
}

TEST(Pipeline, RerunIsByteIdenticalAndManifestRoundTrips) {
    const ScenarioConfig c = tiny();
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    const CaseStudyReport ra = run_price(c);
    ASSERT_FALSE(ra.failure) << *ra.failure;
    emit_outputs(ra, c, a);
    emit_outputs(run_price(c), c, b);
    for (const char* f : {"spreads.csv", "plant_values.csv", "a0.csv", "checks.csv", "manifest.json"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    EXPECT_EQ(to_json(config_from_json(manifest.at("config"))), to_json(c));
    EXPECT_EQ(manifest.at("status"), "ok");
    EXPECT_EQ(manifest.at("seed").get<std::uint64_t>(), c.mc.seed);
    EXPECT_FALSE(manifest.at("surfaces").empty());
    // one row per plant and maturity
    EXPECT_EQ(ra.table("spreads").rows.size(), 4u * 73);
    EXPECT_EQ(ra.table("spreads").columns[0], "tau");
}

TEST(Pipeline, EmptyPlantListGivesHeaderOnlyCsv) {
    ScenarioConfig c = tiny();
    c.plants.clear();
    c.variant = Variant::tax;
    const fs::path d = scratch("empty");
    const CaseStudyReport r = run_price(c);
    ASSERT_FALSE(r.failure);
    emit_outputs(r, c, d);
    EXPECT_EQ(slurp(d / "spreads.csv"), "tau,value,standard_error,plant,variant,cap,a0,tau_offset\n");
}

TEST(Pipeline, FailuresCarryExitCodesAndPartialManifest) {
    ScenarioConfig c = tiny();
    const CaseStudyReport bad_id = run_case_study("V", c);
    ASSERT_TRUE(bad_id.failure);
    EXPECT_EQ(bad_id.exit_code, 2);
    c.model.demand.vol_scale = 0.4;
    const CaseStudyReport invalid = run_solve(c);
    EXPECT_EQ(invalid.exit_code, 2);
    const fs::path d = scratch("failed");
    emit_outputs(invalid, c, d);
    const auto manifest = nlohmann::json::parse(slurp(d / "manifest.json"));
    EXPECT_EQ(manifest.at("status"), "failed");
    EXPECT_TRUE(manifest.contains("error"));
}

TEST(Pipeline, SolveWritesSurface) {
    const ScenarioConfig c = tiny();
    const fs::path d = scratch("solve");
    fs::create_directories(d);
    const CaseStudyReport r = run_solve(c, d / "surface.bin");
    ASSERT_FALSE(r.failure) << *r.failure;
    EXPECT_TRUE(fs::exists(d / "surface.bin"));
    EXPECT_TRUE(fs::exists(d / "surface.bin.json"));
    EXPECT_EQ(r.surfaces.size(), 1u);
}

TEST(Expectations, CheckedInFileLoads) {
    const Expectations x = load_expectations(fs::path(CLEANSPREAD_SOURCE_DIR) / "config/expectations.json");
    EXPECT_EQ(x.base_a0_min, 40.0);
    EXPECT_EQ(x.reference_a0.size(), 5u);
    EXPECT_THROW(load_expectations("/nonexistent.json"), ConfigError);
}
