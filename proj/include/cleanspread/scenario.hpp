#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cleanspread/grid.hpp"
#include "cleanspread/mc_pricer.hpp"
#include "cleanspread/model.hpp"
#include "cleanspread/reduced_form.hpp"

namespace cleanspread {

struct SweepAxes {
    std::vector<double> case1_caps{2.0e8, 1.8e8, 1.6e8, 1.4e8, 1.2e8};          // tCO2
    std::vector<double> case2_caps{1.0e8, 1.4e8, 1.8e8};                        // tCO2
    std::vector<double> case2_gas_initial{2.0, 3.0, 4.0, 5.0, 6.0, 7.38905609893065, 9.0, 11.0, 13.0};  // EUR/MMBtu
    std::vector<double> case4_caps;  // tCO2; defaults to 1e8, 1.05e8, ..., 1.95e8

    SweepAxes();
    bool operator==(const SweepAxes&) const = default;
};

struct ScenarioConfig {
    ModelParams model;
    GridSpec grid;
    SimulationConfig mc;
    Variant variant = Variant::structural;
    ReducedParams reduced;
    std::vector<PlantSpec> plants = default_plants();
    SweepAxes sweeps;
    std::string output_dir = "out";

};

nlohmann::json to_json(const ScenarioConfig& config);
/// Missing keys take their defaults; unknown keys and type mismatches are ConfigErrors.
ScenarioConfig config_from_json(const nlohmann::json& j);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Applies "dotted.path=value" to a config document. The value is read as JSON when it
/// parses, otherwise as a string. The path must name an existing key.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Rejects invalid parameters, Jacobi-containment violations and step-size violations
/// before any compute. Throws ConfigError naming the violated bound.
void validate_config(const ScenarioConfig& config);

/// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const ScenarioConfig& config);
/// FNV-1a over the mesh nodes and time step built from the config.
std::uint64_t grid_hash(const ScenarioConfig& config);

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Fixed numeric format of all CSV output.
std::string format_number(double v);

}  // namespace cleanspread
