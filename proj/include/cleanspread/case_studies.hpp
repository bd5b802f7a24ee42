#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cleanspread/scenario.hpp"

namespace cleanspread {

/// A CSV-shaped result table; cells are preformatted with format_number.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

struct Check {
    std::string name;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false;
};

/// Tolerances for the report checks, read from a checked-in expectations file.
struct Expectations {
    double base_a0_min = 40.0;
    double base_a0_max = 65.0;
    std::vector<std::pair<double, double>> reference_a0;  // (cap, A₀)
    double a0_relative_tolerance = 0.4;
    double a0_absolute_tolerance = 10.0;
    double martingale_sigmas = 3.0;
    double seasonality_sigmas = 3.0;
    double profit_equality_sigmas = 3.0;
    double early_window_end = 0.25;  // yr
    double late_window_days = 7.0;

    Expectations();
};

Expectations load_expectations(const std::filesystem::path& path);

struct CaseStudyReport {
    std::string id;
    std::vector<Table> tables;
    std::vector<Check> checks;
    nlohmann::json diagnostics = nlohmann::json::object();
    std::vector<std::pair<std::string, std::string>> surfaces;  // label, checksum
    std::optional<std::string> failure;
    int exit_code = 0;  // 2 validation, 3 numerical, 1 other

    const Table& table(const std::string& name) const;
    const Check* check(const std::string& name) const;
};

/// Solves the configured cap. Writes the surface container when `surface_path` is set.
CaseStudyReport run_solve(const ScenarioConfig& config, const std::optional<std::filesystem::path>& surface_path = {});

/// Solve → simulate (config.variant) → spread quotes for every plant over the daily maturity strip.
CaseStudyReport run_price(const ScenarioConfig& config, const Expectations& expectations = {});

/// id ∈ {I, II, III, IV}. Sub-run failures end the run; the partial report carries `failure`.
CaseStudyReport run_case_study(const std::string& id, const ScenarioConfig& config,
                               const Expectations& expectations = {});

/// One CSV per table, checks.csv and manifest.json (config, hashes, seed, surface checksums,
/// diagnostics). Throws std::runtime_error on I/O failure.
void emit_outputs(const CaseStudyReport& report, const ScenarioConfig& config, const std::filesystem::path& dir);

/// Per-path sums over recorded steps of the sector profit rate (EUR/h).
std::vector<double> per_path_profit_totals(const PathSet& paths, const ModelParams& model);

/// Mean spread value per calendar month of maturity (12 buckets) with per-path standard errors.
std::vector<Estimate> monthly_profile(const PathSet& paths, const PlantSpec& plant, double rate);

}  // namespace cleanspread
