#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cleanspread/allowance_solver.hpp"
#include "cleanspread/model.hpp"
#include "cleanspread/reduced_form.hpp"

namespace cleanspread {

/// Clean spread contract: (P − h S^fuel − e A − K)⁺ per MWh.
struct PlantSpec {
    std::string id;
    Fuel fuel = Fuel::gas;
    double heat_rate = 0.0;       // MMBtu/MWh
    double emissions_rate = 0.0;  // tCO2/MWh
    double fixed_cost = 0.0;      // EUR/MWh

    void validate() const;
    bool operator==(const PlantSpec&) const = default;
};

/// High/low efficiency coal and gas plants of the base case.
std::vector<PlantSpec> default_plants();

/// How the allowance price is produced along a path.
struct AllowanceModel {
    Variant variant = Variant::structural;
    const AllowanceSurface* surface = nullptr;  // structural
    double initial_allowance = 0.0;             // gbm_allowance and tax: A₀
    double emissions_drift = 0.0;               // gbm_emissions: μ_E
    double emissions_initial = 0.0;             // gbm_emissions: E₀ʳ
    ReducedParams reduced;
};

struct SimulationConfig {
    int n_paths = 10000;
    int n_steps = 365;
    std::uint64_t seed = 20240611;
    int record_stride = 1;  // the final step is always recorded
};

/// Simulated (D, S_c, S_g, E, A, P) on recorded steps, stored step-major.
struct PathSet {
    int n_paths = 0;
    int n_steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    Variant variant = Variant::structural;
    std::vector<int> steps;  // recorded step indices
    std::vector<double> demand, coal, gas, emissions, allowance, price;
    std::vector<double> proxy;  // GBM emissions proxy (gbm_emissions only)
    std::size_t pre_reflection_hits = 0;  // demand steps that left [0, x̄] before reflection

    std::size_t records() const { return steps.size(); }
    std::size_t at(std::size_t rec, std::size_t path) const { return rec * static_cast<std::size_t>(n_paths) + path; }
    double time(std::size_t rec) const { return steps[rec] * dt; }
    double fuel(Fuel f, std::size_t rec, std::size_t path) const {
        return f == Fuel::coal ? coal[at(rec, path)] : gas[at(rec, path)];
    }
    /// Record whose time is closest to t.
    std::size_t nearest_record(double t) const;
};

/// Parallel over paths; each path owns its RNG stream, so results do not depend on threads.
PathSet simulate(const ModelParams& model, const AllowanceModel& allowance, const SimulationConfig& config);
/// Serial loop over the same per-path kernel, kept for testing.
PathSet simulate_reference(const ModelParams& model, const AllowanceModel& allowance, const SimulationConfig& config);

/// P = b(D, A, S) from the market stack.
double electricity_price(const StackParams& stack, const MarketState& state);

struct Estimate {
    double mean = 0.0;
    std::optional<double> standard_error;  // none for fewer than two samples
};

/// Sample mean and sqrt(Σ (v_i − mean)² / (n (n − 1))).
Estimate mean_and_standard_error(std::span<const double> samples);

struct SpreadQuote {
    std::string plant;
    double maturity = 0.0;         // snapped to the recorded grid
    double maturity_offset = 0.0;  // snapped minus requested
    double value = 0.0;
    std::optional<double> standard_error;
};

/// Discounted clean spread values per path at maturity τ seen from t.
std::vector<double> discounted_payoffs(const PathSet& paths, const PlantSpec& plant, double rate, double tau,
                                       double t = 0.0);
SpreadQuote spread_option(const PathSet& paths, const PlantSpec& plant, double rate, double tau, double t = 0.0);

/// Sum of spread values over a maturity set (the plant's optionality); the standard error is that of
/// the per-path sums.
SpreadQuote plant_value(const PathSet& paths, const PlantSpec& plant, double rate, std::span<const double> maturities);

/// Recorded times in (0, T], i.e. the daily maturity strip.
std::vector<double> maturity_strip(const PathSet& paths);

struct ProfitSeries {
    std::vector<double> time;
    std::vector<double> mean;            // EUR/h, expected instantaneous sector profit
    std::vector<double> standard_error;  // EUR/h
    double total = 0.0;                  // Σ over recorded steps
    double discounted_total = 0.0;       // Σ e^{-r t_k} mean_k
};

ProfitSeries sector_profits(const PathSet& paths, const ModelParams& model);

/// P·D − ∫_0^D b(x) dx, the revenue-minus-cost form of the sector profit rate.
double revenue_minus_cost(const StackParams& stack, double demand, const PricePoint& point);

struct MartingaleCheck {
    double discounted_mean = 0.0;     // e^{-rT} mean φ(E_T)
    double standard_error = 0.0;
    double mass_near_cap = 0.0;       // fraction of paths with |E_T − Γ| < Δe
    /// e^{-rT} mean of φ sampled on the e-nodes and interpolated linearly, i.e. the terminal
    /// data the mesh actually carries.
    double sampled_mean = 0.0;
};

MartingaleCheck terminal_digital(const PathSet& paths, const CapParams& cap, const Axis& e_axis);

}  // namespace cleanspread
