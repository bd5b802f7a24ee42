#pragma once

#include <array>
#include <optional>

#include "cleanspread/model.hpp"

namespace cleanspread {

/// Allowance model used when simulating paths.
enum class Variant { structural, gbm_allowance, gbm_emissions, tax };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Lognormal comparison models: allowance price as a GBM, or an emissions proxy as a GBM
/// feeding a digital terminal payoff. Correlations are with the coal/gas Brownian motions.
struct ReducedParams {
    double sigma_a = 0.6;       // 1/sqrt(yr)
    double rho_ac = -0.2;
    double rho_ag = 0.4;
    double sigma_e = 0.006;     // 1/sqrt(yr)
    double rho_ec = -0.2;
    double rho_eg = 0.2;
    /// Initial emissions proxy E₀ʳ in tCO2; unset means E₀ʳ = Γ (an at-the-money digital at t = 0).
    std::optional<double> emissions_initial;

    bool operator==(const ReducedParams&) const = default;
};

/// Lower-triangular factor of the 3×3 correlation matrix [coal, gas, third factor].
struct CorrelationFactor {
    std::array<std::array<double, 3>, 3> lower{};

    /// Correlated (z_coal, z_gas, z_third) from independent normals.
    std::array<double, 3> apply(const std::array<double, 3>& w) const;
};

/// Throws ConfigError when the matrix is not positive semidefinite.
CorrelationFactor correlation_factor(double rho_cg, double rho_xc, double rho_xg);

/// Exact lognormal update a exp((r − σ²/2) dt + σ √dt z).
double gbm_allowance_step(double a, double rate, double sigma, double dt, double z);

/// Exact GBM update of the emissions proxy with drift μ_E.
double gbm_emissions_step(double e, double drift, double sigma, double dt, double z);

/// e^{-r(T-t)} π Φ((log(E/Γ) + (μ_E − σ_e²/2)(T − t)) / (σ_e √(T − t))); at t = T the digital itself.
double gbm_emissions_allowance(double e_proxy, double t, double drift, double sigma_e, const CapParams& cap);

/// μ_E such that the digital price at (E₀ʳ, 0) equals `target`.
double calibrate_emissions_drift(double e_initial, double sigma_e, const CapParams& cap, double target);

/// Deterministic allowance price a0 e^{rt}.
double carbon_tax_path(double a0, double rate, double t);

double normal_cdf(double x);

}  // namespace cleanspread
