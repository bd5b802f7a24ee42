#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "cleanspread/market_stack.hpp"

namespace cleanspread {

/// Additional sinusoidal term in the seasonal demand level.
struct Harmonic {
    double amplitude = 0.0;  // MWh
    double frequency = 0.0;  // 1/yr

    bool operator==(const Harmonic&) const = default;
};

/// Jacobi diffusion for demand, mean-reverting to a seasonal level on (0, x̄).
struct DemandParams {
    double mean_reversion = 0.0;      // 1/yr
    double seasonal_level = 0.0;      // MWh
    double seasonal_amplitude = 0.0;  // MWh
    double seasonal_frequency = 0.0;  // 1/yr
    double vol_scale = 0.0;           // dimensionless
    double initial = 0.0;             // MWh
    std::vector<Harmonic> harmonics;

    bool operator==(const DemandParams&) const = default;
};

struct FuelProcess {
    double mean_reversion = 0.0;  // 1/yr
    double log_level = 0.0;       // log EUR/MMBtu
    double vol = 0.0;             // 1/sqrt(yr)
    double initial = 0.0;         // EUR/MMBtu

    bool operator==(const FuelProcess&) const = default;
};

/// Correlated exponential OU fuel prices.
struct FuelParams {
    FuelProcess coal;
    FuelProcess gas;
    double correlation = 0.0;

    const FuelProcess& at(Fuel f) const { return f == Fuel::coal ? coal : gas; }
    bool operator==(const FuelParams&) const = default;
};

DemandParams default_demand();
FuelParams default_fuels();

/// A point of the coupled system.
struct MarketState {
    double t = 0.0;
    double demand = 0.0;
    double coal = 0.0;
    double gas = 0.0;
    double emissions = 0.0;
    double allowance = 0.0;
};

/// Independent standard normals for one step. Demand noise is independent of the
/// fuel noises; the fuel pair is correlated by `correlate_fuels`.
struct NoiseDraw {
    double demand = 0.0;
    double coal = 0.0;
    double gas = 0.0;
};

struct Coefficients {
    double drift;
    double vol;
};

double seasonal_mean(const DemandParams& params, double t);

/// min over [0, horizon] of min(D̄(t), x̄ − D̄(t)) − x̄ σ̂ (sampled); negative means violated.
double jacobi_containment_margin(const DemandParams& params, double capacity, double horizon);
/// Throws ConfigError on invalid demand parameters, including a containment violation.
void validate(const DemandParams& params, double capacity, double horizon);
void validate(const FuelParams& params);

Coefficients demand_coefficients(const DemandParams& params, double capacity, double t, double d);
Coefficients fuel_coefficients(const FuelParams& params, Fuel fuel, double s);

/// Maps independent normals (w1, w2) to the correlated fuel pair.
NoiseDraw correlate_fuels(double rho, double z_demand, double w1, double w2);

/// One Euler step of the exogenous factors with reflection at the domain boundaries.
/// Emissions and allowance are copied unchanged. `demand_reflected`, when given, is set
/// when the unreflected demand left [0, x̄].
MarketState euler_step(const MarketState& state, double dt, const NoiseDraw& noise,
                       const DemandParams& demand, double capacity, const FuelParams& fuels,
                       bool* demand_reflected = nullptr);

/// Per-path generator: a 64-bit Mersenne twister seeded from (seed, stream) through splitmix64,
/// so each path has its own reproducible stream independent of thread scheduling.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream);
    double normal() { return normal_(engine_); }
    template <std::size_t N>
    std::array<double, N> normals() {
        std::array<double, N> z{};
        for (auto& v : z) v = normal();
        return z;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cleanspread
