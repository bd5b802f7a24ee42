#include "cleanspread/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cleanspread/errors.hpp"

namespace cleanspread {

DemandParams default_demand() {
    return DemandParams{.mean_reversion = 50.0,
                        .seasonal_level = 21000.0,
                        .seasonal_amplitude = 3000.0,
                        .seasonal_frequency = 1.0,
                        .vol_scale = 0.1,
                        .initial = 21000.0,
                        .harmonics = {}};
}

FuelParams default_fuels() {
    const FuelProcess p{.mean_reversion = 1.5, .log_level = 2.0, .vol = 0.5, .initial = std::exp(2.0)};
    return FuelParams{.coal = p, .gas = p, .correlation = 0.3};
}

double seasonal_mean(const DemandParams& params, double t) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double level = params.seasonal_level + params.seasonal_amplitude * std::sin(two_pi * params.seasonal_frequency * t);
    for (const Harmonic& h : params.harmonics) level += h.amplitude * std::sin(two_pi * h.frequency * t);
    return level;
}

double jacobi_containment_margin(const DemandParams& params, double capacity, double horizon) {
    // Dense sampling; fine enough to resolve weekly harmonics over a multi-year horizon.
    const int n = std::max(20000, static_cast<int>(std::ceil(horizon * 20000.0)));
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        const double level = seasonal_mean(params, horizon * k / n);
        worst = std::min({worst, level, capacity - level});
    }
    return worst - capacity * params.vol_scale;
}

void validate(const DemandParams& params, double capacity, double horizon) {
    if (!(params.mean_reversion > 0)) throw ConfigError("demand.mean_reversion must be > 0");
    if (!(params.vol_scale > 0)) throw ConfigError("demand.vol_scale must be > 0");
    if (!(params.initial > 0 && params.initial < capacity)) {
        throw ConfigError("demand.initial must lie in (0, market capacity)");
    }
    const double margin = jacobi_containment_margin(params, capacity, horizon);
    if (margin < 0) {
        throw ConfigError("demand: Jacobi containment min(D(t), x - D(t)) >= x * vol_scale violated by " +
                          std::to_string(-margin) + " MWh");
    }
}

void validate(const FuelParams& params) {
    for (Fuel f : kFuels) {
        const FuelProcess& p = params.at(f);
        const std::string name = "fuel." + std::string(to_string(f));
        if (!(p.mean_reversion > 0)) throw ConfigError(name + ".mean_reversion must be > 0");
        if (!(p.vol > 0)) throw ConfigError(name + ".vol must be > 0");
        if (!(p.initial > 0)) throw ConfigError(name + ".initial must be > 0");
    }
    if (!(std::abs(params.correlation) <= 1.0)) throw ConfigError("fuel.correlation must lie in [-1, 1]");
}

Coefficients demand_coefficients(const DemandParams& params, double capacity, double t, double d) {
    if (!(d >= 0.0 && d <= capacity)) throw DomainError("demand outside [0, market capacity]");
    const double drift = -params.mean_reversion * (d - seasonal_mean(params, t));
    const double var = 2.0 * params.mean_reversion * params.vol_scale * d * (capacity - d);
    return {drift, std::sqrt(std::max(var, 0.0))};
}

Coefficients fuel_coefficients(const FuelParams& params, Fuel fuel, double s) {
    if (!(s > 0.0)) throw DomainError("fuel price must be > 0");
    const FuelProcess& p = params.at(fuel);
    const double drift = -p.mean_reversion * (std::log(s) - p.log_level - p.vol * p.vol / (2.0 * p.mean_reversion)) * s;
    return {drift, p.vol * s};
}

NoiseDraw correlate_fuels(double rho, double z_demand, double w1, double w2) {
    return {z_demand, w1, rho * w1 + std::sqrt(1.0 - rho * rho) * w2};
}

namespace {

double reflect(double x, double lo, double hi) {
    // Instantaneous reflection; the loop only matters for overshoots larger than the interval.
    for (int i = 0; i < 8 && (x < lo || x > hi); ++i) {
        if (x < lo) x = 2.0 * lo - x;
        if (x > hi) x = 2.0 * hi - x;
    }
    return std::clamp(x, lo, hi);
}

}  // namespace

MarketState euler_step(const MarketState& state, double dt, const NoiseDraw& noise,
                       const DemandParams& demand, double capacity, const FuelParams& fuels,
                       bool* demand_reflected) {
    const double sq = std::sqrt(dt);
    MarketState next = state;
    next.t = state.t + dt;

    const Coefficients cd = demand_coefficients(demand, capacity, state.t, state.demand);
    const double raw = state.demand + cd.drift * dt + cd.vol * sq * noise.demand;
    if (demand_reflected) *demand_reflected = raw < 0.0 || raw > capacity;
    next.demand = reflect(raw, 0.0, capacity);

    const Coefficients cc = fuel_coefficients(fuels, Fuel::coal, state.coal);
    const Coefficients cg = fuel_coefficients(fuels, Fuel::gas, state.gas);
    next.coal = std::abs(state.coal + cc.drift * dt + cc.vol * sq * noise.coal);
    next.gas = std::abs(state.gas + cg.drift * dt + cg.vol * sq * noise.gas);
    return next;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)), static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                      static_cast<std::uint32_t>(splitmix64(stream ^ 0xd1b54a32d192ed03ULL)),
                      static_cast<std::uint32_t>(splitmix64(stream ^ 0xd1b54a32d192ed03ULL) >> 32)};
    engine_.seed(seq);
}

}  // namespace cleanspread
